#pragma once

#include <cstdint>

#include "pqofh/common.hpp"
#include "pqofh/crypto.hpp"

namespace pqofh {

// Packet wire layout (all integers big-endian):
//   [4: spi] [4: seq low 32 bits] [16: iv] [payload-length ciphertext] [16: icv]
// so the overhead is a constant 40 bytes for every suite. The ICV is the first
// 16 bytes of HMAC(sk_a, spi || seq || iv || ciphertext).
inline constexpr size_t kEspHeaderLen = 24;
inline constexpr size_t kEspIcvLen = 16;
inline constexpr size_t kEspOverhead = kEspHeaderLen + kEspIcvLen;
inline constexpr size_t kEspMaxPayload = 65535;

// 64-entry sliding anti-replay bitmap. Bit i of the map records whether
// sequence (highest - i) has been seen.
class ReplayWindow {
public:
    static constexpr uint64_t kSize = 64;

    bool check(uint64_t seq) const {
        if (seq == 0) return false;  // sequence numbers start at 1
        if (seq > highest_) return true;
        const uint64_t behind = highest_ - seq;
        if (behind >= kSize) return false;  // left of window
        return (bitmap_ & (uint64_t{1} << behind)) == 0;
    }

    void update(uint64_t seq) {
        if (seq > highest_) {
            const uint64_t shift = seq - highest_;
            bitmap_ = shift >= kSize ? 0 : bitmap_ << shift;
            bitmap_ |= 1;
            highest_ = seq;
        } else {
            bitmap_ |= uint64_t{1} << (highest_ - seq);
        }
    }

    bool check_and_update(uint64_t seq) {
        if (!check(seq)) return false;
        update(seq);
        return true;
    }

    uint64_t highest() const { return highest_; }

private:
    uint64_t bitmap_ = 0;
    uint64_t highest_ = 0;
};

// One direction of the tunnel: cipher/MAC keys, send counter, replay window.
// The IV is an 8-byte per-SA prefix (derived from the encryption key, so it is
// reproducible under fixed handshake seeds) followed by the 64-bit sequence.
class SecurityAssociation {
public:
    SecurityAssociation(uint32_t spi, EncrAlg encr, PrfAlg integ, Bytes sk_e, Bytes sk_a);

    struct Protected {
        Bytes wire;
        double enc_time_us;  // cipher + MAC only, monotonic clock
    };

    Protected protect(BytesView plaintext);  // SequenceExhausted past 32 bits
    Bytes unprotect(BytesView wire);         // UnknownSpi, ReplayDetected, IcvMismatch

    uint32_t spi() const { return spi_; }
    uint64_t seq() const { return seq_; }
    const ReplayWindow& window() const { return window_; }
    // Sequence number of the most recent packet unprotect() accepted.
    uint64_t last_accepted_seq() const { return last_accepted_seq_; }

    // Jump the send counter (testing hook for the 32-bit exhaustion path).
    void seek_seq(uint64_t seq) { seq_ = seq; }

    // Ledger contribution: key material plus fixed per-SA state.
    size_t state_bytes() const { return sk_e_.size() + sk_a_.size() + 40; }

private:
    uint32_t spi_;
    EncrAlg encr_;
    PrfAlg integ_;
    Bytes sk_e_;
    Bytes sk_a_;
    Bytes iv_prefix_;  // 8 bytes
    uint64_t seq_ = 0;
    uint64_t last_accepted_seq_ = 0;
    ReplayWindow window_;
};

}  // namespace pqofh
