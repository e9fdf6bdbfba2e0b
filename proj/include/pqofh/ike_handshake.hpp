#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pqofh/common.hpp"
#include "pqofh/crypto.hpp"
#include "pqofh/ike_message.hpp"
#include "pqofh/kem.hpp"
#include "pqofh/ledger.hpp"

namespace pqofh {

enum class Role : uint8_t { initiator, responder };

// Per-direction tunnel keys produced by the handshake. sk_ei/sk_ai protect
// initiator-to-responder traffic; sk_er/sk_ar the reverse.
struct KeySchedule {
    Bytes sk_d;   // 32-byte derivation key (seeds the tunnel SPIs)
    Bytes sk_ai;  // PRF-output-length integrity keys
    Bytes sk_ar;
    Bytes sk_ei;  // cipher-keylength encryption keys
    Bytes sk_er;

    size_t total_bytes() const {
        return sk_d.size() + sk_ai.size() + sk_ar.size() + sk_ei.size() + sk_er.size();
    }
    bool operator==(const KeySchedule&) const = default;
};

// Key combining: the classical secret anchors the chain and every additional
// KEM secret is folded in through the negotiated PRF, so the final key depends
// on every exchanged secret.
Bytes initial_chain_key(PrfAlg prf, BytesView ni, BytesView nr, BytesView classical_secret);
Bytes combine_keys(PrfAlg prf, BytesView chain_key, BytesView round_secret, BytesView ni,
                   BytesView nr);
Bytes combine_chain(PrfAlg prf, BytesView classical_secret,
                    const std::vector<Bytes>& round_secrets, BytesView ni, BytesView nr);

// Iterated PRF expansion of the final key:
//   T1 = PRF(final, ni || nr || 0x01), Tk = PRF(final, T(k-1) || ni || nr || k)
// concatenated and split in order sk_d(32), sk_ai, sk_ar, sk_ei, sk_er.
KeySchedule derive_key_schedule(PrfAlg prf, EncrAlg encr, BytesView final_key, BytesView ni,
                                BytesView nr);

struct HandshakeConfig {
    Role role = Role::initiator;
    std::vector<Proposal> proposals;  // initiator: offers in order; responder: policy in order
    Bytes psk;
    Bytes seed;  // 32 bytes; all nonces/exponents/KEM seeds derive from it
    const KemRegistry* registry = nullptr;
};

// One side of the handshake. Drive with start() (initiator) and on_message();
// a returned message goes to the peer, nullopt means this side is done.
// Any raised Error leaves the state failed and unusable.
class HandshakeState {
public:
    explicit HandshakeState(HandshakeConfig cfg);

    Message start();
    std::optional<Message> on_message(const Message& incoming);

    bool established() const { return phase_ == Phase::established; }
    const Proposal& chosen() const;
    const KeySchedule& schedule() const;
    const Bytes& ni() const { return ni_; }
    const Bytes& nr() const { return nr_; }

    uint64_t bytes_sent() const { return bytes_sent_; }
    uint64_t bytes_received() const { return bytes_received_; }

    // Instrumentation for key-dependence checks: the raw secrets feeding the
    // combiner, and the combined key they produce.
    const Bytes& classical_secret() const { return classical_secret_; }
    const std::vector<Bytes>& round_secrets() const { return round_secrets_; }
    const Bytes& final_key() const { return chain_key_; }

    // Ladder lines ("dir msg_id exchange_type payload_types total_bytes") are
    // appended for every message this side sends.
    void set_transcript_sink(std::vector<std::string>* sink) { sink_ = sink; }
    void set_ledger(ByteLedger* ledger) { ledger_ = ledger; }

private:
    enum class Phase : uint8_t {
        idle,
        wait_sa_init_request,
        wait_sa_init_response,
        wait_intermediate_request,
        wait_intermediate_response,
        wait_auth_request,
        wait_auth_response,
        established,
        failed,
    };

    Message make_sa_init_request();
    Message handle_sa_init_request(const Message& msg);
    void handle_sa_init_response(const Message& msg);
    Message handle_intermediate_request(const Message& msg);
    void handle_intermediate_response(const Message& msg);
    Message next_initiator_message();  // INTERMEDIATE round or AUTH request
    Message make_auth_request();
    Message handle_auth_request(const Message& msg);
    void handle_auth_response(const Message& msg);

    void check_request_id(const Message& msg);
    void absorb(const Bytes& wire);
    Bytes auth_tag(char role_tag) const;
    void complete_keys();
    void finish();
    Message emit(Message msg);
    Bytes subseed(const char* label, uint32_t index = 0) const;
    void account(size_t transient);

    HandshakeConfig cfg_;
    Phase phase_ = Phase::idle;
    Proposal chosen_;
    Bytes ni_, nr_;
    Bytes transcript_ = Bytes(32, 0);
    Bytes classical_secret_;
    std::vector<Bytes> round_secrets_;
    Bytes chain_key_;
    KeySchedule schedule_;
    uint32_t round_ = 0;           // next ADDKE round index
    uint32_t next_request_id_ = 0;
    Bytes dh_private_;
    KeyPair round_keypair_;        // initiator's keypair for the in-flight round
    uint64_t bytes_sent_ = 0;
    uint64_t bytes_received_ = 0;
    size_t ledger_held_ = 0;       // transient bytes to release on establishment
    std::vector<std::string>* sink_ = nullptr;
    ByteLedger* ledger_ = nullptr;
};

struct HandshakeOutcome {
    Proposal chosen;
    KeySchedule initiator_schedule;
    KeySchedule responder_schedule;
    Bytes ni, nr;
    uint64_t total_bytes = 0;  // every message counted once
    double wall_ms = 0;
    std::vector<std::string> ladder;
};

// Runs both state machines to completion in-process. Raises on negotiation,
// KEM, or authentication failure.
HandshakeOutcome run_handshake(const HandshakeConfig& initiator, const HandshakeConfig& responder,
                               ByteLedger* ledger = nullptr);

}  // namespace pqofh
