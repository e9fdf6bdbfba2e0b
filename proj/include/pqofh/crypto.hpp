#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "pqofh/common.hpp"

namespace pqofh {

// Negotiable symmetric algorithms. One hash serves both integrity and PRF
// duty (single integ_prf axis).
enum class EncrAlg : uint8_t { aes128 = 1, aes192 = 2, aes256 = 3 };
enum class PrfAlg : uint8_t { hmac_sha256 = 1, hmac_sha384 = 2, hmac_sha512 = 3 };

size_t encr_key_len(EncrAlg a);
size_t prf_output_len(PrfAlg a);

// Canonical labels used in CSV output and CLI flags ("AES-128", "SHA-256").
std::string encr_name(EncrAlg a);
std::string prf_name(PrfAlg a);
EncrAlg parse_encr(std::string_view name);
PrfAlg parse_prf(std::string_view name);  // accepts "SHA-256" and "HMAC-SHA-256"

Bytes sha256(BytesView data);
Bytes hmac(PrfAlg alg, BytesView key, BytesView data);

// AES in counter mode; the 16-byte IV is the initial counter block.
// XOR keystream, so the same call encrypts and decrypts.
Bytes aes_ctr(EncrAlg alg, BytesView key, BytesView iv16, BytesView data);

bool ct_equal(BytesView a, BytesView b);

// Deterministic byte expander: block i = SHA-256(seed || be32(i)).
class HashStream {
public:
    explicit HashStream(Bytes seed);

    uint8_t next_byte();
    void fill(uint8_t* out, size_t len);
    Bytes take(size_t len);

private:
    void refill();

    Bytes seed_;
    Bytes block_;
    size_t pos_ = 0;
    uint32_t counter_ = 0;
};

// Domain-separated seed derivation: SHA-256(parent || label || be32(index)).
// All randomness in the artifact flows from seeds through this tree, which is
// what makes every run reproducible.
Bytes derive_seed(BytesView parent, std::string_view label, uint32_t index = 0);

}  // namespace pqofh
