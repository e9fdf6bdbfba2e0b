#pragma once

#include <cstdint>

#include "pqofh/common.hpp"
#include "pqofh/kem.hpp"

namespace pqofh {

// Finite-field Diffie-Hellman over a fixed safe-prime group table.
// Public values are fixed-width big-endian (the byte length of p).
struct DhGroup {
    uint16_t id;
    const char* prime_hex;
    uint32_t generator;
    size_t byte_len;
};

// Built-in groups: 0 is a tiny test-only group (p=23, g=5); 5 and 14 are the
// RFC 3526 1536/2048-bit MODP groups.
const DhGroup& dh_group(uint16_t id);

struct DhKeyPair {
    Bytes private_exponent;  // fixed-width big-endian
    Bytes public_value;
};

DhKeyPair dh_keygen(const DhGroup& group, BytesView seed32);
Bytes dh_public_from_private(const DhGroup& group, BytesView private_exponent);

// Both peers derive SHA-256 of the fixed-width shared value g^(xy) mod p.
// Rejects peer values outside (1, p-1).
Bytes dh_shared(const DhGroup& group, BytesView private_exponent, BytesView peer_public);

// DH wrapped in the KEM interface: the ciphertext is the encapsulator's
// ephemeral public value. Registered as the "dh-baseline" suite.
std::unique_ptr<KemProvider> make_dh_baseline(uint16_t group_id = 14);

inline constexpr uint16_t kDefaultDhGroup = 14;

}  // namespace pqofh
