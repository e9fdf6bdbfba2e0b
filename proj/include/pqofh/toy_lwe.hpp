#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pqofh/common.hpp"
#include "pqofh/kem.hpp"

namespace pqofh {

// Desk-scale LWE KEM. Secrets and errors are uniform on [-eta, +eta]; the
// public matrix A is re-derived from a 16-byte seed on both sides. With the
// default parameters the worst-case decode error 2*n*eta^2 + eta = 1026 stays
// below q/4 = 2048, so decapsulation can never fail for honest ciphertexts.
struct ToyLweParams {
    uint32_t n = 128;   // lattice dimension
    uint32_t q = 8192;  // power-of-two modulus
    uint32_t eta = 2;   // error bound
    uint32_t u = 8;     // ciphertext rows
    uint32_t w = 16;    // key columns

    size_t message_bits() const { return static_cast<size_t>(u) * w; }
    size_t message_bytes() const { return (message_bits() + 7) / 8; }
    size_t public_key_len() const { return 16 + 2 * static_cast<size_t>(n) * w; }
    size_t ciphertext_len() const {
        return 2 * static_cast<size_t>(u) * n + 2 * static_cast<size_t>(u) * w;
    }
    size_t secret_key_len() const { return 32 + static_cast<size_t>(n) * w; }

    // Shape checks only (dims > 0, q power of two, eta small enough to fit a
    // byte sampler). Miniature test instances pass this.
    void validate_shape() const;
    // Full production invariant: shape + zero-failure bound + >= 128-bit message.
    void validate() const;
};

// Row-major matrix over Z_q, 2-byte little-endian per element on the wire.
using LweMatrix = std::vector<uint16_t>;

// A[i][j] = low log2(q) bits of a SHA-256 counter stream over the seed,
// consumed 2 bytes (little-endian) per entry in row-major order.
LweMatrix expand_matrix(BytesView seed16, uint32_t n, uint32_t q);

struct ToyLweEncaps {
    Bytes ciphertext;
    Bytes message;  // the raw encapsulated bits, before transcript hashing
};

// Low-level operations, parameterized so tests can run miniature instances.
KeyPair toy_lwe_keygen(const ToyLweParams& p, BytesView seed32);
ToyLweEncaps toy_lwe_encapsulate(const ToyLweParams& p, BytesView public_key, BytesView seed32);
Bytes toy_lwe_decapsulate_bits(const ToyLweParams& p, BytesView secret_key, BytesView ciphertext);

// Final secret binds the transcript: SHA-256(message || SHA-256(pk) || SHA-256(ct)).
Bytes toy_lwe_shared_secret(BytesView message, BytesView pk_hash, BytesView ciphertext);

// Registry provider at the default parameters, registered as "toy-lwe".
std::unique_ptr<KemProvider> make_toy_lwe_kem();

}  // namespace pqofh
