#include "pqofh/toy_lwe.hpp"

#include <cstdlib>

#include "pqofh/crypto.hpp"
#include "pqofh/errors.hpp"

namespace pqofh {

void ToyLweParams::validate_shape() const {
    if (n == 0 || u == 0 || w == 0) raise(Errc::config_error, "toy-lwe dims must be positive");
    if (q < 4 || (q & (q - 1)) != 0 || q > 65536)
        raise(Errc::config_error, "toy-lwe modulus must be a power of two in [4, 65536]");
    if (2 * eta + 1 > 256) raise(Errc::config_error, "toy-lwe eta too large for byte sampler");
}

void ToyLweParams::validate() const {
    validate_shape();
    // 2*n*eta^2 + eta < q/4 makes honest decapsulation exact.
    const uint64_t worst = 2ull * n * eta * eta + eta;
    if (worst >= q / 4) raise(Errc::config_error, "toy-lwe error bound violates q/4 decode margin");
    if (message_bits() < 128) raise(Errc::config_error, "toy-lwe message below 128 bits");
}

LweMatrix expand_matrix(BytesView seed16, uint32_t n, uint32_t q) {
    HashStream stream(Bytes(seed16.begin(), seed16.end()));
    const uint16_t mask = static_cast<uint16_t>(q - 1);
    LweMatrix a(static_cast<size_t>(n) * n);
    for (auto& entry : a) {
        const uint8_t lo = stream.next_byte();
        const uint8_t hi = stream.next_byte();
        entry = static_cast<uint16_t>((lo | (hi << 8)) & mask);
    }
    return a;
}

namespace {

// Uniform on [-eta, +eta], rejection-sampled one byte at a time.
int32_t sample_small(HashStream& stream, uint32_t eta) {
    if (eta == 0) return 0;
    const uint32_t m = 2 * eta + 1;
    const uint32_t limit = 256 - (256 % m);
    while (true) {
        const uint8_t b = stream.next_byte();
        if (b < limit) return static_cast<int32_t>(b % m) - static_cast<int32_t>(eta);
    }
}

std::vector<int32_t> sample_small_matrix(HashStream& stream, size_t count, uint32_t eta) {
    std::vector<int32_t> out(count);
    for (auto& v : out) v = sample_small(stream, eta);
    return out;
}

void pack_le16(Bytes& out, const LweMatrix& m) {
    for (uint16_t e : m) {
        out.push_back(static_cast<uint8_t>(e));
        out.push_back(static_cast<uint8_t>(e >> 8));
    }
}

// Out-of-range words are masked rather than rejected so tampered ciphertexts
// still decode to *something* (the agreement tests check it differs).
LweMatrix unpack_le16(const uint8_t* p, size_t count, uint32_t q) {
    const uint16_t mask = static_cast<uint16_t>(q - 1);
    LweMatrix m(count);
    for (size_t i = 0; i < count; ++i)
        m[i] = static_cast<uint16_t>((p[2 * i] | (p[2 * i + 1] << 8)) & mask);
    return m;
}

// rows_a x inner (Z_q) times inner x cols (small signed) -> rows_a x cols mod q.
LweMatrix mul_q_small(const LweMatrix& a, const std::vector<int32_t>& s, size_t rows,
                      size_t inner, size_t cols, uint32_t q) {
    LweMatrix out(rows * cols);
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) {
            int64_t acc = 0;
            for (size_t k = 0; k < inner; ++k)
                acc += static_cast<int64_t>(a[i * inner + k]) * s[k * cols + j];
            out[i * cols + j] = static_cast<uint16_t>(acc & (q - 1));
        }
    }
    return out;
}

// rows x inner (small signed) times inner x cols (Z_q) -> rows x cols mod q.
LweMatrix mul_small_q(const std::vector<int32_t>& s, const LweMatrix& a, size_t rows,
                      size_t inner, size_t cols, uint32_t q) {
    LweMatrix out(rows * cols);
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) {
            int64_t acc = 0;
            for (size_t k = 0; k < inner; ++k)
                acc += static_cast<int64_t>(s[i * inner + k]) * a[k * cols + j];
            out[i * cols + j] = static_cast<uint16_t>(acc & (q - 1));
        }
    }
    return out;
}

void add_small_inplace(LweMatrix& m, const std::vector<int32_t>& e, uint32_t q) {
    for (size_t i = 0; i < m.size(); ++i)
        m[i] = static_cast<uint16_t>((static_cast<int64_t>(m[i]) + e[i]) & (q - 1));
}

uint8_t message_bit(BytesView msg, size_t t) { return (msg[t / 8] >> (t % 8)) & 1; }

}  // namespace

KeyPair toy_lwe_keygen(const ToyLweParams& p, BytesView seed32) {
    p.validate_shape();
    HashStream stream(derive_seed(seed32, "toy-lwe/keygen"));
    const Bytes seed_a = stream.take(16);
    const auto s = sample_small_matrix(stream, static_cast<size_t>(p.n) * p.w, p.eta);
    const auto e = sample_small_matrix(stream, static_cast<size_t>(p.n) * p.w, p.eta);

    const LweMatrix a = expand_matrix(seed_a, p.n, p.q);
    LweMatrix b = mul_q_small(a, s, p.n, p.n, p.w, p.q);
    add_small_inplace(b, e, p.q);

    KeyPair kp;
    kp.public_key = seed_a;
    pack_le16(kp.public_key, b);

    // sk = SHA-256(pk) || S as signed bytes; the hash feeds the transcript
    // binding at decapsulation time without keeping the whole public key.
    kp.secret_key = sha256(kp.public_key);
    kp.secret_key.reserve(p.secret_key_len());
    for (int32_t v : s) kp.secret_key.push_back(static_cast<uint8_t>(static_cast<int8_t>(v)));
    return kp;
}

ToyLweEncaps toy_lwe_encapsulate(const ToyLweParams& p, BytesView public_key, BytesView seed32) {
    p.validate_shape();
    if (public_key.size() != p.public_key_len())
        raise(Errc::malformed_public_key, "toy-lwe public key length");

    HashStream stream(derive_seed(seed32, "toy-lwe/encaps"));
    Bytes msg = stream.take(p.message_bytes());
    if (p.message_bits() % 8 != 0)
        msg.back() &= static_cast<uint8_t>((1u << (p.message_bits() % 8)) - 1);

    const auto sp = sample_small_matrix(stream, static_cast<size_t>(p.u) * p.n, p.eta);
    const auto ep = sample_small_matrix(stream, static_cast<size_t>(p.u) * p.n, p.eta);
    const auto epp = sample_small_matrix(stream, static_cast<size_t>(p.u) * p.w, p.eta);

    const LweMatrix a = expand_matrix(public_key.first(16), p.n, p.q);
    const LweMatrix b = unpack_le16(public_key.data() + 16, static_cast<size_t>(p.n) * p.w, p.q);

    LweMatrix c1 = mul_small_q(sp, a, p.u, p.n, p.n, p.q);
    add_small_inplace(c1, ep, p.q);

    LweMatrix c2 = mul_small_q(sp, b, p.u, p.n, p.w, p.q);
    add_small_inplace(c2, epp, p.q);
    for (size_t t = 0; t < p.message_bits(); ++t)
        c2[t] = static_cast<uint16_t>((c2[t] + message_bit(msg, t) * (p.q / 2)) & (p.q - 1));

    ToyLweEncaps out;
    pack_le16(out.ciphertext, c1);
    pack_le16(out.ciphertext, c2);
    out.message = std::move(msg);
    return out;
}

Bytes toy_lwe_decapsulate_bits(const ToyLweParams& p, BytesView secret_key, BytesView ciphertext) {
    p.validate_shape();
    if (secret_key.size() != p.secret_key_len())
        raise(Errc::config_error, "toy-lwe secret key length");
    if (ciphertext.size() != p.ciphertext_len())
        raise(Errc::malformed_ciphertext, "toy-lwe ciphertext length");

    std::vector<int32_t> s(static_cast<size_t>(p.n) * p.w);
    for (size_t i = 0; i < s.size(); ++i)
        s[i] = static_cast<int8_t>(secret_key[32 + i]);

    const LweMatrix c1 = unpack_le16(ciphertext.data(), static_cast<size_t>(p.u) * p.n, p.q);
    const LweMatrix c2 =
        unpack_le16(ciphertext.data() + 2 * static_cast<size_t>(p.u) * p.n,
                    static_cast<size_t>(p.u) * p.w, p.q);

    const LweMatrix c1s = mul_q_small(c1, s, p.u, p.n, p.w, p.q);

    Bytes msg(p.message_bytes(), 0);
    for (size_t t = 0; t < p.message_bits(); ++t) {
        const uint32_t m = (c2[t] + p.q - c1s[t]) & (p.q - 1);
        // Decode to 0 iff the centered residue lies in (-q/4, q/4].
        const uint8_t bit = (m <= p.q / 4 || m > 3 * p.q / 4) ? 0 : 1;
        msg[t / 8] |= static_cast<uint8_t>(bit << (t % 8));
    }
    return msg;
}

Bytes toy_lwe_shared_secret(BytesView message, BytesView pk_hash, BytesView ciphertext) {
    return sha256(concat(message, pk_hash, as_view(sha256(ciphertext))));
}

namespace {

class ToyLweKem final : public KemProvider {
public:
    ToyLweKem() : name_("toy-lwe") {
        lwe_.validate();
        params_.public_key_len = lwe_.public_key_len();
        params_.ciphertext_len = lwe_.ciphertext_len();
        params_.shared_secret_len = 32;
        params_.encaps_cost_us = 0;
    }

    const std::string& name() const override { return name_; }
    const KemParams& params() const override { return params_; }

    KeyPair keygen(BytesView seed32) const override { return toy_lwe_keygen(lwe_, seed32); }

    EncapsResult encapsulate(BytesView public_key, BytesView seed32) const override {
        ToyLweEncaps enc = toy_lwe_encapsulate(lwe_, public_key, seed32);
        Bytes secret = toy_lwe_shared_secret(enc.message, sha256(public_key), enc.ciphertext);
        return {std::move(enc.ciphertext), std::move(secret)};
    }

    Bytes decapsulate(BytesView secret_key, BytesView ciphertext) const override {
        const Bytes msg = toy_lwe_decapsulate_bits(lwe_, secret_key, ciphertext);
        return toy_lwe_shared_secret(msg, secret_key.first(32), ciphertext);
    }

private:
    std::string name_;
    ToyLweParams lwe_;
    KemParams params_;
};

}  // namespace

std::unique_ptr<KemProvider> make_toy_lwe_kem() { return std::make_unique<ToyLweKem>(); }

}  // namespace pqofh
