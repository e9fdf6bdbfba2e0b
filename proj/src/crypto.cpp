#include "pqofh/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/sha.h>

#include <memory>

#include "pqofh/errors.hpp"

namespace pqofh {

size_t encr_key_len(EncrAlg a) {
    switch (a) {
        case EncrAlg::aes128: return 16;
        case EncrAlg::aes192: return 24;
        case EncrAlg::aes256: return 32;
    }
    raise(Errc::config_error, "bad EncrAlg");
}

size_t prf_output_len(PrfAlg a) {
    switch (a) {
        case PrfAlg::hmac_sha256: return 32;
        case PrfAlg::hmac_sha384: return 48;
        case PrfAlg::hmac_sha512: return 64;
    }
    raise(Errc::config_error, "bad PrfAlg");
}

std::string encr_name(EncrAlg a) {
    switch (a) {
        case EncrAlg::aes128: return "AES-128";
        case EncrAlg::aes192: return "AES-192";
        case EncrAlg::aes256: return "AES-256";
    }
    return "?";
}

std::string prf_name(PrfAlg a) {
    switch (a) {
        case PrfAlg::hmac_sha256: return "SHA-256";
        case PrfAlg::hmac_sha384: return "SHA-384";
        case PrfAlg::hmac_sha512: return "SHA-512";
    }
    return "?";
}

EncrAlg parse_encr(std::string_view name) {
    if (name == "AES-128") return EncrAlg::aes128;
    if (name == "AES-192") return EncrAlg::aes192;
    if (name == "AES-256") return EncrAlg::aes256;
    raise(Errc::config_error, "unknown encryption algorithm '" + std::string(name) + "'");
}

PrfAlg parse_prf(std::string_view name) {
    if (name == "SHA-256" || name == "HMAC-SHA-256") return PrfAlg::hmac_sha256;
    if (name == "SHA-384" || name == "HMAC-SHA-384") return PrfAlg::hmac_sha384;
    if (name == "SHA-512" || name == "HMAC-SHA-512") return PrfAlg::hmac_sha512;
    raise(Errc::config_error, "unknown integrity algorithm '" + std::string(name) + "'");
}

Bytes sha256(BytesView data) {
    Bytes out(SHA256_DIGEST_LENGTH);
    SHA256(data.data(), data.size(), out.data());
    return out;
}

static const EVP_MD* prf_md(PrfAlg alg) {
    switch (alg) {
        case PrfAlg::hmac_sha256: return EVP_sha256();
        case PrfAlg::hmac_sha384: return EVP_sha384();
        case PrfAlg::hmac_sha512: return EVP_sha512();
    }
    raise(Errc::config_error, "bad PrfAlg");
}

Bytes hmac(PrfAlg alg, BytesView key, BytesView data) {
    Bytes out(prf_output_len(alg));
    unsigned int len = 0;
    if (HMAC(prf_md(alg), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
             out.data(), &len) == nullptr || len != out.size())
        raise(Errc::config_error, "HMAC failure");
    return out;
}

static const EVP_CIPHER* ctr_cipher(EncrAlg alg) {
    switch (alg) {
        case EncrAlg::aes128: return EVP_aes_128_ctr();
        case EncrAlg::aes192: return EVP_aes_192_ctr();
        case EncrAlg::aes256: return EVP_aes_256_ctr();
    }
    raise(Errc::config_error, "bad EncrAlg");
}

Bytes aes_ctr(EncrAlg alg, BytesView key, BytesView iv16, BytesView data) {
    if (key.size() != encr_key_len(alg)) raise(Errc::config_error, "AES key length mismatch");
    if (iv16.size() != 16) raise(Errc::config_error, "AES-CTR IV must be 16 bytes");

    struct CtxFree {
        void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
    };
    std::unique_ptr<EVP_CIPHER_CTX, CtxFree> ctx(EVP_CIPHER_CTX_new());
    if (!ctx) raise(Errc::config_error, "EVP context allocation failed");

    Bytes out(data.size());
    int n1 = 0, n2 = 0;
    if (EVP_EncryptInit_ex(ctx.get(), ctr_cipher(alg), nullptr, key.data(), iv16.data()) != 1 ||
        (!data.empty() &&
         EVP_EncryptUpdate(ctx.get(), out.data(), &n1, data.data(), static_cast<int>(data.size())) != 1) ||
        EVP_EncryptFinal_ex(ctx.get(), out.data() + n1, &n2) != 1)
        raise(Errc::config_error, "AES-CTR failure");
    if (static_cast<size_t>(n1 + n2) != data.size()) raise(Errc::config_error, "AES-CTR length mismatch");
    return out;
}

bool ct_equal(BytesView a, BytesView b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

HashStream::HashStream(Bytes seed) : seed_(std::move(seed)) {}

void HashStream::refill() {
    Bytes input = seed_;
    put_be32(input, counter_++);
    block_ = sha256(input);
    pos_ = 0;
}

uint8_t HashStream::next_byte() {
    if (pos_ >= block_.size()) refill();
    return block_[pos_++];
}

void HashStream::fill(uint8_t* out, size_t len) {
    for (size_t i = 0; i < len; ++i) out[i] = next_byte();
}

Bytes HashStream::take(size_t len) {
    Bytes out(len);
    fill(out.data(), len);
    return out;
}

Bytes derive_seed(BytesView parent, std::string_view label, uint32_t index) {
    Bytes input(parent.begin(), parent.end());
    input.insert(input.end(), label.begin(), label.end());
    put_be32(input, index);
    return sha256(input);
}

}  // namespace pqofh
