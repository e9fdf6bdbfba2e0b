#include "pqofh/dh.hpp"

#include <openssl/bn.h>

#include <memory>

#include "pqofh/crypto.hpp"
#include "pqofh/errors.hpp"

namespace pqofh {

// RFC 3526 §2 and §3 primes.
static constexpr const char* kModp1536 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA237327FFFFFFFFFFFFFFFF";

static constexpr const char* kModp2048 =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF";

static const DhGroup kGroups[] = {
    {0, "17", 5, 1},  // p=23, g=5; test-only
    {5, kModp1536, 2, 192},
    {14, kModp2048, 2, 256},
};

const DhGroup& dh_group(uint16_t id) {
    for (const DhGroup& g : kGroups)
        if (g.id == id) return g;
    raise(Errc::config_error, "unknown DH group id " + std::to_string(id));
}

namespace {

struct BnFree {
    void operator()(BIGNUM* b) const { BN_free(b); }
};
struct BnCtxFree {
    void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnFree>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxFree>;

BnPtr bn_from_hex(const char* hex) {
    BIGNUM* raw = nullptr;
    if (BN_hex2bn(&raw, hex) == 0) raise(Errc::config_error, "bad prime constant");
    return BnPtr(raw);
}

BnPtr bn_from_bytes(BytesView b) {
    BnPtr out(BN_bin2bn(b.data(), static_cast<int>(b.size()), nullptr));
    if (!out) raise(Errc::config_error, "BN_bin2bn failed");
    return out;
}

Bytes bn_to_fixed_bytes(const BIGNUM* v, size_t width) {
    Bytes out(width);
    if (BN_bn2binpad(v, out.data(), static_cast<int>(width)) < 0)
        raise(Errc::config_error, "BN_bn2binpad failed");
    return out;
}

}  // namespace

static BnPtr mod_exp(const BIGNUM* base, const BIGNUM* exp, const BIGNUM* p) {
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr out(BN_new());
    if (!ctx || !out || BN_mod_exp(out.get(), base, exp, p, ctx.get()) != 1)
        raise(Errc::config_error, "BN_mod_exp failed");
    return out;
}

DhKeyPair dh_keygen(const DhGroup& group, BytesView seed32) {
    BnPtr p = bn_from_hex(group.prime_hex);
    BnPtr g(BN_new());
    BN_set_word(g.get(), group.generator);

    // x uniform in [2, p-2], rejection-sampled from the seed stream.
    BnPtr limit(BN_dup(p.get()));
    BN_sub_word(limit.get(), 3);  // x-2 in [0, p-4]
    HashStream stream(derive_seed(seed32, "dh-exponent"));
    BnPtr x;
    while (true) {
        Bytes candidate = stream.take(group.byte_len);
        BnPtr v = bn_from_bytes(candidate);
        if (BN_cmp(v.get(), limit.get()) <= 0) {
            BN_add_word(v.get(), 2);
            x = std::move(v);
            break;
        }
    }

    BnPtr pub = mod_exp(g.get(), x.get(), p.get());
    DhKeyPair kp;
    kp.private_exponent = bn_to_fixed_bytes(x.get(), group.byte_len);
    kp.public_value = bn_to_fixed_bytes(pub.get(), group.byte_len);
    return kp;
}

Bytes dh_public_from_private(const DhGroup& group, BytesView private_exponent) {
    BnPtr p = bn_from_hex(group.prime_hex);
    BnPtr g(BN_new());
    BN_set_word(g.get(), group.generator);
    BnPtr x = bn_from_bytes(private_exponent);
    BnPtr pub = mod_exp(g.get(), x.get(), p.get());
    return bn_to_fixed_bytes(pub.get(), group.byte_len);
}

Bytes dh_shared(const DhGroup& group, BytesView private_exponent, BytesView peer_public) {
    if (peer_public.size() != group.byte_len)
        raise(Errc::invalid_public_value, "peer public value has wrong length");
    BnPtr p = bn_from_hex(group.prime_hex);
    BnPtr peer = bn_from_bytes(peer_public);

    // Reject 0, 1, p-1 and anything outside the group range.
    BnPtr pm1(BN_dup(p.get()));
    BN_sub_word(pm1.get(), 1);
    if (BN_is_zero(peer.get()) || BN_is_one(peer.get()) || BN_cmp(peer.get(), pm1.get()) >= 0)
        raise(Errc::invalid_public_value, "peer public value outside (1, p-1)");

    BnPtr x = bn_from_bytes(private_exponent);
    BnPtr shared = mod_exp(peer.get(), x.get(), p.get());
    return sha256(bn_to_fixed_bytes(shared.get(), group.byte_len));
}

namespace {

class DhBaselineKem final : public KemProvider {
public:
    explicit DhBaselineKem(uint16_t group_id)
        : name_("dh-baseline"), group_(&dh_group(group_id)) {
        params_.public_key_len = group_->byte_len;
        params_.ciphertext_len = group_->byte_len;
        params_.shared_secret_len = 32;
        params_.encaps_cost_us = 0;
    }

    const std::string& name() const override { return name_; }
    const KemParams& params() const override { return params_; }

    KeyPair keygen(BytesView seed32) const override {
        DhKeyPair kp = dh_keygen(*group_, seed32);
        return {std::move(kp.public_value), std::move(kp.private_exponent)};
    }

    EncapsResult encapsulate(BytesView public_key, BytesView seed32) const override {
        if (public_key.size() != params_.public_key_len)
            raise(Errc::malformed_public_key, name_);
        DhKeyPair eph = dh_keygen(*group_, seed32);
        Bytes secret = dh_shared(*group_, eph.private_exponent, public_key);
        return {std::move(eph.public_value), std::move(secret)};
    }

    Bytes decapsulate(BytesView secret_key, BytesView ciphertext) const override {
        if (ciphertext.size() != params_.ciphertext_len)
            raise(Errc::malformed_ciphertext, name_);
        return dh_shared(*group_, secret_key, ciphertext);
    }

private:
    std::string name_;
    const DhGroup* group_;
    KemParams params_;
};

}  // namespace

std::unique_ptr<KemProvider> make_dh_baseline(uint16_t group_id) {
    return std::make_unique<DhBaselineKem>(group_id);
}

}  // namespace pqofh
