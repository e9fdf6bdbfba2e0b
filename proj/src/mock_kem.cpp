#include "pqofh/mock_kem.hpp"

#include <utility>

#include "pqofh/crypto.hpp"
#include "pqofh/errors.hpp"

namespace pqofh {

namespace {

class MockKem final : public KemProvider {
public:
    MockKem(std::string name, const KemParams& params)
        : name_(std::move(name)), params_(params) {
        params_.validate();
        if (params_.ciphertext_len < 32)
            raise(Errc::config_error, "mock ciphertext_len must be >= 32 (" + name_ + ")");
    }

    const std::string& name() const override { return name_; }
    const KemParams& params() const override { return params_; }

    KeyPair keygen(BytesView seed32) const override {
        KeyPair kp;
        kp.secret_key = derive_seed(seed32, "mock/" + name_ + "/keygen");
        kp.public_key = public_from_root(kp.secret_key);
        return kp;
    }

    EncapsResult encapsulate(BytesView public_key, BytesView seed32) const override {
        if (public_key.size() != params_.public_key_len)
            raise(Errc::malformed_public_key, name_);
        const Bytes eph = derive_seed(seed32, "mock/" + name_ + "/encaps");

        Bytes ct = eph;
        HashStream pad(derive_seed(eph, "mock-ct-pad"));
        Bytes tail = pad.take(params_.ciphertext_len - 32);
        ct.insert(ct.end(), tail.begin(), tail.end());

        spin_wait_us(params_.encaps_cost_us);
        return {std::move(ct), shared(public_key, eph)};
    }

    Bytes decapsulate(BytesView secret_key, BytesView ciphertext) const override {
        if (ciphertext.size() != params_.ciphertext_len)
            raise(Errc::malformed_ciphertext, name_);
        const Bytes pk = public_from_root(secret_key);
        return shared(pk, ciphertext.first(32));
    }

private:
    Bytes public_from_root(BytesView root) const {
        HashStream stream(derive_seed(root, "mock-pk"));
        return stream.take(params_.public_key_len);
    }

    Bytes shared(BytesView public_key, BytesView eph) const {
        const Bytes tag = hmac(PrfAlg::hmac_sha256, as_view("mock-kem/" + name_),
                               concat(public_key, eph));
        HashStream stream(tag);
        return stream.take(params_.shared_secret_len);
    }

    std::string name_;
    KemParams params_;
};

}  // namespace

std::unique_ptr<KemProvider> make_mock_kem(std::string name, const KemParams& params) {
    return std::make_unique<MockKem>(std::move(name), params);
}

}  // namespace pqofh
