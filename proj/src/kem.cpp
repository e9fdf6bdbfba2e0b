#include "pqofh/kem.hpp"

#include <algorithm>

#include "pqofh/dh.hpp"
#include "pqofh/errors.hpp"
#include "pqofh/mock_kem.hpp"
#include "pqofh/toy_lwe.hpp"

namespace pqofh {

void KemParams::validate() const {
    if (public_key_len == 0 || public_key_len > (1u << 20))
        raise(Errc::config_error, "public_key_len out of range");
    if (ciphertext_len == 0 || ciphertext_len > (1u << 20))
        raise(Errc::config_error, "ciphertext_len out of range");
    if (shared_secret_len < 16 || shared_secret_len > 256)
        raise(Errc::config_error, "shared_secret_len must be in [16, 256]");
    if (encaps_cost_us > 1000000)
        raise(Errc::config_error, "encaps_cost_us out of range");
}

void KemRegistry::add(std::unique_ptr<KemProvider> provider) {
    if (!provider) raise(Errc::config_error, "null KEM provider");
    provider->params().validate();
    if (contains(provider->name()))
        raise(Errc::config_error, "duplicate KEM name " + provider->name());
    order_.push_back(provider.get());
    providers_.push_back(std::move(provider));
}

const KemProvider& KemRegistry::find(std::string_view name) const {
    for (const KemProvider* p : order_)
        if (p->name() == name) return *p;
    raise(Errc::unknown_suite, "KEM " + std::string(name));
}

bool KemRegistry::contains(std::string_view name) const {
    return std::any_of(order_.begin(), order_.end(),
                       [&](const KemProvider* p) { return p->name() == name; });
}

std::vector<std::pair<std::string, KemParams>> load_mock_profiles(const KvConfig& cfg) {
    std::vector<std::pair<std::string, KemParams>> out;
    std::vector<std::string> suites;
    std::vector<std::string> known_keys = {"suites"};

    for (const std::string& s : split(cfg.get("suites"), ',')) {
        std::string name = trim(s);
        if (name.empty()) raise(Errc::config_error, "empty suite name in suites=");
        suites.push_back(name);
        known_keys.push_back(name + ".public_key_len");
        known_keys.push_back(name + ".ciphertext_len");
        known_keys.push_back(name + ".shared_secret_len");
        known_keys.push_back(name + ".encaps_cost_us");
    }
    cfg.require_known_keys(known_keys);

    for (const std::string& name : suites) {
        KemParams p;
        p.public_key_len = cfg.get_u64(name + ".public_key_len");
        p.ciphertext_len = cfg.get_u64(name + ".ciphertext_len");
        p.shared_secret_len = cfg.get_u64(name + ".shared_secret_len");
        p.encaps_cost_us = static_cast<uint32_t>(cfg.get_u64_or(name + ".encaps_cost_us", 0));
        p.validate();
        out.emplace_back(name, p);
    }
    return out;
}

KemRegistry KemRegistry::standard(
    const std::vector<std::pair<std::string, KemParams>>& mock_profiles) {
    KemRegistry reg;
    reg.add(make_dh_baseline());
    reg.add(make_toy_lwe_kem());
    for (const auto& [name, params] : mock_profiles) reg.add(make_mock_kem(name, params));
    return reg;
}

KemRegistry KemRegistry::standard_from_file(const std::string& mock_config_path) {
    return standard(load_mock_profiles(KvConfig::load(mock_config_path)));
}

}  // namespace pqofh
