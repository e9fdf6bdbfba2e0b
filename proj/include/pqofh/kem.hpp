#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pqofh/common.hpp"
#include "pqofh/kv_config.hpp"

namespace pqofh {

// Declared wire sizes for one suite. encaps_cost_us is the emulated compute
// delay of the mock providers; real providers report 0.
struct KemParams {
    size_t public_key_len = 0;
    size_t ciphertext_len = 0;
    size_t shared_secret_len = 0;
    uint32_t encaps_cost_us = 0;

    void validate() const;  // lengths > 0, shared_secret_len >= 16
};

struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
};

struct EncapsResult {
    Bytes ciphertext;
    Bytes shared_secret;
};

// Uniform keygen/encaps/decaps interface. Implementations are pure functions
// of their inputs (including the seed) and hold no mutable state after
// construction, so they are safe to share across threads.
class KemProvider {
public:
    virtual ~KemProvider() = default;

    virtual const std::string& name() const = 0;
    virtual const KemParams& params() const = 0;

    virtual KeyPair keygen(BytesView seed32) const = 0;
    virtual EncapsResult encapsulate(BytesView public_key, BytesView seed32) const = 0;
    virtual Bytes decapsulate(BytesView secret_key, BytesView ciphertext) const = 0;
};

class KemRegistry {
public:
    void add(std::unique_ptr<KemProvider> provider);
    const KemProvider& find(std::string_view name) const;  // UnknownSuite
    bool contains(std::string_view name) const;
    const std::vector<const KemProvider*>& list() const { return order_; }

    // dh-baseline + toy-lwe + one mock per profile (file order).
    static KemRegistry standard(const std::vector<std::pair<std::string, KemParams>>& mock_profiles);
    static KemRegistry standard_from_file(const std::string& mock_config_path);

private:
    std::vector<std::unique_ptr<KemProvider>> providers_;
    std::vector<const KemProvider*> order_;
};

// Parses `<suite>.public_key_len` / `.ciphertext_len` / `.shared_secret_len` /
// `.encaps_cost_us` groups from a flat key=value config. Missing length keys
// and unknown field names are hard errors; encaps_cost_us defaults to 0.
std::vector<std::pair<std::string, KemParams>> load_mock_profiles(const KvConfig& cfg);

}  // namespace pqofh
