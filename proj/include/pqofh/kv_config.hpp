#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pqofh/common.hpp"

namespace pqofh {

// Flat key=value configuration format shared by the mock-KEM profile, matrix
// and tunnel-profile files. '#' starts a comment, blank lines are ignored,
// duplicate keys are an error.
class KvConfig {
public:
    static KvConfig parse(std::string_view text, const std::string& source = "<string>");
    static KvConfig load(const std::string& path);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;  // ConfigError if absent
    std::string get_or(const std::string& key, std::string fallback) const;
    uint64_t get_u64(const std::string& key) const;
    uint64_t get_u64_or(const std::string& key, uint64_t fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;

    // Keys in file order.
    const std::vector<std::string>& keys() const { return order_; }
    const std::string& source() const { return source_; }

    // Validation helper: every key must appear in `allowed`, otherwise a
    // ConfigError naming the first offender is raised.
    void require_known_keys(const std::vector<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
    std::string source_;
};

}  // namespace pqofh
