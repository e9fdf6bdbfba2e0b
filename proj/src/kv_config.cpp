#include "pqofh/kv_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pqofh/errors.hpp"

namespace pqofh {

KvConfig KvConfig::parse(std::string_view text, const std::string& source) {
    KvConfig cfg;
    cfg.source_ = source;
    size_t lineno = 0;
    for (const std::string& raw : split(text, '\n')) {
        ++lineno;
        std::string line = raw;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            raise(Errc::config_error,
                  source + ":" + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            raise(Errc::config_error, source + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.values_.count(key))
            raise(Errc::config_error, source + ": duplicate key '" + key + "'");
        cfg.values_.emplace(key, value);
        cfg.order_.push_back(key);
    }
    return cfg;
}

KvConfig KvConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::config_error, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

bool KvConfig::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& KvConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        raise(Errc::config_error, source_ + ": missing required key '" + key + "'");
    return it->second;
}

std::string KvConfig::get_or(const std::string& key, std::string fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? std::move(fallback) : it->second;
}

uint64_t KvConfig::get_u64(const std::string& key) const {
    const std::string& s = get(key);
    uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        raise(Errc::config_error, source_ + ": key '" + key + "' is not an unsigned integer: '" + s + "'");
    return v;
}

uint64_t KvConfig::get_u64_or(const std::string& key, uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

double KvConfig::get_double(const std::string& key) const {
    const std::string& s = get(key);
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        raise(Errc::config_error, source_ + ": key '" + key + "' is not a number: '" + s + "'");
    return v;
}

double KvConfig::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

void KvConfig::require_known_keys(const std::vector<std::string>& allowed) const {
    for (const std::string& key : order_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            raise(Errc::config_error, source_ + ": unknown key '" + key + "'");
    }
}

}  // namespace pqofh
