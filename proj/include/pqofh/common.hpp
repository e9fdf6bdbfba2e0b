#pragma once

#include <chrono>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pqofh {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

inline BytesView as_view(const Bytes& b) { return BytesView(b.data(), b.size()); }

inline BytesView as_view(std::string_view s) {
    return BytesView(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

// Big-endian integer packing; all wire integers in this project are big-endian.
inline void put_be16(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void put_be32(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void put_be64(Bytes& out, uint64_t v) {
    put_be32(out, static_cast<uint32_t>(v >> 32));
    put_be32(out, static_cast<uint32_t>(v));
}

inline uint16_t get_be16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] << 8 | p[1]);
}

inline uint32_t get_be32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
           static_cast<uint32_t>(p[2]) << 8 | static_cast<uint32_t>(p[3]);
}

inline uint64_t get_be64(const uint8_t* p) {
    return static_cast<uint64_t>(get_be32(p)) << 32 | get_be32(p + 4);
}

std::string to_hex(BytesView data);
Bytes from_hex(std::string_view hex);

inline Bytes concat(BytesView a, BytesView b) {
    Bytes out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline Bytes concat(BytesView a, BytesView b, BytesView c) {
    Bytes out = concat(a, b);
    out.insert(out.end(), c.begin(), c.end());
    return out;
}

inline int64_t steady_now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Busy-wait for an emulated compute cost. Sleeping is too coarse at the
// microsecond scale the mock KEM profiles model.
inline void spin_wait_us(uint32_t us) {
    if (us == 0) return;
    const int64_t until = steady_now_ns() + static_cast<int64_t>(us) * 1000;
    while (steady_now_ns() < until) {
    }
}

std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);

// Shortest decimal representation that round-trips through a double.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace pqofh
