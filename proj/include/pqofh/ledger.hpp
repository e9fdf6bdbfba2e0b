#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>

namespace pqofh {

// Deterministic byte accounting for the memory metric: modules report the
// sizes of the buffers they hold (handshake messages, KEM key material, SA
// state, replay windows) and the peak is the assertable number. Unlike an OS
// RSS probe this is allocator-independent and identical across reruns.
class ByteLedger {
public:
    void add(size_t n) {
        current_ += n;
        peak_ = std::max(peak_, current_);
    }

    void release(size_t n) { current_ -= std::min(n, current_); }

    size_t current() const { return current_; }
    size_t peak() const { return peak_; }

private:
    size_t current_ = 0;
    size_t peak_ = 0;
};

// Peak resident set (VmHWM) in bytes from /proc/self/status, or 0 where the
// probe is unavailable. Reported in its own CSV column, never asserted on.
uint64_t rss_high_water_bytes();

}  // namespace pqofh
