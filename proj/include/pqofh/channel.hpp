#pragma once
#include <cstdint>
#include <random>

#include "pqofh/common.hpp"

namespace pqofh {

// Constant-rate sender schedule. rate*duration is capped so a full trace
// always fits in memory.
struct TrafficProfile {
    uint32_t packet_size = 1200;  // payload bytes per packet
    double rate_pps = 10000.0;
    double duration_s = 10.0;

    void validate() const;
    uint64_t packet_count() const;
    int64_t send_ns(uint64_t index) const {  // nominal send time, session epoch 0
        return static_cast<int64_t>(static_cast<double>(index) * 1e9 / rate_pps + 0.5);
    }
};

// One-way link model, applied identically in both directions: fixed base
// delay, uniform jitter in [-delay_jitter, +delay_jitter], Bernoulli loss.
struct ChannelModel {
    double base_delay_us = 0.0;
    double delay_jitter_us = 0.0;
    double loss_rate = 0.0;

    void validate() const;
};

// Deterministic per-direction sampler. Each packet consumes exactly two
// uniform draws (drop, jitter) so the delay sequence does not depend on
// which packets happen to be dropped.
class ChannelSampler {
public:
    struct Fate {
        bool dropped;
        int64_t delay_ns;
    };

    ChannelSampler(const ChannelModel& model, BytesView seed);
    Fate next();

private:
    double uniform01();

    ChannelModel model_;
    std::mt19937_64 rng_;
};

}  // namespace pqofh
