#include "pqofh/channel.hpp"

#include <cmath>

#include "pqofh/errors.hpp"

namespace pqofh {

void TrafficProfile::validate() const {
    if (packet_size < 1 || packet_size > 65000)
        raise(Errc::config_error, "packet_size must be in [1, 65000], got " +
                                      std::to_string(packet_size));
    if (!(rate_pps >= 1.0))
        raise(Errc::config_error, "rate_pps must be >= 1, got " + format_double(rate_pps));
    if (!(duration_s > 0.0))
        raise(Errc::config_error, "duration_s must be > 0, got " + format_double(duration_s));
    if (rate_pps * duration_s > 1e8)
        raise(Errc::config_error, "rate_pps * duration_s exceeds the 1e8 packet trace cap");
}

uint64_t TrafficProfile::packet_count() const {
    return static_cast<uint64_t>(rate_pps * duration_s + 0.5);
}

void ChannelModel::validate() const {
    if (!(base_delay_us >= 0.0))
        raise(Errc::config_error, "base_delay_us must be >= 0");
    if (!(delay_jitter_us >= 0.0))
        raise(Errc::config_error, "delay_jitter_us must be >= 0");
    if (!(loss_rate >= 0.0 && loss_rate <= 1.0))
        raise(Errc::config_error, "loss_rate must be in [0, 1]");
}

ChannelSampler::ChannelSampler(const ChannelModel& model, BytesView seed) : model_(model) {
    model_.validate();
    if (seed.size() < 8) raise(Errc::config_error, "channel seed must be at least 8 bytes");
    rng_.seed(get_be64(seed.data()));
}

double ChannelSampler::uniform01() {
    // 53 uniform bits -> double in [0, 1)
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

ChannelSampler::Fate ChannelSampler::next() {
    double u_drop = uniform01();
    double u_jitter = uniform01();
    bool dropped = u_drop < model_.loss_rate;
    double delay_us =
        model_.base_delay_us + model_.delay_jitter_us * (2.0 * u_jitter - 1.0);
    auto delay_ns = static_cast<int64_t>(std::llround(delay_us * 1000.0));
    if (delay_ns < 0) delay_ns = 0;
    return {dropped, delay_ns};
}

}  // namespace pqofh
