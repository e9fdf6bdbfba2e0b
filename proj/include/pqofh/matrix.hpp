#pragma once
#include <functional>
#include <string>
#include <vector>

#include "pqofh/kv_config.hpp"
#include "pqofh/metrics.hpp"
#include "pqofh/session.hpp"

namespace pqofh {

// The full benchmark grid: every (kem, cipher, hash) combination is run
// `repetitions` times, strictly sequentially.
struct ExperimentSpec {
    std::vector<std::string> kems{"none"};
    std::vector<EncrAlg> encrs{EncrAlg::aes128};
    std::vector<PrfAlg> integs{PrfAlg::hmac_sha256};
    uint32_t repetitions = 1;
    TrafficProfile profile;
    ChannelModel channel;
    Transport transport = Transport::in_process;

    static ExperimentSpec from_config(const KvConfig& cfg);
    void validate(const KemRegistry& registry) const;
    size_t cell_count() const {
        return kems.size() * encrs.size() * integs.size() * repetitions;
    }
};

// Runs the grid, appending one CSV row per cell to `out_csv` as soon as the
// cell finishes (failed cells get an error tag in the status column and the
// run continues). Also loads a traffic profile shared with the tunnel
// subcommand.
std::vector<MetricsRow> run_matrix(const ExperimentSpec& spec, const KemRegistry& registry,
                                   BytesView master_seed, const std::string& out_csv,
                                   const std::function<void(const MetricsRow&)>& progress = {});

// Profile-only config (tunnel endpoints): traffic + channel keys, same names
// as the matrix file.
void load_profile_keys(const KvConfig& cfg, TrafficProfile& profile, ChannelModel& channel);

}  // namespace pqofh
