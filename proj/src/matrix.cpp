#include "pqofh/matrix.hpp"

#include <fstream>

#include "pqofh/errors.hpp"

namespace pqofh {

static std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    for (const auto& item : split(value, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

void load_profile_keys(const KvConfig& cfg, TrafficProfile& profile, ChannelModel& channel) {
    profile.packet_size = static_cast<uint32_t>(cfg.get_u64_or("packet_size", profile.packet_size));
    profile.rate_pps = cfg.get_double_or("rate_pps", profile.rate_pps);
    profile.duration_s = cfg.get_double_or("duration_s", profile.duration_s);
    channel.base_delay_us = cfg.get_double_or("base_delay_us", channel.base_delay_us);
    channel.delay_jitter_us = cfg.get_double_or("delay_jitter_us", channel.delay_jitter_us);
    channel.loss_rate = cfg.get_double_or("loss_rate", channel.loss_rate);
}

ExperimentSpec ExperimentSpec::from_config(const KvConfig& cfg) {
    cfg.require_known_keys({"kems", "encr", "integ", "repetitions", "transport", "packet_size",
                            "rate_pps", "duration_s", "base_delay_us", "delay_jitter_us",
                            "loss_rate"});
    ExperimentSpec spec;
    if (cfg.has("kems")) spec.kems = split_list(cfg.get("kems"));
    if (cfg.has("encr")) {
        spec.encrs.clear();
        for (const auto& name : split_list(cfg.get("encr"))) spec.encrs.push_back(parse_encr(name));
    }
    if (cfg.has("integ")) {
        spec.integs.clear();
        for (const auto& name : split_list(cfg.get("integ"))) spec.integs.push_back(parse_prf(name));
    }
    spec.repetitions = static_cast<uint32_t>(cfg.get_u64_or("repetitions", 1));
    spec.transport = parse_transport(cfg.get_or("transport", "in-process"));
    load_profile_keys(cfg, spec.profile, spec.channel);
    return spec;
}

void ExperimentSpec::validate(const KemRegistry& registry) const {
    if (kems.empty() || encrs.empty() || integs.empty())
        raise(Errc::config_error, "kem/encr/integ lists must be nonempty");
    if (repetitions < 1) raise(Errc::config_error, "repetitions must be >= 1");
    for (const auto& kem : kems)
        if (kem != "none") registry.find(kem);  // raises UnknownSuite
    profile.validate();
    channel.validate();
}

std::vector<MetricsRow> run_matrix(const ExperimentSpec& spec, const KemRegistry& registry,
                                   BytesView master_seed, const std::string& out_csv,
                                   const std::function<void(const MetricsRow&)>& progress) {
    spec.validate(registry);
    std::ofstream out(out_csv);
    if (!out) raise(Errc::config_error, "cannot open output CSV for writing: " + out_csv);
    write_csv_header(out);
    out.flush();

    std::vector<MetricsRow> rows;
    rows.reserve(spec.cell_count());
    for (const auto& kem : spec.kems) {
        for (EncrAlg encr : spec.encrs) {
            for (PrfAlg integ : spec.integs) {
                for (uint32_t run = 1; run <= spec.repetitions; ++run) {
                    SessionSpec cell;
                    cell.kem = kem;
                    cell.encr = encr;
                    cell.integ = integ;
                    cell.profile = spec.profile;
                    cell.channel = spec.channel;
                    cell.registry = &registry;
                    cell.transport = spec.transport;
                    cell.seed = derive_seed(
                        master_seed, "cell:" + kem + "/" + encr_name(encr) + "/" + prf_name(integ),
                        run);
                    MetricsRow row;
                    try {
                        row = summarize_trace(run_session(cell), run);
                    } catch (const Error& e) {
                        row = MetricsRow{};
                        row.kem = kem;
                        row.encr = encr_name(encr);
                        row.integ = prf_name(integ);
                        row.run = run;
                        row.status = errc_name(e.code());
                    }
                    write_csv(out, row);
                    out.flush();  // partial results survive an interrupted run
                    if (progress) progress(row);
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    if (!out) raise(Errc::config_error, "short write to output CSV: " + out_csv);
    return rows;
}

}  // namespace pqofh
