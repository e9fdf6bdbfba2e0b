#include "pqofh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "pqofh/common.hpp"
#include "pqofh/errors.hpp"
#include "pqofh/esp.hpp"

namespace pqofh {

double compute_throughput_mbps(const PacketTrace& trace) {
    if (trace.records.empty()) raise(Errc::empty_trace, "trace has no records");
    uint64_t payload_bytes = 0;
    int64_t last_recv = 0;
    bool any = false;
    for (const auto& r : trace.records) {
        if (!r.delivered()) continue;
        payload_bytes += r.wire_len >= kEspOverhead ? r.wire_len - kEspOverhead : 0;
        last_recv = std::max(last_recv, r.recv_ns);
        any = true;
    }
    if (!any) return 0.0;
    int64_t span_ns = last_recv - trace.records.front().send_ns;
    if (span_ns <= 0) return 0.0;
    // bits / ns = Gbit/s; scale to Mbit/s
    return static_cast<double>(payload_bytes) * 8.0 * 1000.0 / static_cast<double>(span_ns);
}

double compute_delay_ms(const PacketTrace& trace) {
    if (trace.records.empty()) raise(Errc::empty_trace, "trace has no records");
    double sum_ns = 0.0;
    uint64_t n = 0;
    for (const auto& r : trace.records) {
        if (!r.delivered()) continue;
        sum_ns += static_cast<double>(r.recv_ns - r.send_ns);
        ++n;
    }
    if (n == 0) raise(Errc::empty_trace, "no delivered packets");
    return sum_ns / static_cast<double>(n) / 1e6;
}

JitterResult compute_jitter(const PacketTrace& trace) {
    std::vector<double> transit_us;
    transit_us.reserve(trace.records.size());
    for (const auto& r : trace.records)
        if (r.delivered())
            transit_us.push_back(static_cast<double>(r.recv_ns - r.send_ns) / 1000.0);
    if (transit_us.size() < 2)
        raise(Errc::insufficient_data, "jitter needs at least 2 delivered packets");

    double j = 0.0;
    for (size_t i = 1; i < transit_us.size(); ++i) {
        double d = transit_us[i] - transit_us[i - 1];
        j += (std::fabs(d) - j) / 16.0;
    }

    double mean = 0.0;
    for (double t : transit_us) mean += t;
    mean /= static_cast<double>(transit_us.size());
    double ss = 0.0;
    for (double t : transit_us) ss += (t - mean) * (t - mean);
    double stddev = std::sqrt(ss / static_cast<double>(transit_us.size() - 1));
    return {j, stddev};
}

EncTimeResult measure_encryption_time(const PacketTrace& trace) {
    if (trace.records.empty()) raise(Errc::empty_trace, "trace has no records");
    std::vector<double> times;
    times.reserve(trace.records.size());
    double sum = 0.0;
    for (const auto& r : trace.records) {
        times.push_back(r.enc_time_us);
        sum += r.enc_time_us;
    }
    std::sort(times.begin(), times.end());
    size_t rank = static_cast<size_t>(
        std::ceil(0.99 * static_cast<double>(times.size())));  // nearest-rank, 1-based
    return {sum / static_cast<double>(times.size()), times[rank - 1]};
}

MetricsRow summarize_trace(const PacketTrace& trace, uint32_t run) {
    MetricsRow row;
    row.kem = trace.kem;
    row.encr = trace.encr;
    row.integ = trace.integ;
    row.run = run;
    row.throughput_mbps = compute_throughput_mbps(trace);
    if (trace.delivered_count() >= 1) row.delay_ms_mean = compute_delay_ms(trace);
    if (trace.delivered_count() >= 2) {
        JitterResult jr = compute_jitter(trace);
        row.jitter_rfc3550_us = jr.rfc3550_us;
        row.jitter_stddev_us = jr.stddev_us;
    }
    EncTimeResult et = measure_encryption_time(trace);
    row.enc_time_us_mean = et.mean_us;
    row.enc_time_us_p99 = et.p99_us;
    row.handshake_ms = trace.handshake_ms;
    row.handshake_bytes = trace.handshake_bytes;
    row.mem_bytes_peak = trace.mem_bytes_peak;
    row.rss_bytes_optional = trace.rss_bytes;
    return row;
}

const char* const kCsvHeader =
    "kem,encr,integ,run,status,throughput_mbps,delay_ms_mean,jitter_rfc3550_us,"
    "jitter_stddev_us,enc_time_us_mean,enc_time_us_p99,handshake_ms,handshake_bytes,"
    "mem_bytes_peak,rss_bytes_optional";

void write_csv_header(std::ostream& out) { out << kCsvHeader << "\n"; }

void write_csv(std::ostream& out, const MetricsRow& r) {
    out << r.kem << ',' << r.encr << ',' << r.integ << ',' << r.run << ',' << r.status << ','
        << format_double(r.throughput_mbps) << ',' << format_double(r.delay_ms_mean) << ','
        << format_double(r.jitter_rfc3550_us) << ',' << format_double(r.jitter_stddev_us) << ','
        << format_double(r.enc_time_us_mean) << ',' << format_double(r.enc_time_us_p99) << ','
        << format_double(r.handshake_ms) << ',' << r.handshake_bytes << ',' << r.mem_bytes_peak
        << ',' << r.rss_bytes_optional << "\n";
}

std::vector<MetricsRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::config_error, "cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) return {};  // fully empty file: no rows
    if (trim(line) != kCsvHeader)
        raise(Errc::config_error, "unexpected CSV header in " + path);
    std::vector<MetricsRow> rows;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 15)
            raise(Errc::config_error,
                  path + ":" + std::to_string(lineno) + ": expected 15 columns");
        MetricsRow r;
        r.kem = fields[0];
        r.encr = fields[1];
        r.integ = fields[2];
        r.run = static_cast<uint32_t>(std::stoul(fields[3]));
        r.status = fields[4];
        r.throughput_mbps = parse_double(fields[5]);
        r.delay_ms_mean = parse_double(fields[6]);
        r.jitter_rfc3550_us = parse_double(fields[7]);
        r.jitter_stddev_us = parse_double(fields[8]);
        r.enc_time_us_mean = parse_double(fields[9]);
        r.enc_time_us_p99 = parse_double(fields[10]);
        r.handshake_ms = parse_double(fields[11]);
        r.handshake_bytes = std::stoull(fields[12]);
        r.mem_bytes_peak = std::stoull(fields[13]);
        r.rss_bytes_optional = std::stoull(fields[14]);
        rows.push_back(std::move(r));
    }
    return rows;
}

double metric_value(const MetricsRow& r, const std::string& name) {
    if (name == "throughput_mbps") return r.throughput_mbps;
    if (name == "delay_ms_mean") return r.delay_ms_mean;
    if (name == "jitter_rfc3550_us") return r.jitter_rfc3550_us;
    if (name == "jitter_stddev_us") return r.jitter_stddev_us;
    if (name == "enc_time_us_mean") return r.enc_time_us_mean;
    if (name == "enc_time_us_p99") return r.enc_time_us_p99;
    if (name == "handshake_ms") return r.handshake_ms;
    if (name == "handshake_bytes") return static_cast<double>(r.handshake_bytes);
    if (name == "mem_bytes_peak") return static_cast<double>(r.mem_bytes_peak);
    if (name == "rss_bytes_optional") return static_cast<double>(r.rss_bytes_optional);
    raise(Errc::unknown_metric, "unknown metric '" + name + "'");
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {
        "throughput_mbps", "delay_ms_mean",    "jitter_rfc3550_us", "jitter_stddev_us",
        "enc_time_us_mean", "enc_time_us_p99", "handshake_ms",      "handshake_bytes",
        "mem_bytes_peak",   "rss_bytes_optional"};
    return names;
}

}  // namespace pqofh
