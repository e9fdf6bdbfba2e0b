#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "pqofh/trace.hpp"

namespace pqofh {

// Application-payload throughput over the span from the first send to the
// last delivery. A trace where nothing arrived scores 0.
double compute_throughput_mbps(const PacketTrace& trace);

// Mean one-way delay over delivered packets, in milliseconds.
double compute_delay_ms(const PacketTrace& trace);

struct JitterResult {
    double rfc3550_us;  // J <- J + (|D| - J)/16 over successive deliveries
    double stddev_us;   // sample stddev of one-way delays
};
JitterResult compute_jitter(const PacketTrace& trace);

struct EncTimeResult {
    double mean_us;
    double p99_us;  // nearest-rank percentile
};
EncTimeResult measure_encryption_time(const PacketTrace& trace);

// One benchmark matrix cell. status is "ok" or an error tag; metric columns
// are zero for failed cells.
struct MetricsRow {
    std::string kem = "none";
    std::string encr;
    std::string integ;
    uint32_t run = 0;
    std::string status = "ok";
    double throughput_mbps = 0.0;
    double delay_ms_mean = 0.0;
    double jitter_rfc3550_us = 0.0;
    double jitter_stddev_us = 0.0;
    double enc_time_us_mean = 0.0;
    double enc_time_us_p99 = 0.0;
    double handshake_ms = 0.0;
    uint64_t handshake_bytes = 0;
    uint64_t mem_bytes_peak = 0;
    uint64_t rss_bytes_optional = 0;

    bool operator==(const MetricsRow&) const = default;
};

// All five estimators applied to one completed trace.
MetricsRow summarize_trace(const PacketTrace& trace, uint32_t run);

extern const char* const kCsvHeader;

void write_csv(std::ostream& out, const MetricsRow& row);
void write_csv_header(std::ostream& out);
std::vector<MetricsRow> read_csv(const std::string& path);

// Numeric metric columns addressable by name (plot-data selection).
double metric_value(const MetricsRow& row, const std::string& name);
const std::vector<std::string>& metric_names();

}  // namespace pqofh
