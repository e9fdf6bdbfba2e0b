#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace pqofh {

// recv_ns sentinel for packets that never arrived (channel drop or replay
// rejection at the receiver).
inline constexpr int64_t kLostRecv = -1;

struct PacketRecord {
    uint64_t seq = 0;       // tunnel sequence number, starts at 1
    int64_t send_ns = 0;    // monotonic, session epoch
    int64_t recv_ns = kLostRecv;
    uint32_t wire_len = 0;  // protected packet length on the wire
    double enc_time_us = 0.0;

    bool delivered() const { return recv_ns != kLostRecv; }
};

// One tunnel session: handshake summary plus per-packet observations in
// send order.
struct PacketTrace {
    std::string kem = "none";
    std::string encr;
    std::string integ;
    double handshake_ms = 0.0;
    uint64_t handshake_bytes = 0;
    uint64_t mem_bytes_peak = 0;
    uint64_t rss_bytes = 0;  // OS high-water probe, 0 when unavailable
    std::vector<PacketRecord> records;

    uint64_t delivered_count() const;
};

// Text dump: `# key=value` metadata lines followed by one record per line,
// space separated: seq send_ns recv_ns|LOST wire_len enc_time_us
void write_trace(const std::string& path, const PacketTrace& trace);
PacketTrace read_trace(const std::string& path);

}  // namespace pqofh
