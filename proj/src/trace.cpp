#include "pqofh/trace.hpp"

#include <fstream>
#include <sstream>

#include "pqofh/common.hpp"
#include "pqofh/errors.hpp"

namespace pqofh {

uint64_t PacketTrace::delivered_count() const {
    uint64_t n = 0;
    for (const auto& r : records) n += r.delivered() ? 1 : 0;
    return n;
}

void write_trace(const std::string& path, const PacketTrace& trace) {
    std::ofstream out(path);
    if (!out) raise(Errc::config_error, "cannot open trace file for writing: " + path);
    out << "# kem=" << trace.kem << "\n";
    out << "# encr=" << trace.encr << "\n";
    out << "# integ=" << trace.integ << "\n";
    out << "# handshake_ms=" << format_double(trace.handshake_ms) << "\n";
    out << "# handshake_bytes=" << trace.handshake_bytes << "\n";
    out << "# mem_bytes_peak=" << trace.mem_bytes_peak << "\n";
    out << "# rss_bytes=" << trace.rss_bytes << "\n";
    for (const auto& r : trace.records) {
        out << r.seq << ' ' << r.send_ns << ' ';
        if (r.delivered())
            out << r.recv_ns;
        else
            out << "LOST";
        out << ' ' << r.wire_len << ' ' << format_double(r.enc_time_us) << "\n";
    }
    if (!out) raise(Errc::config_error, "short write to trace file: " + path);
}

static void apply_meta(PacketTrace& trace, const std::string& key, const std::string& value) {
    if (key == "kem")
        trace.kem = value;
    else if (key == "encr")
        trace.encr = value;
    else if (key == "integ")
        trace.integ = value;
    else if (key == "handshake_ms")
        trace.handshake_ms = parse_double(value);
    else if (key == "handshake_bytes")
        trace.handshake_bytes = std::stoull(value);
    else if (key == "mem_bytes_peak")
        trace.mem_bytes_peak = std::stoull(value);
    else if (key == "rss_bytes")
        trace.rss_bytes = std::stoull(value);
    else
        raise(Errc::config_error, "unknown trace metadata key '" + key + "'");
}

PacketTrace read_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::config_error, "cannot open trace file: " + path);
    PacketTrace trace;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::string body = trim(t.substr(1));
            auto eq = body.find('=');
            if (eq == std::string::npos)
                raise(Errc::config_error, path + ":" + std::to_string(lineno) +
                                              ": malformed metadata line");
            apply_meta(trace, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
            continue;
        }
        std::istringstream fields(t);
        std::string seq_s, send_s, recv_s, len_s, enc_s, extra;
        if (!(fields >> seq_s >> send_s >> recv_s >> len_s >> enc_s) || (fields >> extra))
            raise(Errc::config_error,
                  path + ":" + std::to_string(lineno) + ": expected 5 fields");
        PacketRecord r;
        r.seq = std::stoull(seq_s);
        r.send_ns = std::stoll(send_s);
        r.recv_ns = recv_s == "LOST" ? kLostRecv : std::stoll(recv_s);
        r.wire_len = static_cast<uint32_t>(std::stoul(len_s));
        r.enc_time_us = parse_double(enc_s);
        trace.records.push_back(r);
    }
    return trace;
}

}  // namespace pqofh
