#include <cstdlib>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "pqofh/errors.hpp"
#include "pqofh/matrix.hpp"
#include "pqofh/metrics.hpp"
#include "pqofh/session.hpp"
#include "pqofh/trace.hpp"
#include "pqofh/udp_endpoint.hpp"

using namespace pqofh;

namespace {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitHandshake = 3,
    kExitTransport = 4,
    kExitAllCellsFailed = 5,
};

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::no_proposal_chosen:
        case Errc::auth_failure:
        case Errc::handshake_failed:
        case Errc::kem_failure:
            return kExitHandshake;
        case Errc::transport_unavailable:
            return kExitTransport;
        default:
            return kExitUsage;
    }
}

std::string default_config_dir() {
    if (const char* dir = std::getenv("PQOFH_CONFIG_DIR")) return dir;
    return "configs";
}

// Any seed string works; it is stretched to the 32-byte master seed.
Bytes master_seed(const std::string& seed_text) {
    return sha256(as_view("pqofh-seed:" + seed_text));
}

std::string default_seed_text() {
    if (const char* env = std::getenv("PQOFH_SEED")) return env;
    return "0";
}

std::vector<std::string> parse_kem_list(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& item : split(text, ',')) {
        std::string t = trim(item);
        if (!t.empty() && t != "none") out.push_back(t);
    }
    return out;
}

std::string short_fingerprint(BytesView data) { return to_hex(sha256(data)).substr(0, 16); }

struct SuiteFlags {
    std::string kems = "none";
    std::string encr = "AES-128";
    std::string integ = "SHA-256";
};

void add_suite_flags(CLI::App* cmd, SuiteFlags& flags) {
    cmd->add_option("--kems", flags.kems,
                    "comma-separated additional KEM suites, or 'none' (default none)");
    cmd->add_option("--encr", flags.encr, "encryption algorithm (default AES-128)");
    cmd->add_option("--integ", flags.integ, "integrity/PRF algorithm (default SHA-256)");
}

int cmd_suites(const KemRegistry& registry, const std::string& format) {
    if (format == "csv") {
        std::cout << "suite,public_key_len,ciphertext_len,shared_secret_len,encaps_cost_us\n";
        for (const KemProvider* p : registry.list())
            std::cout << p->name() << ',' << p->params().public_key_len << ','
                      << p->params().ciphertext_len << ',' << p->params().shared_secret_len << ','
                      << p->params().encaps_cost_us << "\n";
        return kExitOk;
    }
    std::cout << "suite          public_key  ciphertext  shared_secret  encaps_cost_us\n";
    for (const KemProvider* p : registry.list()) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-14s %10zu  %10zu  %13zu  %14u", p->name().c_str(),
                      p->params().public_key_len, p->params().ciphertext_len,
                      p->params().shared_secret_len, p->params().encaps_cost_us);
        std::cout << line << "\n";
    }
    return kExitOk;
}

int cmd_handshake(const KemRegistry& registry, const SuiteFlags& flags,
                  const std::string& responder_kems, const std::string& responder_psk,
                  const std::string& seed_text, bool verbose) {
    Proposal offer;
    offer.encr = parse_encr(flags.encr);
    offer.integ_prf = parse_prf(flags.integ);
    offer.addke = parse_kem_list(flags.kems);

    const Bytes seed = master_seed(seed_text);
    HandshakeConfig initiator;
    initiator.role = Role::initiator;
    initiator.proposals = {offer};
    initiator.psk = derive_seed(seed, "handshake-psk");
    initiator.seed = derive_seed(seed, "initiator");
    initiator.registry = &registry;

    HandshakeConfig responder = initiator;
    responder.role = Role::responder;
    responder.seed = derive_seed(seed, "responder");
    if (!responder_kems.empty()) {
        Proposal policy = offer;
        policy.addke = parse_kem_list(responder_kems);
        responder.proposals = {policy};
    }
    if (!responder_psk.empty()) responder.psk = sha256(as_view(responder_psk));

    HandshakeOutcome outcome = run_handshake(initiator, responder);
    for (const auto& line : outcome.ladder) std::cout << line << "\n";
    std::cout << "negotiated: " << outcome.chosen.describe() << "\n";
    std::cout << "handshake_bytes: " << outcome.total_bytes << "\n";
    std::cout << "handshake_ms: " << format_double(outcome.wall_ms) << "\n";
    std::cout << "initiator sk_d fingerprint: " << short_fingerprint(outcome.initiator_schedule.sk_d)
              << "\n";
    std::cout << "responder sk_d fingerprint: " << short_fingerprint(outcome.responder_schedule.sk_d)
              << "\n";
    const bool match = outcome.initiator_schedule == outcome.responder_schedule;
    std::cout << "key schedules " << (match ? "match" : "DIFFER") << "\n";
    if (verbose) {
        std::cout << "ni: " << to_hex(outcome.ni) << "\n";
        std::cout << "nr: " << to_hex(outcome.nr) << "\n";
        std::cout << "sk_ei fingerprint: " << short_fingerprint(outcome.initiator_schedule.sk_ei)
                  << "\n";
        std::cout << "sk_er fingerprint: " << short_fingerprint(outcome.initiator_schedule.sk_er)
                  << "\n";
    }
    return match ? kExitOk : kExitHandshake;
}

int cmd_bench(const KemRegistry& registry, const std::string& matrix_path,
              const std::string& out_path, const std::string& transport,
              const std::string& seed_text) {
    ExperimentSpec spec = ExperimentSpec::from_config(KvConfig::load(matrix_path));
    if (!transport.empty()) spec.transport = parse_transport(transport);
    const size_t total = spec.cell_count();
    size_t done = 0, failed = 0;
    auto rows = run_matrix(spec, registry, master_seed(seed_text), out_path,
                           [&](const MetricsRow& row) {
                               ++done;
                               failed += row.status == "ok" ? 0 : 1;
                               std::cout << "[" << done << "/" << total << "] " << row.kem << " "
                                         << row.encr << " " << row.integ << " run " << row.run
                                         << " " << row.status;
                               if (row.status == "ok")
                                   std::cout << " throughput="
                                             << format_double(row.throughput_mbps) << "Mbps";
                               std::cout << "\n"
                                         << std::flush;
                           });
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    if (!rows.empty() && failed == rows.size()) {
        std::cerr << "error: every cell failed\n";
        return kExitAllCellsFailed;
    }
    return kExitOk;
}

int cmd_tunnel(const KemRegistry& registry, const std::string& role, const std::string& peer,
               uint16_t listen_port, const std::string& profile_path, const SuiteFlags& flags,
               const std::string& seed_text, const std::string& out_path) {
    SessionSpec spec;
    auto kems = parse_kem_list(flags.kems);
    if (kems.size() > 1)
        raise(Errc::config_error, "the tunnel uses at most one additional KEM suite");
    if (!kems.empty()) spec.kem = kems[0];
    spec.encr = parse_encr(flags.encr);
    spec.integ = parse_prf(flags.integ);
    spec.seed = master_seed(seed_text);
    spec.registry = &registry;
    spec.transport = Transport::udp_loopback;
    if (!profile_path.empty())
        load_profile_keys(KvConfig::load(profile_path), spec.profile, spec.channel);
    spec.profile.validate();

    if (role == "ru") {
        UdpSocket sock;
        sock.bind_loopback(listen_port);
        std::cout << "listening on 127.0.0.1:" << sock.local_port() << "\n" << std::flush;
        RuSummary summary = serve_ru_udp(spec, sock);
        std::cout << "delivered: " << summary.delivered << "\n";
        std::cout << "replay_rejected: " << summary.replay_rejected << "\n";
        std::cout << "payload_mismatches: " << summary.payload_mismatches << "\n";
        std::cout << "handshake_bytes: " << summary.handshake_bytes << "\n";
        return summary.payload_mismatches == 0 ? kExitOk : kExitTransport;
    }

    PacketTrace trace = run_du_udp(spec, parse_endpoint(peer));
    if (!out_path.empty()) write_trace(out_path, trace);
    std::cout << "sent: " << trace.records.size() << "\n";
    std::cout << "delivered: " << trace.delivered_count() << "\n";
    std::cout << "handshake_bytes: " << trace.handshake_bytes << "\n";
    if (trace.delivered_count() > 0)
        std::cout << "delay_ms_mean: " << format_double(compute_delay_ms(trace)) << "\n";
    if (!out_path.empty()) std::cout << "trace: " << out_path << "\n";
    return kExitOk;
}

int cmd_plotdata(const std::string& in_path, const std::string& metric) {
    auto rows = read_csv(in_path);
    bool known = false;
    for (const auto& name : metric_names()) known = known || name == metric;
    if (!known) raise(Errc::unknown_metric, "unknown metric '" + metric + "'");

    // Grouped for plotting: one block per cipher/hash pair (cipher then hash,
    // ascending key/digest size), one line per KEM (alphabetical), value
    // averaged over that cell's successful runs.
    const std::vector<std::string> encr_order = {"AES-128", "AES-192", "AES-256"};
    const std::vector<std::string> integ_order = {"SHA-256", "SHA-384", "SHA-512"};
    for (const auto& encr : encr_order) {
        for (const auto& integ : integ_order) {
            std::map<std::string, std::pair<double, unsigned>> series;  // kem -> (sum, count)
            for (const auto& row : rows) {
                if (row.encr != encr || row.integ != integ || row.status != "ok") continue;
                auto& acc = series[row.kem];
                acc.first += metric_value(row, metric);
                acc.second += 1;
            }
            if (series.empty()) continue;
            std::cout << "# encr=" << encr << " integ=" << integ << "\n";
            for (const auto& [kem, acc] : series)
                std::cout << kem << " " << format_double(acc.first / acc.second) << "\n";
            std::cout << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid post-quantum IKE + ESP tunnel benchmark for Open Fronthaul-style "
                 "traffic"};
    app.require_subcommand(1);

    std::string mock_config = default_config_dir() + "/mock_kems.conf";
    std::string seed_text = default_seed_text();
    app.add_option("--mock-config", mock_config,
                   "mock KEM size profile file (default $PQOFH_CONFIG_DIR/mock_kems.conf)");
    app.add_option("--seed", seed_text, "seed string (default $PQOFH_SEED or '0')");

    auto* suites = app.add_subcommand("suites", "list registered KEM suites and wire sizes");
    std::string format = "table";
    suites->add_option("--format", format, "table or csv")
        ->check(CLI::IsMember({"table", "csv"}));

    auto* handshake =
        app.add_subcommand("handshake", "run both handshake peers in-process and show the ladder");
    SuiteFlags hs_flags;
    add_suite_flags(handshake, hs_flags);
    bool verbose = false;
    std::string responder_kems, responder_psk;
    handshake->add_flag("--verbose", verbose, "print nonces and per-direction key fingerprints");
    handshake->add_option("--responder-kems", responder_kems,
                          "responder policy differing from the offer (negotiation-failure fixture)");
    handshake->add_option("--responder-psk", responder_psk,
                          "responder PSK differing from the initiator (auth-failure fixture)");

    auto* bench = app.add_subcommand("bench", "run the benchmark matrix and write CSV results");
    std::string matrix_path = default_config_dir() + "/paper_matrix.conf";
    std::string bench_out = "results.csv";
    std::string transport;
    bench->add_option("--matrix", matrix_path, "matrix config file");
    bench->add_option("--out", bench_out, "output CSV path");
    bench->add_option("--transport", transport, "in-process or udp (overrides the matrix file)");

    auto* tunnel = app.add_subcommand("tunnel", "run one UDP tunnel endpoint");
    std::string role, peer, profile_path, tunnel_out;
    uint16_t listen_port = 0;
    SuiteFlags tn_flags;
    tunnel->add_option("--role", role, "du (drives traffic) or ru (receives)")
        ->required()
        ->check(CLI::IsMember({"du", "ru"}));
    tunnel->add_option("--peer", peer, "RU address as host:port (du role)");
    tunnel->add_option("--listen", listen_port, "UDP port to bind (ru role, 0 = ephemeral)");
    tunnel->add_option("--profile", profile_path, "traffic profile config file");
    tunnel->add_option("--out", tunnel_out, "write the DU-side trace to this file");
    add_suite_flags(tunnel, tn_flags);

    auto* plotdata =
        app.add_subcommand("plotdata", "regroup a results CSV into plot-ready columns");
    std::string plot_in, metric = "throughput_mbps";
    plotdata->add_option("--in", plot_in, "input CSV file")->required();
    plotdata->add_option("--metric", metric, "metric column to extract");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message/help text
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*plotdata) return cmd_plotdata(plot_in, metric);  // no registry needed
        KemRegistry registry = KemRegistry::standard_from_file(mock_config);
        if (*suites) return cmd_suites(registry, format);
        if (*handshake)
            return cmd_handshake(registry, hs_flags, responder_kems, responder_psk, seed_text,
                                 verbose);
        if (*bench) return cmd_bench(registry, matrix_path, bench_out, transport, seed_text);
        if (*tunnel) {
            if (role == "du" && peer.empty())
                raise(Errc::config_error, "--peer is required for the du role");
            return cmd_tunnel(registry, role, peer, listen_port, profile_path, tn_flags,
                              seed_text, tunnel_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";  // what() already carries the tag
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
