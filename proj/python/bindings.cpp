#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pqofh/errors.hpp"
#include "pqofh/esp.hpp"
#include "pqofh/matrix.hpp"
#include "pqofh/metrics.hpp"
#include "pqofh/session.hpp"

namespace py = pybind11;
using namespace pqofh;

namespace {

Bytes to_vec(const py::bytes& b) {
    std::string_view view = b;
    return Bytes(view.begin(), view.end());
}

py::bytes to_py(BytesView data) {
    return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

// Owning wrapper so Python controls the registry lifetime.
struct Registry {
    explicit Registry(const std::string& mock_config)
        : reg(KemRegistry::standard_from_file(mock_config)) {}
    KemRegistry reg;
};

py::dict row_to_dict(const MetricsRow& row) {
    py::dict d;
    d["kem"] = row.kem;
    d["encr"] = row.encr;
    d["integ"] = row.integ;
    d["run"] = row.run;
    d["status"] = row.status;
    d["throughput_mbps"] = row.throughput_mbps;
    d["delay_ms_mean"] = row.delay_ms_mean;
    d["jitter_rfc3550_us"] = row.jitter_rfc3550_us;
    d["jitter_stddev_us"] = row.jitter_stddev_us;
    d["enc_time_us_mean"] = row.enc_time_us_mean;
    d["enc_time_us_p99"] = row.enc_time_us_p99;
    d["handshake_ms"] = row.handshake_ms;
    d["handshake_bytes"] = row.handshake_bytes;
    d["mem_bytes_peak"] = row.mem_bytes_peak;
    d["rss_bytes_optional"] = row.rss_bytes_optional;
    return d;
}

}  // namespace

PYBIND11_MODULE(_pqofh, m) {
    m.doc() = "Hybrid post-quantum IKE handshake, ESP tunnel, and fronthaul benchmark core";

    py::register_exception<Error>(m, "Error");

    py::class_<Registry>(m, "Registry")
        .def(py::init<const std::string&>(), py::arg("mock_config"))
        .def("suites",
             [](const Registry& r) {
                 py::list out;
                 for (const KemProvider* p : r.reg.list()) {
                     py::dict d;
                     d["name"] = p->name();
                     d["public_key_len"] = p->params().public_key_len;
                     d["ciphertext_len"] = p->params().ciphertext_len;
                     d["shared_secret_len"] = p->params().shared_secret_len;
                     out.append(d);
                 }
                 return out;
             })
        .def("keygen",
             [](const Registry& r, const std::string& suite, const py::bytes& seed) {
                 KeyPair kp = r.reg.find(suite).keygen(to_vec(seed));
                 return py::make_tuple(to_py(kp.public_key), to_py(kp.secret_key));
             },
             py::arg("suite"), py::arg("seed"))
        .def("encapsulate",
             [](const Registry& r, const std::string& suite, const py::bytes& public_key,
                const py::bytes& seed) {
                 EncapsResult enc = r.reg.find(suite).encapsulate(to_vec(public_key),
                                                                  to_vec(seed));
                 return py::make_tuple(to_py(enc.ciphertext), to_py(enc.shared_secret));
             },
             py::arg("suite"), py::arg("public_key"), py::arg("seed"))
        .def("decapsulate",
             [](const Registry& r, const std::string& suite, const py::bytes& secret_key,
                const py::bytes& ciphertext) {
                 return to_py(r.reg.find(suite).decapsulate(to_vec(secret_key),
                                                            to_vec(ciphertext)));
             },
             py::arg("suite"), py::arg("secret_key"), py::arg("ciphertext"));

    m.def(
        "handshake",
        [](const Registry& registry, const std::vector<std::string>& kems,
           const std::string& encr, const std::string& integ, const py::bytes& seed,
           const std::optional<std::vector<std::string>>& responder_kems) {
            Proposal offer;
            offer.encr = parse_encr(encr);
            offer.integ_prf = parse_prf(integ);
            offer.addke = kems;

            const Bytes master = sha256(to_vec(seed));
            HandshakeConfig initiator;
            initiator.role = Role::initiator;
            initiator.proposals = {offer};
            initiator.psk = derive_seed(master, "handshake-psk");
            initiator.seed = derive_seed(master, "initiator");
            initiator.registry = &registry.reg;

            HandshakeConfig responder = initiator;
            responder.role = Role::responder;
            responder.seed = derive_seed(master, "responder");
            if (responder_kems) {
                Proposal policy = offer;
                policy.addke = *responder_kems;
                responder.proposals = {policy};
            }

            HandshakeOutcome outcome = run_handshake(initiator, responder);
            py::dict d;
            d["chosen"] = outcome.chosen.describe();
            d["schedules_match"] = outcome.initiator_schedule == outcome.responder_schedule;
            d["handshake_bytes"] = outcome.total_bytes;
            d["handshake_ms"] = outcome.wall_ms;
            d["ladder"] = outcome.ladder;
            d["sk_d"] = to_py(outcome.initiator_schedule.sk_d);
            return d;
        },
        py::arg("registry"), py::arg("kems") = std::vector<std::string>{},
        py::arg("encr") = "AES-128", py::arg("integ") = "SHA-256",
        py::arg("seed") = py::bytes(""), py::arg("responder_kems") = std::nullopt,
        "Run both handshake peers in-process and report the outcome");

    py::class_<SecurityAssociation>(m, "SecurityAssociation")
        .def(py::init([](uint32_t spi, const std::string& encr, const std::string& integ,
                         const py::bytes& sk_e, const py::bytes& sk_a) {
                 return SecurityAssociation(spi, parse_encr(encr), parse_prf(integ), to_vec(sk_e),
                                            to_vec(sk_a));
             }),
             py::arg("spi"), py::arg("encr"), py::arg("integ"), py::arg("sk_e"), py::arg("sk_a"))
        .def("protect",
             [](SecurityAssociation& sa, const py::bytes& plaintext) {
                 auto result = sa.protect(to_vec(plaintext));
                 return py::make_tuple(to_py(result.wire), result.enc_time_us);
             },
             py::arg("plaintext"), "Returns (wire_bytes, enc_time_us)")
        .def("unprotect",
             [](SecurityAssociation& sa, const py::bytes& wire) {
                 return to_py(sa.unprotect(to_vec(wire)));
             },
             py::arg("wire"))
        .def_property_readonly("spi", &SecurityAssociation::spi)
        .def_property_readonly("seq", &SecurityAssociation::seq);

    m.def(
        "run_session",
        [](const Registry& registry, const std::string& kem, const std::string& encr,
           const std::string& integ, uint32_t packet_size, double rate_pps, double duration_s,
           double base_delay_us, double delay_jitter_us, double loss_rate,
           const py::bytes& seed, const std::string& transport) {
            SessionSpec spec;
            spec.kem = kem;
            spec.encr = parse_encr(encr);
            spec.integ = parse_prf(integ);
            spec.profile = {packet_size, rate_pps, duration_s};
            spec.channel = {base_delay_us, delay_jitter_us, loss_rate};
            spec.seed = sha256(to_vec(seed));
            spec.registry = &registry.reg;
            spec.transport = parse_transport(transport);
            PacketTrace trace = run_session(spec);
            py::dict d = row_to_dict(summarize_trace(trace, 1));
            d["sent"] = trace.records.size();
            d["delivered"] = trace.delivered_count();
            return d;
        },
        py::arg("registry"), py::arg("kem") = "none", py::arg("encr") = "AES-128",
        py::arg("integ") = "SHA-256", py::arg("packet_size") = 1200,
        py::arg("rate_pps") = 10000.0, py::arg("duration_s") = 10.0,
        py::arg("base_delay_us") = 0.0, py::arg("delay_jitter_us") = 0.0,
        py::arg("loss_rate") = 0.0, py::arg("seed") = py::bytes(""),
        py::arg("transport") = "in-process",
        "Full DU<->RU tunnel session; returns the summarized metrics row plus counters");

    m.def("read_results_csv", [](const std::string& path) {
        py::list out;
        for (const auto& row : read_csv(path)) out.append(row_to_dict(row));
        return out;
    });

    m.attr("ESP_OVERHEAD") = static_cast<int>(kEspOverhead);
    m.attr("CSV_HEADER") = kCsvHeader;
}
