#include "pqofh/session.hpp"

#include <queue>
#include <tuple>

#include "pqofh/errors.hpp"
#include "pqofh/esp.hpp"
#include "pqofh/udp_endpoint.hpp"

namespace pqofh {

Transport parse_transport(std::string_view name) {
    if (name == "in-process") return Transport::in_process;
    if (name == "udp") return Transport::udp_loopback;
    raise(Errc::config_error, "unknown transport '" + std::string(name) +
                                  "' (expected in-process or udp)");
}

std::string transport_name(Transport t) {
    return t == Transport::in_process ? "in-process" : "udp";
}

void SessionSpec::validate() const {
    profile.validate();
    channel.validate();
    if (!registry) raise(Errc::config_error, "session spec has no KEM registry");
    if (kem != "none") registry->find(kem);  // raises UnknownSuite
    if (seed.size() != 32) raise(Errc::config_error, "session seed must be 32 bytes");
}

Bytes session_payload(uint64_t seq, uint32_t size) {
    Bytes out(size);
    if (size >= 8)
        for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(seq >> (56 - 8 * i));
    for (uint32_t i = size >= 8 ? 8 : 0; i < size; ++i)
        out[i] = static_cast<uint8_t>(seq * 131 + i * 17);
    return out;
}

static Proposal session_proposal(const SessionSpec& spec) {
    Proposal p;
    p.encr = spec.encr;
    p.integ_prf = spec.integ;
    p.ke_group = 14;
    if (spec.kem != "none") p.addke = {spec.kem};
    return p;
}

HandshakeConfig du_handshake_config(const SessionSpec& spec) {
    HandshakeConfig cfg;
    cfg.role = Role::initiator;
    cfg.proposals = {session_proposal(spec)};
    cfg.psk = derive_seed(spec.seed, "session-psk");
    cfg.seed = derive_seed(spec.seed, "du-handshake");
    cfg.registry = spec.registry;
    return cfg;
}

HandshakeConfig ru_handshake_config(const SessionSpec& spec) {
    HandshakeConfig cfg = du_handshake_config(spec);
    cfg.role = Role::responder;
    cfg.seed = derive_seed(spec.seed, "ru-handshake");
    return cfg;
}

static uint32_t derive_spi(const KeySchedule& ks, std::string_view label) {
    Bytes h = sha256(concat(ks.sk_d, as_view(label)));
    uint32_t spi = get_be32(h.data());
    if (spi == kUdpControlMagic) spi ^= 1;  // keep control datagrams unambiguous
    return spi;
}

uint32_t forward_spi(const KeySchedule& ks) { return derive_spi(ks, "spi-forward"); }
uint32_t reverse_spi(const KeySchedule& ks) { return derive_spi(ks, "spi-reverse"); }

namespace {

// DU-to-RU and RU-to-DU SAs for one endpoint's schedule.
struct SaSet {
    SecurityAssociation forward;  // sk_ei/sk_ai
    SecurityAssociation reverse;  // sk_er/sk_ar
};

SaSet make_sa_set(const SessionSpec& spec, const KeySchedule& ks) {
    return {SecurityAssociation(forward_spi(ks), spec.encr, spec.integ, ks.sk_ei, ks.sk_ai),
            SecurityAssociation(reverse_spi(ks), spec.encr, spec.integ, ks.sk_er, ks.sk_ar)};
}

PacketTrace run_session_in_process(const SessionSpec& spec) {
    ByteLedger ledger;
    HandshakeOutcome hs =
        run_handshake(du_handshake_config(spec), ru_handshake_config(spec), &ledger);

    SaSet du = make_sa_set(spec, hs.initiator_schedule);
    SaSet ru = make_sa_set(spec, hs.responder_schedule);
    ledger.add(du.forward.state_bytes() + du.reverse.state_bytes() + ru.forward.state_bytes() +
               ru.reverse.state_bytes());

    PacketTrace trace;
    trace.kem = spec.kem;
    trace.encr = encr_name(spec.encr);
    trace.integ = prf_name(spec.integ);
    trace.handshake_ms = hs.wall_ms;
    trace.handshake_bytes = hs.total_bytes;
    const size_t post_handshake_peak = ledger.peak();

    ChannelSampler forward(spec.channel, derive_seed(spec.seed, "channel-forward"));
    const uint64_t n = spec.profile.packet_count();
    trace.records.reserve(n);

    // Virtual clock: packet i leaves at its nominal send time; in-flight
    // packets are delivered (in arrival order) before later sends, so the
    // receiver sees the same interleaving a real link would produce.
    using Arrival = std::tuple<int64_t, uint64_t, Bytes>;  // recv_ns, index, wire
    std::priority_queue<Arrival, std::vector<Arrival>, std::greater<Arrival>> inflight;

    auto deliver = [&](const Arrival& a) {
        const auto& [recv_ns, index, wire] = a;
        try {
            Bytes payload = ru.forward.unprotect(wire);
            if (payload != session_payload(ru.forward.last_accepted_seq(),
                                           static_cast<uint32_t>(payload.size())))
                raise(Errc::icv_mismatch, "delivered payload does not match what was sent");
            trace.records[index].recv_ns = recv_ns;
        } catch (const Error& e) {
            if (e.code() != Errc::replay_detected) throw;  // recorded as lost
        }
    };

    uint64_t mem_peak = post_handshake_peak;
    for (uint64_t i = 0; i < n; ++i) {
        const int64_t send_ns = spec.profile.send_ns(i);
        while (!inflight.empty() && std::get<0>(inflight.top()) <= send_ns) {
            deliver(inflight.top());
            inflight.pop();
        }
        auto prot = du.forward.protect(session_payload(i + 1, spec.profile.packet_size));
        trace.records.push_back({i + 1, send_ns, kLostRecv,
                                 static_cast<uint32_t>(prot.wire.size()), prot.enc_time_us});
        ChannelSampler::Fate fate = forward.next();
        if (!fate.dropped) inflight.emplace(send_ns + fate.delay_ns, i, std::move(prot.wire));
        if ((i + 1) % 1000 == 0) mem_peak = std::max<uint64_t>(mem_peak, ledger.peak());
    }
    while (!inflight.empty()) {
        deliver(inflight.top());
        inflight.pop();
    }

    trace.mem_bytes_peak = std::max<uint64_t>(mem_peak, ledger.peak());
    trace.rss_bytes = rss_high_water_bytes();
    return trace;
}

}  // namespace

PacketTrace run_session(const SessionSpec& spec) {
    spec.validate();
    if (spec.transport == Transport::in_process) return run_session_in_process(spec);
    return run_session_udp_loopback(spec);
}

}  // namespace pqofh
