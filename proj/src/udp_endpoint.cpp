#include "pqofh/udp_endpoint.hpp"

#include <arpa/inet.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <thread>

#include "pqofh/errors.hpp"
#include "pqofh/esp.hpp"

namespace pqofh {

namespace {

constexpr int kRetransmitMs = 1000;
constexpr int kMaxAttempts = 3;
constexpr size_t kMaxDatagram = 65536 + 64;

enum : uint8_t { kCtlAck = 'A', kCtlFin = 'F', kCtlFinAck = 'G' };

bool is_control(BytesView data) {
    return data.size() >= 5 && get_be32(data.data()) == kUdpControlMagic;
}

Bytes control_frame(uint8_t type, uint64_t a, uint64_t b = 0) {
    Bytes out;
    put_be32(out, kUdpControlMagic);
    out.push_back(type);
    put_be64(out, a);
    if (type == kCtlAck) put_be64(out, b);
    return out;
}

}  // namespace

UdpSocket::UdpSocket() {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) raise(Errc::transport_unavailable, "socket(): " + std::string(strerror(errno)));
}

UdpSocket::~UdpSocket() {
    if (fd_ >= 0) ::close(fd_);
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

void UdpSocket::bind_loopback(uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        raise(Errc::transport_unavailable, "bind(): " + std::string(strerror(errno)));
}

uint16_t UdpSocket::local_port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
        raise(Errc::transport_unavailable, "getsockname(): " + std::string(strerror(errno)));
    return ntohs(addr.sin_port);
}

void UdpSocket::send_to(const sockaddr_in& addr, BytesView data) {
    ssize_t n = ::sendto(fd_, data.data(), data.size(), 0,
                         reinterpret_cast<const sockaddr*>(&addr), sizeof(addr));
    if (n != static_cast<ssize_t>(data.size()))
        raise(Errc::transport_unavailable, "sendto(): " + std::string(strerror(errno)));
}

std::optional<Bytes> UdpSocket::recv_from(sockaddr_in* from, int timeout_ms) {
    pollfd pfd{fd_, POLLIN, 0};
    int ready = ::poll(&pfd, 1, timeout_ms);
    if (ready < 0) raise(Errc::transport_unavailable, "poll(): " + std::string(strerror(errno)));
    if (ready == 0) return std::nullopt;
    Bytes buf(kMaxDatagram);
    sockaddr_in src{};
    socklen_t src_len = sizeof(src);
    ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&src),
                           &src_len);
    if (n < 0) raise(Errc::transport_unavailable, "recvfrom(): " + std::string(strerror(errno)));
    buf.resize(static_cast<size_t>(n));
    if (from) *from = src;
    return buf;
}

sockaddr_in parse_endpoint(const std::string& host_port) {
    auto colon = host_port.rfind(':');
    if (colon == std::string::npos)
        raise(Errc::config_error, "endpoint must be host:port, got '" + host_port + "'");
    std::string host = host_port.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(host_port.substr(colon + 1));
    } catch (const std::exception&) {
        port = -1;
    }
    if (port < 1 || port > 65535)
        raise(Errc::config_error, "invalid port in endpoint '" + host_port + "'");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(port));
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        raise(Errc::config_error, "invalid IPv4 address '" + host + "'");
    return addr;
}

RuSummary serve_ru_udp(const SessionSpec& spec, UdpSocket& sock) {
    spec.validate();
    HandshakeState state(ru_handshake_config(spec));
    sockaddr_in peer{};
    Bytes last_request, last_response;
    RuSummary summary;

    // Handshake: answer each request, resend the previous answer on a
    // retransmitted (byte-identical) request.
    const int64_t hs_deadline = steady_now_ns() + int64_t{60} * 1'000'000'000;
    int64_t hs_start = 0;
    while (!state.established()) {
        if (steady_now_ns() > hs_deadline)
            raise(Errc::handshake_failed, "timed out waiting for an initiator");
        auto got = sock.recv_from(&peer, 1000);
        if (!got) continue;
        if (is_control(*got)) continue;  // stale control datagram
        if (hs_start == 0) hs_start = steady_now_ns();
        if (*got == last_request && !last_response.empty()) {
            sock.send_to(peer, last_response);
            continue;
        }
        try {
            auto reply = state.on_message(Message::decode(*got));
            if (reply) {
                last_request = *got;
                last_response = reply->encode();
                sock.send_to(peer, last_response);
            }
        } catch (const Error& e) {
            if (e.code() == Errc::stale_message_id) continue;  // duplicate in flight
            throw;
        }
    }
    summary.handshake_ms = static_cast<double>(steady_now_ns() - hs_start) / 1e6;
    summary.handshake_bytes = state.bytes_sent() + state.bytes_received();

    SecurityAssociation rx(forward_spi(state.schedule()), spec.encr, spec.integ,
                           state.schedule().sk_ei, state.schedule().sk_ai);

    // Data: decrypt, verify, ACK with the local receive timestamp.
    const int64_t idle_ns =
        static_cast<int64_t>((spec.profile.duration_s + 10.0) * 1e9);
    int64_t last_activity = steady_now_ns();
    for (;;) {
        if (steady_now_ns() - last_activity > idle_ns)
            raise(Errc::transport_unavailable, "initiator went quiet before ending the session");
        sockaddr_in from{};
        auto got = sock.recv_from(&from, 500);
        if (!got) continue;
        last_activity = steady_now_ns();
        if (is_control(*got)) {
            if ((*got)[4] == kCtlFin) {
                Bytes fin_ack = control_frame(kCtlFinAck, summary.delivered);
                sock.send_to(from, fin_ack);
                // brief lingering so a lost FIN-ACK can be served again
                const int64_t linger_until = steady_now_ns() + 500'000'000;
                while (steady_now_ns() < linger_until) {
                    auto dup = sock.recv_from(&from, 100);
                    if (dup && is_control(*dup) && (*dup)[4] == kCtlFin)
                        sock.send_to(from, fin_ack);
                }
                return summary;
            }
            continue;
        }
        const int64_t recv_ns = steady_now_ns();
        try {
            Bytes payload = rx.unprotect(*got);
            ++summary.delivered;
            if (payload != session_payload(rx.last_accepted_seq(),
                                           static_cast<uint32_t>(payload.size())))
                ++summary.payload_mismatches;
            sock.send_to(from, control_frame(kCtlAck, rx.last_accepted_seq(),
                                             static_cast<uint64_t>(recv_ns)));
        } catch (const Error& e) {
            if (e.code() == Errc::replay_detected)
                ++summary.replay_rejected;
            // anything else: drop the datagram, keep serving
        }
    }
}

PacketTrace run_du_udp(const SessionSpec& spec, const sockaddr_in& peer) {
    spec.validate();
    UdpSocket sock;
    sock.bind_loopback(0);

    ByteLedger ledger;
    HandshakeState state(du_handshake_config(spec));
    state.set_ledger(&ledger);
    const int64_t hs_start = steady_now_ns();

    Bytes outgoing = state.start().encode();
    int attempts = 0;
    while (!state.established()) {
        if (attempts == kMaxAttempts)
            raise(Errc::handshake_failed,
                  "no response after " + std::to_string(kMaxAttempts) + " attempts");
        sock.send_to(peer, outgoing);
        ++attempts;
        auto got = sock.recv_from(nullptr, kRetransmitMs);
        if (!got) continue;  // retransmit the same request
        if (is_control(*got)) continue;
        try {
            auto next = state.on_message(Message::decode(*got));
            attempts = 0;
            if (next) outgoing = next->encode();
        } catch (const Error& e) {
            if (e.code() == Errc::stale_message_id) continue;  // duplicate response
            throw;
        }
    }
    const double handshake_ms = static_cast<double>(steady_now_ns() - hs_start) / 1e6;

    SecurityAssociation tx(forward_spi(state.schedule()), spec.encr, spec.integ,
                           state.schedule().sk_ei, state.schedule().sk_ai);
    SecurityAssociation rx(reverse_spi(state.schedule()), spec.encr, spec.integ,
                           state.schedule().sk_er, state.schedule().sk_ar);
    ledger.add(tx.state_bytes() + rx.state_bytes());

    PacketTrace trace;
    trace.kem = spec.kem;
    trace.encr = encr_name(spec.encr);
    trace.integ = prf_name(spec.integ);
    trace.handshake_ms = handshake_ms;
    trace.handshake_bytes = state.bytes_sent() + state.bytes_received();

    const uint64_t n = spec.profile.packet_count();
    trace.records.reserve(n);

    auto handle_ack = [&](BytesView data) {
        if (data.size() < 21 || data[4] != kCtlAck) return;
        const uint64_t seq = get_be64(data.data() + 5);
        const auto recv_ns = static_cast<int64_t>(get_be64(data.data() + 13));
        if (seq >= 1 && seq <= trace.records.size() && !trace.records[seq - 1].delivered())
            trace.records[seq - 1].recv_ns = recv_ns;
    };
    auto poll_control = [&](int timeout_ms) -> bool {
        auto got = sock.recv_from(nullptr, timeout_ms);
        if (!got) return false;
        if (is_control(*got)) handle_ack(*got);
        return true;
    };

    const int64_t epoch = steady_now_ns() + 2'000'000;  // small lead-in
    for (uint64_t i = 0; i < n; ++i) {
        const int64_t target = epoch + spec.profile.send_ns(i);
        for (;;) {
            const int64_t now = steady_now_ns();
            if (now >= target) break;
            const auto slack_ms = static_cast<int>((target - now) / 1'000'000);
            poll_control(slack_ms > 1 ? slack_ms - 1 : 0);
        }
        auto prot = tx.protect(session_payload(i + 1, spec.profile.packet_size));
        const int64_t send_ns = steady_now_ns();
        sock.send_to(peer, prot.wire);
        trace.records.push_back({i + 1, send_ns, kLostRecv,
                                 static_cast<uint32_t>(prot.wire.size()), prot.enc_time_us});
    }

    // Drain stragglers: stop after 300 ms of silence.
    while (poll_control(300)) {
    }

    // End-of-session barrier so the RU can stop serving.
    bool finished = false;
    for (int attempt = 0; attempt < kMaxAttempts && !finished; ++attempt) {
        sock.send_to(peer, control_frame(kCtlFin, n));
        const int64_t wait_until = steady_now_ns() + int64_t{kRetransmitMs} * 1'000'000;
        while (steady_now_ns() < wait_until) {
            auto got = sock.recv_from(nullptr, 100);
            if (!got || !is_control(*got)) continue;
            if ((*got)[4] == kCtlFinAck) {
                finished = true;
                break;
            }
            handle_ack(*got);
        }
    }
    if (!finished)
        raise(Errc::transport_unavailable, "peer did not acknowledge the end of the session");

    // Normalize to the first send so both transports share an epoch.
    if (!trace.records.empty()) {
        const int64_t base = trace.records.front().send_ns;
        for (auto& r : trace.records) {
            r.send_ns -= base;
            if (r.delivered()) r.recv_ns -= base;
        }
    }
    trace.mem_bytes_peak = ledger.peak();
    trace.rss_bytes = rss_high_water_bytes();
    return trace;
}

PacketTrace run_session_udp_loopback(const SessionSpec& spec) {
    spec.validate();
    UdpSocket ru_sock;
    ru_sock.bind_loopback(0);
    const uint16_t port = ru_sock.local_port();

    std::exception_ptr ru_error;
    std::thread ru([&] {
        try {
            serve_ru_udp(spec, ru_sock);
        } catch (...) {
            ru_error = std::current_exception();
        }
    });

    PacketTrace trace;
    std::exception_ptr du_error;
    try {
        trace = run_du_udp(spec, parse_endpoint("127.0.0.1:" + std::to_string(port)));
    } catch (...) {
        du_error = std::current_exception();
    }
    ru.join();
    if (du_error) std::rethrow_exception(du_error);
    if (ru_error) std::rethrow_exception(ru_error);
    return trace;
}

}  // namespace pqofh
