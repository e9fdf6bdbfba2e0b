#pragma once
#include <netinet/in.h>

#include <optional>
#include <string>

#include "pqofh/common.hpp"
#include "pqofh/session.hpp"

namespace pqofh {

// Control datagrams (ACK/FIN/FIN-ACK) start with this magic; handshake
// messages and protected packets never do (SPIs that would collide are
// remapped at derivation time).
inline constexpr uint32_t kUdpControlMagic = 0x50514F46;  // "PQOF"

// Minimal RAII UDP socket with poll-based receive timeouts.
class UdpSocket {
public:
    UdpSocket();
    ~UdpSocket();
    UdpSocket(UdpSocket&& other) noexcept;
    UdpSocket& operator=(UdpSocket&&) = delete;
    UdpSocket(const UdpSocket&) = delete;

    void bind_loopback(uint16_t port);  // 0 picks an ephemeral port
    uint16_t local_port() const;

    void send_to(const sockaddr_in& addr, BytesView data);
    // nullopt on timeout; timeout_ms 0 polls without blocking
    std::optional<Bytes> recv_from(sockaddr_in* from, int timeout_ms);

private:
    int fd_ = -1;
};

sockaddr_in parse_endpoint(const std::string& host_port);  // "127.0.0.1:9000"

// RU endpoint: serves exactly one handshake + data session on the given
// socket, ACKing every delivered packet with its receive timestamp.
struct RuSummary {
    uint64_t delivered = 0;
    uint64_t replay_rejected = 0;
    uint64_t payload_mismatches = 0;
    double handshake_ms = 0.0;
    uint64_t handshake_bytes = 0;
};
RuSummary serve_ru_udp(const SessionSpec& spec, UdpSocket& sock);

// DU endpoint: drives the handshake (1 s retransmit, 3 attempts) and the
// paced data phase against a remote RU; returns the completed trace.
PacketTrace run_du_udp(const SessionSpec& spec, const sockaddr_in& peer);

// Bench helper: RU thread on an ephemeral loopback port, DU in the calling
// thread.
PacketTrace run_session_udp_loopback(const SessionSpec& spec);

}  // namespace pqofh
