#pragma once
#include <string>

#include "pqofh/channel.hpp"
#include "pqofh/ike_handshake.hpp"
#include "pqofh/kem.hpp"
#include "pqofh/trace.hpp"

namespace pqofh {

enum class Transport : uint8_t { in_process, udp_loopback };

Transport parse_transport(std::string_view name);  // "in-process" | "udp"
std::string transport_name(Transport t);

// One benchmark cell: suite selection, traffic, channel, and the seed that
// makes the whole run reproducible.
struct SessionSpec {
    std::string kem = "none";  // registry suite id, or "none" for classical-only
    EncrAlg encr = EncrAlg::aes128;
    PrfAlg integ = PrfAlg::hmac_sha256;
    TrafficProfile profile;
    ChannelModel channel;
    Bytes seed = Bytes(32, 0);
    const KemRegistry* registry = nullptr;
    Transport transport = Transport::in_process;

    void validate() const;
};

// Deterministic sequence-tagged payload: the receiver regenerates it from the
// tunnel sequence number and compares end to end.
Bytes session_payload(uint64_t seq, uint32_t size);

// DU-side and RU-side handshake configurations for a spec (shared PSK, split
// per-role seeds).
HandshakeConfig du_handshake_config(const SessionSpec& spec);
HandshakeConfig ru_handshake_config(const SessionSpec& spec);

// SPI for each tunnel direction, derived from the established keys.
uint32_t forward_spi(const KeySchedule& ks);
uint32_t reverse_spi(const KeySchedule& ks);

// Full DU<->RU session: handshake, SA install, constant-rate transmit,
// receive/verify, trace assembly. The in-process transport runs on a virtual
// clock (epoch 0, nominal send times); the UDP transport spawns a loopback RU
// thread and measures on the monotonic clock, normalized to the first send.
PacketTrace run_session(const SessionSpec& spec);

}  // namespace pqofh
