#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqofh/common.hpp"
#include "pqofh/crypto.hpp"

namespace pqofh {

// Handshake wire format. Not RFC 7296 bit-compatible; the layout is the
// minimal length-prefixed encoding the two endpoints (and the byte-accounting
// tests) agree on:
//
//   message  := [1: exchange_type] [4: be32 message_id] payload*
//   payload  := [1: payload_type] [4: be32 body_len] body
//
// payload bodies:
//   proposal_list  [1: count] proposal*
//   proposal       [1: encr] [1: integ_prf] [2: be16 ke_group]
//                  [1: addke_count] ([1: name_len] name)*
//   ke             [2: be16 group_id] [group-width public value]
//   nonce          32 bytes
//   notify         [2: be16 notify_type]
//   kem_public     raw public key bytes
//   kem_ciphertext raw ciphertext bytes
//   auth           PRF-output-length MAC

enum class ExchangeType : uint8_t { sa_init = 1, intermediate = 2, auth = 3 };
enum class PayloadType : uint8_t {
    proposal_list = 1,
    ke = 2,
    nonce = 3,
    notify = 4,
    kem_public = 5,
    kem_ciphertext = 6,
    auth = 7,
};

inline constexpr size_t kMessageHeaderLen = 5;
inline constexpr size_t kPayloadHeaderLen = 5;
inline constexpr uint16_t kNotifyIntermediateSupported = 16438;
inline constexpr size_t kNonceLen = 32;

const char* exchange_name(ExchangeType t);
const char* payload_name(PayloadType t);

struct Payload {
    PayloadType type;
    Bytes body;
};

struct Message {
    ExchangeType exchange_type = ExchangeType::sa_init;
    uint32_t message_id = 0;
    std::vector<Payload> payloads;

    Bytes encode() const;
    static Message decode(BytesView wire);  // ConfigError on malformed framing

    const Payload* find(PayloadType t) const;        // nullptr if absent
    const Payload& require(PayloadType t) const;     // ConfigError if absent
    std::string payload_type_list() const;           // "proposal_list,ke,nonce"
};

// One negotiable configuration: symmetric suite, classical group, and the
// ordered list of additional KEM suites (at most 7, no duplicates).
struct Proposal {
    EncrAlg encr = EncrAlg::aes128;
    PrfAlg integ_prf = PrfAlg::hmac_sha256;
    uint16_t ke_group = 14;
    std::vector<std::string> addke;

    void validate() const;
    bool operator==(const Proposal&) const = default;
    std::string describe() const;  // "AES-128/SHA-256/group14/addke=toy-lwe"
};

Bytes encode_proposal_list(const std::vector<Proposal>& proposals);
std::vector<Proposal> decode_proposal_list(BytesView body);

// First local proposal that an initiator offer matches exactly on all four
// fields (including the full addke sequence); NoProposalChosen otherwise.
Proposal select_proposal(const std::vector<Proposal>& offered,
                         const std::vector<Proposal>& local);

}  // namespace pqofh
