#include "pqofh/ike_message.hpp"

#include <algorithm>

#include "pqofh/errors.hpp"

namespace pqofh {

const char* exchange_name(ExchangeType t) {
    switch (t) {
        case ExchangeType::sa_init: return "SA_INIT";
        case ExchangeType::intermediate: return "INTERMEDIATE";
        case ExchangeType::auth: return "AUTH";
    }
    return "?";
}

const char* payload_name(PayloadType t) {
    switch (t) {
        case PayloadType::proposal_list: return "proposal_list";
        case PayloadType::ke: return "ke";
        case PayloadType::nonce: return "nonce";
        case PayloadType::notify: return "notify";
        case PayloadType::kem_public: return "kem_public";
        case PayloadType::kem_ciphertext: return "kem_ciphertext";
        case PayloadType::auth: return "auth";
    }
    return "?";
}

Bytes Message::encode() const {
    Bytes out;
    out.push_back(static_cast<uint8_t>(exchange_type));
    put_be32(out, message_id);
    for (const Payload& p : payloads) {
        out.push_back(static_cast<uint8_t>(p.type));
        put_be32(out, static_cast<uint32_t>(p.body.size()));
        out.insert(out.end(), p.body.begin(), p.body.end());
    }
    return out;
}

Message Message::decode(BytesView wire) {
    if (wire.size() < kMessageHeaderLen)
        raise(Errc::config_error, "malformed message: truncated header");
    Message msg;
    const uint8_t et = wire[0];
    if (et < 1 || et > 3) raise(Errc::config_error, "malformed message: bad exchange type");
    msg.exchange_type = static_cast<ExchangeType>(et);
    msg.message_id = get_be32(wire.data() + 1);

    size_t pos = kMessageHeaderLen;
    while (pos < wire.size()) {
        if (wire.size() - pos < kPayloadHeaderLen)
            raise(Errc::config_error, "malformed message: truncated payload header");
        const uint8_t pt = wire[pos];
        if (pt < 1 || pt > 7) raise(Errc::config_error, "malformed message: bad payload type");
        const uint32_t len = get_be32(wire.data() + pos + 1);
        pos += kPayloadHeaderLen;
        if (wire.size() - pos < len)
            raise(Errc::config_error, "malformed message: payload body overruns message");
        Payload p;
        p.type = static_cast<PayloadType>(pt);
        p.body.assign(wire.begin() + pos, wire.begin() + pos + len);
        msg.payloads.push_back(std::move(p));
        pos += len;
    }
    return msg;
}

const Payload* Message::find(PayloadType t) const {
    for (const Payload& p : payloads)
        if (p.type == t) return &p;
    return nullptr;
}

const Payload& Message::require(PayloadType t) const {
    const Payload* p = find(t);
    if (!p)
        raise(Errc::config_error,
              std::string("malformed message: missing ") + payload_name(t) + " payload");
    return *p;
}

std::string Message::payload_type_list() const {
    std::string out;
    for (const Payload& p : payloads) {
        if (!out.empty()) out += ',';
        out += payload_name(p.type);
    }
    return out;
}

void Proposal::validate() const {
    if (addke.size() > 7) raise(Errc::config_error, "addke list exceeds 7 entries");
    for (size_t i = 0; i < addke.size(); ++i) {
        if (addke[i].empty() || addke[i].size() > 255)
            raise(Errc::config_error, "addke suite name length out of range");
        for (size_t j = i + 1; j < addke.size(); ++j)
            if (addke[i] == addke[j])
                raise(Errc::config_error, "duplicate addke suite " + addke[i]);
    }
}

std::string Proposal::describe() const {
    std::string out = encr_name(encr) + "/" + prf_name(integ_prf) + "/group" +
                      std::to_string(ke_group) + "/addke=";
    if (addke.empty()) out += "none";
    for (size_t i = 0; i < addke.size(); ++i) {
        if (i) out += ',';
        out += addke[i];
    }
    return out;
}

Bytes encode_proposal_list(const std::vector<Proposal>& proposals) {
    if (proposals.empty() || proposals.size() > 255)
        raise(Errc::config_error, "proposal list must hold 1..255 entries");
    Bytes out;
    out.push_back(static_cast<uint8_t>(proposals.size()));
    for (const Proposal& p : proposals) {
        p.validate();
        out.push_back(static_cast<uint8_t>(p.encr));
        out.push_back(static_cast<uint8_t>(p.integ_prf));
        put_be16(out, p.ke_group);
        out.push_back(static_cast<uint8_t>(p.addke.size()));
        for (const std::string& name : p.addke) {
            out.push_back(static_cast<uint8_t>(name.size()));
            out.insert(out.end(), name.begin(), name.end());
        }
    }
    return out;
}

std::vector<Proposal> decode_proposal_list(BytesView body) {
    size_t pos = 0;
    auto need = [&](size_t n) {
        if (body.size() - pos < n) raise(Errc::config_error, "malformed proposal list");
    };
    need(1);
    const uint8_t count = body[pos++];
    if (count == 0) raise(Errc::config_error, "empty proposal list");
    std::vector<Proposal> out;
    for (uint8_t i = 0; i < count; ++i) {
        need(5);
        Proposal p;
        const uint8_t encr = body[pos], prf = body[pos + 1];
        if (encr < 1 || encr > 3 || prf < 1 || prf > 3)
            raise(Errc::config_error, "malformed proposal: unknown algorithm code");
        p.encr = static_cast<EncrAlg>(encr);
        p.integ_prf = static_cast<PrfAlg>(prf);
        p.ke_group = get_be16(body.data() + pos + 2);
        const uint8_t naddke = body[pos + 4];
        pos += 5;
        for (uint8_t k = 0; k < naddke; ++k) {
            need(1);
            const uint8_t len = body[pos++];
            need(len);
            p.addke.emplace_back(body.begin() + pos, body.begin() + pos + len);
            pos += len;
        }
        p.validate();
        out.push_back(std::move(p));
    }
    if (pos != body.size()) raise(Errc::config_error, "malformed proposal list: trailing bytes");
    return out;
}

Proposal select_proposal(const std::vector<Proposal>& offered,
                         const std::vector<Proposal>& local) {
    for (const Proposal& mine : local)
        if (std::find(offered.begin(), offered.end(), mine) != offered.end()) return mine;
    raise(Errc::no_proposal_chosen, "no initiator offer matches local policy");
}

}  // namespace pqofh
