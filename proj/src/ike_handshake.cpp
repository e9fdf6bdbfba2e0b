#include "pqofh/ike_handshake.hpp"

#include <algorithm>

#include "pqofh/dh.hpp"
#include "pqofh/errors.hpp"

namespace pqofh {

Bytes initial_chain_key(PrfAlg prf, BytesView ni, BytesView nr, BytesView classical_secret) {
    return hmac(prf, concat(ni, nr), classical_secret);
}

Bytes combine_keys(PrfAlg prf, BytesView chain_key, BytesView round_secret, BytesView ni,
                   BytesView nr) {
    return hmac(prf, chain_key, concat(round_secret, ni, nr));
}

Bytes combine_chain(PrfAlg prf, BytesView classical_secret,
                    const std::vector<Bytes>& round_secrets, BytesView ni, BytesView nr) {
    Bytes k = initial_chain_key(prf, ni, nr, classical_secret);
    for (const Bytes& s : round_secrets) k = combine_keys(prf, k, s, ni, nr);
    return k;
}

KeySchedule derive_key_schedule(PrfAlg prf, EncrAlg encr, BytesView final_key, BytesView ni,
                                BytesView nr) {
    const size_t prf_len = prf_output_len(prf);
    const size_t encr_len = encr_key_len(encr);
    const size_t need = 32 + 2 * prf_len + 2 * encr_len;

    const Bytes ninr = concat(ni, nr);
    Bytes stream, t;
    uint8_t counter = 1;
    while (stream.size() < need) {
        Bytes data = t;
        data.insert(data.end(), ninr.begin(), ninr.end());
        data.push_back(counter++);
        t = hmac(prf, final_key, data);
        stream.insert(stream.end(), t.begin(), t.end());
    }

    auto cut = [&stream, pos = size_t(0)](size_t len) mutable {
        Bytes out(stream.begin() + pos, stream.begin() + pos + len);
        pos += len;
        return out;
    };
    KeySchedule ks;
    ks.sk_d = cut(32);
    ks.sk_ai = cut(prf_len);
    ks.sk_ar = cut(prf_len);
    ks.sk_ei = cut(encr_len);
    ks.sk_er = cut(encr_len);
    return ks;
}

HandshakeState::HandshakeState(HandshakeConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.registry) raise(Errc::config_error, "handshake requires a KEM registry");
    if (cfg_.proposals.empty()) raise(Errc::config_error, "at least one proposal required");
    for (const Proposal& p : cfg_.proposals) {
        p.validate();
        dh_group(p.ke_group);  // raises on unknown group
        for (const std::string& suite : p.addke)
            if (!cfg_.registry->contains(suite)) raise(Errc::unknown_suite, "KEM " + suite);
    }
    if (cfg_.role == Role::initiator) {
        for (const Proposal& p : cfg_.proposals)
            if (p.ke_group != cfg_.proposals.front().ke_group)
                raise(Errc::config_error, "all offered proposals must share a classical group");
        phase_ = Phase::idle;
    } else {
        phase_ = Phase::wait_sa_init_request;
    }
}

const Proposal& HandshakeState::chosen() const {
    if (phase_ == Phase::idle || phase_ == Phase::wait_sa_init_request ||
        phase_ == Phase::wait_sa_init_response || phase_ == Phase::failed)
        raise(Errc::handshake_failed, "no proposal negotiated yet");
    return chosen_;
}

const KeySchedule& HandshakeState::schedule() const {
    if (phase_ != Phase::established) raise(Errc::handshake_failed, "handshake not established");
    return schedule_;
}

Bytes HandshakeState::subseed(const char* label, uint32_t index) const {
    return derive_seed(cfg_.seed, label, index);
}

void HandshakeState::account(size_t transient) {
    if (!ledger_) return;
    ledger_->add(transient);
    ledger_held_ += transient;
}

void HandshakeState::absorb(const Bytes& wire) { transcript_ = sha256(concat(transcript_, wire)); }

Bytes HandshakeState::auth_tag(char role_tag) const {
    Bytes data = transcript_;
    data.push_back(static_cast<uint8_t>(role_tag));
    return hmac(chosen_.integ_prf, cfg_.psk, data);
}

Message HandshakeState::emit(Message msg) {
    const Bytes wire = msg.encode();
    bytes_sent_ += wire.size();
    absorb(wire);
    account(wire.size());
    if (sink_) {
        std::string line = cfg_.role == Role::initiator ? "I>R" : "R>I";
        line += " " + std::to_string(msg.message_id) + " " + exchange_name(msg.exchange_type) +
                " " + msg.payload_type_list() + " " + std::to_string(wire.size());
        sink_->push_back(std::move(line));
    }
    return msg;
}

Message HandshakeState::start() {
    try {
        if (cfg_.role != Role::initiator || phase_ != Phase::idle)
            raise(Errc::unexpected_exchange, "start() is an initiator-only entry point");
        return make_sa_init_request();
    } catch (...) {
        phase_ = Phase::failed;
        throw;
    }
}

Message HandshakeState::make_sa_init_request() {
    ni_ = subseed("nonce");
    const DhGroup& group = dh_group(cfg_.proposals.front().ke_group);
    DhKeyPair kp = dh_keygen(group, subseed("ke"));
    dh_private_ = kp.private_exponent;
    account(kp.private_exponent.size() + kp.public_value.size());

    Message msg;
    msg.exchange_type = ExchangeType::sa_init;
    msg.message_id = next_request_id_++;
    msg.payloads.push_back({PayloadType::proposal_list, encode_proposal_list(cfg_.proposals)});
    Bytes ke_body;
    put_be16(ke_body, group.id);
    ke_body.insert(ke_body.end(), kp.public_value.begin(), kp.public_value.end());
    msg.payloads.push_back({PayloadType::ke, std::move(ke_body)});
    msg.payloads.push_back({PayloadType::nonce, ni_});
    const bool any_addke = std::any_of(cfg_.proposals.begin(), cfg_.proposals.end(),
                                       [](const Proposal& p) { return !p.addke.empty(); });
    if (any_addke) {
        Bytes body;
        put_be16(body, kNotifyIntermediateSupported);
        msg.payloads.push_back({PayloadType::notify, std::move(body)});
    }
    phase_ = Phase::wait_sa_init_response;
    return emit(std::move(msg));
}

void HandshakeState::check_request_id(const Message& msg) {
    const uint32_t expected =
        cfg_.role == Role::responder ? next_request_id_ : next_request_id_ - 1;
    if (msg.message_id != expected)
        raise(Errc::stale_message_id, "expected message id " + std::to_string(expected) +
                                          ", got " + std::to_string(msg.message_id));
}

std::optional<Message> HandshakeState::on_message(const Message& incoming) {
    try {
        bytes_received_ += incoming.encode().size();
        switch (phase_) {
            case Phase::wait_sa_init_request:
                if (incoming.exchange_type != ExchangeType::sa_init)
                    raise(Errc::unexpected_exchange, "expected SA_INIT request");
                check_request_id(incoming);
                return handle_sa_init_request(incoming);
            case Phase::wait_sa_init_response:
                if (incoming.exchange_type != ExchangeType::sa_init)
                    raise(Errc::unexpected_exchange, "expected SA_INIT response");
                check_request_id(incoming);
                handle_sa_init_response(incoming);
                return next_initiator_message();
            case Phase::wait_intermediate_request:
                if (incoming.exchange_type != ExchangeType::intermediate)
                    raise(Errc::unexpected_exchange, "expected INTERMEDIATE request");
                check_request_id(incoming);
                return handle_intermediate_request(incoming);
            case Phase::wait_intermediate_response:
                if (incoming.exchange_type != ExchangeType::intermediate)
                    raise(Errc::unexpected_exchange, "expected INTERMEDIATE response");
                check_request_id(incoming);
                handle_intermediate_response(incoming);
                return next_initiator_message();
            case Phase::wait_auth_request:
                if (incoming.exchange_type != ExchangeType::auth)
                    raise(Errc::unexpected_exchange, "expected AUTH request");
                check_request_id(incoming);
                return handle_auth_request(incoming);
            case Phase::wait_auth_response:
                if (incoming.exchange_type != ExchangeType::auth)
                    raise(Errc::unexpected_exchange, "expected AUTH response");
                check_request_id(incoming);
                handle_auth_response(incoming);
                return std::nullopt;
            case Phase::idle:
            case Phase::established:
            case Phase::failed:
                raise(Errc::unexpected_exchange, "state machine is not expecting messages");
        }
        raise(Errc::unexpected_exchange, "unreachable");
    } catch (...) {
        phase_ = Phase::failed;
        throw;
    }
}

Message HandshakeState::handle_sa_init_request(const Message& msg) {
    absorb(msg.encode());

    const auto offered = decode_proposal_list(msg.require(PayloadType::proposal_list).body);
    chosen_ = select_proposal(offered, cfg_.proposals);
    for (const std::string& suite : chosen_.addke)
        if (!cfg_.registry->contains(suite)) raise(Errc::unknown_suite, "KEM " + suite);

    const Bytes& nonce = msg.require(PayloadType::nonce).body;
    if (nonce.size() != kNonceLen) raise(Errc::config_error, "nonce must be 32 bytes");
    ni_ = nonce;
    nr_ = subseed("nonce");

    const Bytes& ke = msg.require(PayloadType::ke).body;
    if (ke.size() < 2) raise(Errc::config_error, "malformed KE payload");
    const uint16_t group_id = get_be16(ke.data());
    if (group_id != chosen_.ke_group)
        raise(Errc::no_proposal_chosen, "KE payload group does not match the chosen proposal");
    const DhGroup& group = dh_group(group_id);
    BytesView peer_public(ke.data() + 2, ke.size() - 2);

    DhKeyPair kp = dh_keygen(group, subseed("ke"));
    account(kp.private_exponent.size() + kp.public_value.size());
    classical_secret_ = dh_shared(group, kp.private_exponent, peer_public);
    chain_key_ = initial_chain_key(chosen_.integ_prf, ni_, nr_, classical_secret_);

    Message out;
    out.exchange_type = ExchangeType::sa_init;
    out.message_id = msg.message_id;
    out.payloads.push_back({PayloadType::proposal_list, encode_proposal_list({chosen_})});
    Bytes ke_body;
    put_be16(ke_body, group.id);
    ke_body.insert(ke_body.end(), kp.public_value.begin(), kp.public_value.end());
    out.payloads.push_back({PayloadType::ke, std::move(ke_body)});
    out.payloads.push_back({PayloadType::nonce, nr_});
    if (!chosen_.addke.empty()) {
        Bytes body;
        put_be16(body, kNotifyIntermediateSupported);
        out.payloads.push_back({PayloadType::notify, std::move(body)});
    }
    next_request_id_ = 1;
    phase_ = chosen_.addke.empty() ? Phase::wait_auth_request : Phase::wait_intermediate_request;
    return emit(std::move(out));
}

void HandshakeState::handle_sa_init_response(const Message& msg) {
    absorb(msg.encode());

    const auto chosen_list = decode_proposal_list(msg.require(PayloadType::proposal_list).body);
    if (chosen_list.size() != 1)
        raise(Errc::no_proposal_chosen, "SA_INIT response must carry exactly one proposal");
    chosen_ = chosen_list.front();
    if (std::find(cfg_.proposals.begin(), cfg_.proposals.end(), chosen_) == cfg_.proposals.end())
        raise(Errc::no_proposal_chosen, "responder chose a proposal that was not offered");

    const Bytes& nonce = msg.require(PayloadType::nonce).body;
    if (nonce.size() != kNonceLen) raise(Errc::config_error, "nonce must be 32 bytes");
    nr_ = nonce;

    const Bytes& ke = msg.require(PayloadType::ke).body;
    if (ke.size() < 2) raise(Errc::config_error, "malformed KE payload");
    const uint16_t group_id = get_be16(ke.data());
    if (group_id != chosen_.ke_group)
        raise(Errc::no_proposal_chosen, "KE payload group does not match the chosen proposal");
    const DhGroup& group = dh_group(group_id);
    classical_secret_ = dh_shared(group, dh_private_, BytesView(ke.data() + 2, ke.size() - 2));
    chain_key_ = initial_chain_key(chosen_.integ_prf, ni_, nr_, classical_secret_);
}

Message HandshakeState::next_initiator_message() {
    if (round_ < chosen_.addke.size()) {
        const KemProvider& kem = cfg_.registry->find(chosen_.addke[round_]);
        round_keypair_ = kem.keygen(subseed("addke", round_));
        account(round_keypair_.public_key.size() + round_keypair_.secret_key.size());

        Message msg;
        msg.exchange_type = ExchangeType::intermediate;
        msg.message_id = next_request_id_++;
        msg.payloads.push_back({PayloadType::kem_public, round_keypair_.public_key});
        phase_ = Phase::wait_intermediate_response;
        return emit(std::move(msg));
    }
    return make_auth_request();
}

Message HandshakeState::handle_intermediate_request(const Message& msg) {
    absorb(msg.encode());

    const KemProvider& kem = cfg_.registry->find(chosen_.addke[round_]);
    const Bytes& pk = msg.require(PayloadType::kem_public).body;
    EncapsResult enc;
    try {
        enc = kem.encapsulate(pk, subseed("addke-encaps", round_));
    } catch (const Error& e) {
        raise(Errc::kem_failure, std::string("round ") + std::to_string(round_) + ": " + e.what());
    }
    account(enc.shared_secret.size());
    round_secrets_.push_back(enc.shared_secret);
    chain_key_ = combine_keys(chosen_.integ_prf, chain_key_, enc.shared_secret, ni_, nr_);

    Message out;
    out.exchange_type = ExchangeType::intermediate;
    out.message_id = msg.message_id;
    out.payloads.push_back({PayloadType::kem_ciphertext, std::move(enc.ciphertext)});
    ++round_;
    ++next_request_id_;
    phase_ = round_ < chosen_.addke.size() ? Phase::wait_intermediate_request
                                           : Phase::wait_auth_request;
    return emit(std::move(out));
}

void HandshakeState::handle_intermediate_response(const Message& msg) {
    absorb(msg.encode());

    const KemProvider& kem = cfg_.registry->find(chosen_.addke[round_]);
    const Bytes& ct = msg.require(PayloadType::kem_ciphertext).body;
    Bytes secret;
    try {
        secret = kem.decapsulate(round_keypair_.secret_key, ct);
    } catch (const Error& e) {
        raise(Errc::kem_failure, std::string("round ") + std::to_string(round_) + ": " + e.what());
    }
    account(secret.size());
    round_secrets_.push_back(secret);
    chain_key_ = combine_keys(chosen_.integ_prf, chain_key_, secret, ni_, nr_);
    ++round_;
}

Message HandshakeState::make_auth_request() {
    Message msg;
    msg.exchange_type = ExchangeType::auth;
    msg.message_id = next_request_id_++;
    msg.payloads.push_back({PayloadType::auth, auth_tag('I')});
    phase_ = Phase::wait_auth_response;
    return emit(std::move(msg));
}

Message HandshakeState::handle_auth_request(const Message& msg) {
    // Verify against the transcript as it stood when the peer signed it,
    // i.e. before absorbing this message.
    const Bytes expected = auth_tag('I');
    if (!ct_equal(msg.require(PayloadType::auth).body, expected))
        raise(Errc::auth_failure, "initiator authentication failed");
    absorb(msg.encode());
    complete_keys();

    Message out;
    out.exchange_type = ExchangeType::auth;
    out.message_id = msg.message_id;
    out.payloads.push_back({PayloadType::auth, auth_tag('R')});
    ++next_request_id_;
    Message emitted = emit(std::move(out));
    finish();
    return emitted;
}

void HandshakeState::handle_auth_response(const Message& msg) {
    const Bytes expected = auth_tag('R');
    if (!ct_equal(msg.require(PayloadType::auth).body, expected))
        raise(Errc::auth_failure, "responder authentication failed");
    absorb(msg.encode());
    complete_keys();
    finish();
}

void HandshakeState::complete_keys() {
    schedule_ = derive_key_schedule(chosen_.integ_prf, chosen_.encr, chain_key_, ni_, nr_);
}

void HandshakeState::finish() {
    phase_ = Phase::established;
    if (ledger_) {
        ledger_->release(ledger_held_);
        ledger_held_ = 0;
        ledger_->add(schedule_.total_bytes());
    }
}

HandshakeOutcome run_handshake(const HandshakeConfig& initiator, const HandshakeConfig& responder,
                               ByteLedger* ledger) {
    HandshakeState init(initiator);
    HandshakeState resp(responder);
    std::vector<std::string> ladder;
    init.set_transcript_sink(&ladder);
    resp.set_transcript_sink(&ladder);
    if (ledger) {
        init.set_ledger(ledger);
        resp.set_ledger(ledger);
    }

    const int64_t t0 = steady_now_ns();
    std::optional<Message> in_flight = init.start();
    while (in_flight) {
        std::optional<Message> reply = resp.on_message(*in_flight);
        if (!reply) break;
        in_flight = init.on_message(*reply);
    }
    if (!init.established() || !resp.established())
        raise(Errc::handshake_failed, "state machines did not both reach ESTABLISHED");

    HandshakeOutcome out;
    out.chosen = init.chosen();
    out.initiator_schedule = init.schedule();
    out.responder_schedule = resp.schedule();
    out.ni = init.ni();
    out.nr = init.nr();
    out.total_bytes = init.bytes_sent() + resp.bytes_sent();
    out.wall_ms = static_cast<double>(steady_now_ns() - t0) / 1e6;
    out.ladder = std::move(ladder);
    return out;
}

}  // namespace pqofh
