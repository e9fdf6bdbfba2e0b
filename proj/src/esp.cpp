#include "pqofh/esp.hpp"

#include "pqofh/errors.hpp"

namespace pqofh {

SecurityAssociation::SecurityAssociation(uint32_t spi, EncrAlg encr, PrfAlg integ, Bytes sk_e,
                                         Bytes sk_a)
    : spi_(spi), encr_(encr), integ_(integ), sk_e_(std::move(sk_e)), sk_a_(std::move(sk_a)) {
    if (sk_e_.size() != encr_key_len(encr_))
        raise(Errc::config_error, "encryption key length does not match the cipher");
    if (sk_a_.empty()) raise(Errc::config_error, "integrity key must not be empty");
    const Bytes tag = sha256(concat(sk_e_, as_view("iv-prefix")));
    iv_prefix_.assign(tag.begin(), tag.begin() + 8);
}

SecurityAssociation::Protected SecurityAssociation::protect(BytesView plaintext) {
    if (plaintext.size() > kEspMaxPayload)
        raise(Errc::config_error, "payload exceeds 65535 bytes");
    if (seq_ >= 0xFFFFFFFFull)
        raise(Errc::sequence_exhausted, "32-bit sequence space exhausted; rekey required");
    const uint64_t seq = ++seq_;

    Bytes iv = iv_prefix_;
    put_be64(iv, seq);

    const int64_t t0 = steady_now_ns();
    Bytes header;
    header.reserve(kEspHeaderLen);
    put_be32(header, spi_);
    put_be32(header, static_cast<uint32_t>(seq));
    header.insert(header.end(), iv.begin(), iv.end());

    Bytes ciphertext = aes_ctr(encr_, sk_e_, iv, plaintext);
    Bytes mac = hmac(integ_, sk_a_, concat(header, ciphertext));
    const int64_t t1 = steady_now_ns();

    Bytes wire = std::move(header);
    wire.insert(wire.end(), ciphertext.begin(), ciphertext.end());
    wire.insert(wire.end(), mac.begin(), mac.begin() + kEspIcvLen);
    return {std::move(wire), static_cast<double>(t1 - t0) / 1000.0};
}

Bytes SecurityAssociation::unprotect(BytesView wire) {
    if (wire.size() < kEspOverhead)
        raise(Errc::icv_mismatch, "packet shorter than the minimum protected length");
    if (get_be32(wire.data()) != spi_)
        raise(Errc::unknown_spi, "SPI " + std::to_string(get_be32(wire.data())));
    const uint64_t seq = get_be32(wire.data() + 4);
    if (!window_.check(seq))
        raise(Errc::replay_detected, "sequence " + std::to_string(seq));

    const BytesView authed = wire.first(wire.size() - kEspIcvLen);
    const Bytes mac = hmac(integ_, sk_a_, authed);
    if (!ct_equal(wire.last(kEspIcvLen), BytesView(mac.data(), kEspIcvLen)))
        raise(Errc::icv_mismatch, "integrity check failed");

    window_.update(seq);
    last_accepted_seq_ = seq;

    const BytesView iv = wire.subspan(8, 16);
    return aes_ctr(encr_, sk_e_, iv, wire.subspan(kEspHeaderLen, wire.size() - kEspOverhead));
}

}  // namespace pqofh
