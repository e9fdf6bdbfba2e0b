#pragma once

#include <stdexcept>
#include <string>

namespace pqofh {

enum class Errc {
    unknown_suite,
    malformed_public_key,
    malformed_ciphertext,
    invalid_public_value,
    no_proposal_chosen,
    unexpected_exchange,
    kem_failure,
    stale_message_id,
    auth_failure,
    sequence_exhausted,
    icv_mismatch,
    replay_detected,
    unknown_spi,
    empty_trace,
    insufficient_data,
    unknown_metric,
    handshake_failed,
    transport_unavailable,
    config_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail = "")
        : std::runtime_error(detail.empty() ? std::string(errc_name(code))
                                            : std::string(errc_name(code)) + ": " + detail),
          code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& detail = "") {
    throw Error(code, detail);
}

}  // namespace pqofh
