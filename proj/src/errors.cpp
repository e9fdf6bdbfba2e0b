#include "pqofh/errors.hpp"

namespace pqofh {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::unknown_suite: return "UnknownSuite";
        case Errc::malformed_public_key: return "MalformedPublicKey";
        case Errc::malformed_ciphertext: return "MalformedCiphertext";
        case Errc::invalid_public_value: return "InvalidPublicValue";
        case Errc::no_proposal_chosen: return "NoProposalChosen";
        case Errc::unexpected_exchange: return "UnexpectedExchange";
        case Errc::kem_failure: return "KemFailure";
        case Errc::stale_message_id: return "StaleMessageId";
        case Errc::auth_failure: return "AuthFailure";
        case Errc::sequence_exhausted: return "SequenceExhausted";
        case Errc::icv_mismatch: return "IcvMismatch";
        case Errc::replay_detected: return "ReplayDetected";
        case Errc::unknown_spi: return "UnknownSpi";
        case Errc::empty_trace: return "EmptyTrace";
        case Errc::insufficient_data: return "InsufficientData";
        case Errc::unknown_metric: return "UnknownMetric";
        case Errc::handshake_failed: return "HandshakeFailed";
        case Errc::transport_unavailable: return "TransportUnavailable";
        case Errc::config_error: return "ConfigError";
    }
    return "UnknownError";
}

}  // namespace pqofh
