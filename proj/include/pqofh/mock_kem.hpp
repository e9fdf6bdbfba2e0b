#pragma once

#include <memory>
#include <string>

#include "pqofh/kem.hpp"

namespace pqofh {

// Stand-in provider that reproduces a real KEM's wire sizes and encapsulation
// compute cost without its mathematics. The ciphertext carries a 32-byte
// ephemeral value; both sides derive the shared secret as a keyed hash over
// (public key || ephemeral), so decaps/encaps agreement holds by construction.
std::unique_ptr<KemProvider> make_mock_kem(std::string name, const KemParams& params);

}  // namespace pqofh
