#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ecot/session.hpp"

// Primitives for the mutual-secret-exchange wrapper: XOR knowledge masks,
// the base-point final transfer, and the cheat-recovery identity.

namespace ecot::exch {

// Mask value is the session constant M when the party recovered the
// counterparty's key, its bitwise complement otherwise.
struct KnowledgeMask {
    std::vector<std::uint8_t> m_const;
    bool knows = false;

    std::vector<std::uint8_t> value() const {
        std::vector<std::uint8_t> out = m_const;
        if (!knows)
            for (auto& b : out) b = static_cast<std::uint8_t>(~b);
        return out;
    }
};

inline std::vector<std::uint8_t> xor_bytes(std::span<const std::uint8_t> lhs,
                                           std::span<const std::uint8_t> rhs) {
    if (lhs.size() != rhs.size()) throw LengthMismatch("xor over unequal lengths");
    std::vector<std::uint8_t> out(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) out[i] = lhs[i] ^ rhs[i];
    return out;
}

inline std::vector<std::uint8_t> mask_secret(const KnowledgeMask& mask,
                                             std::span<const std::uint8_t> secret) {
    return xor_bytes(mask.value(), secret);
}

// masked ^ M; yields the peer's secret exactly when the peer's mask was M,
// i.e. when the peer had recovered our key.
inline std::vector<std::uint8_t> cheat_recover(std::span<const std::uint8_t> masked,
                                               std::span<const std::uint8_t> m_const) {
    return xor_bytes(masked, m_const);
}

inline const AffinePoint& require_base(const CurveParams& curve) {
    if (!curve.base()) throw MissingBasePoint("curve has no configured base point");
    return *curve.base();
}

// secret_point + key * G
inline AffinePoint final_transfer(const CurveParams& curve, const AffinePoint& secret_point, Int key) {
    return add(curve, secret_point, scalar_mul(curve, key, require_base(curve)));
}

// transferred - key * G
inline AffinePoint recover_secret(const CurveParams& curve, const AffinePoint& transferred, Int key) {
    return sub(curve, transferred, scalar_mul(curve, key, require_base(curve)));
}

struct PartyOutcome {
    bool got_other = false;
    std::vector<std::uint8_t> other_secret;
    bool via_mask = false;  // reconstructed from the masked message after the peer withheld
};

struct ExchangeResult {
    PartyOutcome a;
    PartyOutcome b;
    std::vector<std::uint8_t> secret_a;  // ground truth, for harness checks
    std::vector<std::uint8_t> secret_b;
    bool a_recovered_peer_key = false;
    bool b_recovered_peer_key = false;
};

}  // namespace ecot::exch
