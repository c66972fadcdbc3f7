#pragma once

#include <cstdint>
#include <vector>

#include "ecot/encoding.hpp"

namespace ecot {

inline std::vector<std::uint8_t> default_mask(std::size_t len) {
    return std::vector<std::uint8_t>(len, 0xA5);
}

// Everything both parties must agree on before a session: the curve, the
// shared x-coordinate, the point-encoding width, and the secret-exchange
// parameters (length and mask constant M). Mirrors the wire handshake.
struct SessionConfig {
    CurveParams curve;
    Int x_coord = 0;
    Int kappa = 16;
    std::size_t secret_len = 2;
    std::vector<std::uint8_t> mask_const;

    Encoding encoding() const { return Encoding(curve, kappa); }

    XPair xpair() const {
        auto pair = lift_x(curve, x_coord);
        if (!pair)
            throw InvalidConfig("session x-coordinate " + std::to_string(x_coord) +
                                " does not lift to curve points");
        return *pair;
    }

    void validate() const {
        (void)encoding();
        (void)xpair();
        if (secret_len == 0 || secret_len > 7) throw InvalidConfig("secret_len must be in [1, 7]");
        if (mask_const.size() != secret_len) throw InvalidConfig("mask constant length != secret_len");
    }
};

namespace presets {

// E_23(9,21): the 33-element cyclic group the worked protocol vectors live on.
inline CurveParams e23() {
    return CurveParams(23, 9, 21, AffinePoint::at(2, 1), 33);
}

// p = 1009 = 1 (mod 4): exercises the Tonelli-Shanks square-root path.
inline CurveParams e1009() {
    return CurveParams(1009, 9, 21, AffinePoint::at(0, 358), 1038);
}

// p = 10007 = 3 (mod 4): exercises the (p+1)/4 square-root shortcut.
inline CurveParams e10007() {
    return CurveParams(10007, 9, 21, AffinePoint::at(2, 3130), 10006);
}

// p = 2^20 + 7: wide enough that every 2-byte secret encodes under kappa=16
// and decode-window coincidences are negligible in Monte Carlo statistics.
inline CurveParams e1048583() {
    return CurveParams(1048583, 9, 21, AffinePoint::at(2, 340299), 1048595);
}

inline SessionConfig session_e23() {
    return SessionConfig{e23(), 7, 2, 1, default_mask(1)};
}

inline SessionConfig session_e1009() {
    return SessionConfig{e1009(), 3, 2, 1, default_mask(1)};
}

inline SessionConfig session_e10007() {
    return SessionConfig{e10007(), 3, 16, 1, default_mask(1)};
}

inline SessionConfig session_e1048583() {
    return SessionConfig{e1048583(), 3, 16, 2, default_mask(2)};
}

}  // namespace presets
}  // namespace ecot
