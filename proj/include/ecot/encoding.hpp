#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ecot/ec.hpp"

// Invertible embedding of small integers (and short byte strings via their
// big-endian value) into curve points: try-and-increment over the x window
// [v*kappa, (v+1)*kappa), inverted by integer division.

namespace ecot {

class Encoding {
public:
    explicit Encoding(CurveParams curve, Int kappa = 16) : curve_(std::move(curve)), kappa_(kappa) {
        if (kappa_ < 2) throw InvalidConfig("kappa must be >= 2");
        if (max_value() < 0) throw InvalidConfig("kappa too large: nothing is encodable");
    }

    const CurveParams& curve() const { return curve_; }
    Int kappa() const { return kappa_; }

    // largest m with (m+1)*kappa < p
    Int max_value() const { return (curve_.p() + kappa_ - 1) / kappa_ - 2; }

    AffinePoint encode(Int value) const {
        if (value < 0 || value > max_value())
            throw OutOfRange("encode: value " + std::to_string(value) + " exceeds max " +
                             std::to_string(max_value()));
        const Int p = curve_.p();
        for (Int i = 0; i < kappa_; ++i) {
            Int x = value * kappa_ + i;
            Int rhs = modmath::mod(modmath::pow(x, 3, p) + modmath::mul(curve_.a(), x, p) + curve_.b(), p);
            auto roots = sqrt_mod_p(p, rhs);
            if (!roots.empty()) return AffinePoint::at(x, roots[0]);
        }
        throw Unencodable("encode: no residue in the x window of value " + std::to_string(value));
    }

    Int decode(const AffinePoint& pt) const {
        if (pt.is_identity()) throw InvalidPoint("decode: identity");
        if (!is_on_curve(curve_, pt)) throw InvalidPoint("decode: point not on curve");
        return pt.x() / kappa_;
    }

private:
    CurveParams curve_;
    Int kappa_;
};

inline Int value_of_bytes(std::span<const std::uint8_t> bytes) {
    if (bytes.size() > 7) throw OutOfRange("byte string longer than value width");
    Int v = 0;
    for (auto b : bytes) v = (v << 8) | b;
    return v;
}

inline std::vector<std::uint8_t> bytes_of_value(Int v, std::size_t len) {
    if (v < 0 || (len < 8 && v >= (Int{1} << (8 * len))))
        throw OutOfRange("value does not fit in " + std::to_string(len) + " bytes");
    std::vector<std::uint8_t> out(len);
    for (std::size_t i = len; i-- > 0;) {
        out[i] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    return out;
}

// A party's secret: opaque bytes plus their point embedding.
struct SecretBundle {
    std::vector<std::uint8_t> secret;
    AffinePoint secret_point;

    static SecretBundle from_bytes(const Encoding& enc, std::vector<std::uint8_t> bytes) {
        AffinePoint pt = enc.encode(value_of_bytes(bytes));
        return SecretBundle{std::move(bytes), pt};
    }
};

}  // namespace ecot
