#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ecot/errors.hpp"

// Short-Weierstrass arithmetic over Z_p for desk-scale primes (p < 2^31).
// Plain 64-bit integers with eager reduction; every public operation
// validates its point inputs and only ever emits reduced coordinates.

namespace ecot {

using Int = std::int64_t;
using Rng = std::mt19937_64;

namespace modmath {

inline constexpr Int kPrimeBound = Int{1} << 31;

constexpr Int mod(Int v, Int p) {
    Int r = v % p;
    return r < 0 ? r + p : r;
}

// operands reduced, p < 2^31: the product fits in Int
constexpr Int mul(Int a, Int b, Int p) { return a * b % p; }

constexpr Int pow(Int base, Int exp, Int p) {
    Int acc = 1 % p;
    base = mod(base, p);
    while (exp > 0) {
        if (exp & 1) acc = mul(acc, base, p);
        base = mul(base, base, p);
        exp >>= 1;
    }
    return acc;
}

// extended-Euclid inverse; a != 0 (mod p) is an internal impossibility in the
// group law's case analysis, so it is asserted rather than surfaced
inline Int inv(Int a, Int p) {
    a = mod(a, p);
    assert(a != 0 && "modular inverse of zero");
    Int r0 = p, r1 = a, s0 = 0, s1 = 1;
    while (r1 != 0) {
        Int q = r0 / r1;
        Int r2 = r0 - q * r1;
        Int s2 = s0 - q * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    assert(r0 == 1 && "not invertible");
    return mod(s0, p);
}

inline bool is_prime(Int n) {
    if (n < 2) return false;
    for (Int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<Int> prime_factors(Int n) {
    std::vector<Int> out;
    for (Int d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace modmath

class AffinePoint {
public:
    constexpr AffinePoint() = default;  // identity
    static constexpr AffinePoint identity() { return {}; }
    static constexpr AffinePoint at(Int x, Int y) {
        AffinePoint pt;
        pt.inf_ = false;
        pt.x_ = x;
        pt.y_ = y;
        return pt;
    }

    constexpr bool is_identity() const { return inf_; }
    constexpr Int x() const { return x_; }
    constexpr Int y() const { return y_; }

    friend constexpr bool operator==(const AffinePoint&, const AffinePoint&) = default;

private:
    Int x_ = 0;
    Int y_ = 0;
    bool inf_ = true;
};

inline std::string to_string(const AffinePoint& pt) {
    if (pt.is_identity()) return "O";
    return "(" + std::to_string(pt.x()) + "," + std::to_string(pt.y()) + ")";
}

class CurveParams {
public:
    CurveParams(Int p, Int a, Int b) : p_(p), a_(0), b_(0) {
        if (p < 5 || p >= modmath::kPrimeBound)
            throw InvalidCurve("prime must be in [5, 2^31)");
        if (!modmath::is_prime(p)) throw InvalidCurve("modulus is not prime");
        a_ = modmath::mod(a, p);
        b_ = modmath::mod(b, p);
        Int disc = modmath::mod(4 * modmath::pow(a_, 3, p) + 27 * modmath::mul(b_, b_, p), p);
        if (disc == 0) throw InvalidCurve("singular curve: 4a^3 + 27b^2 = 0 (mod p)");
    }

    CurveParams(Int p, Int a, Int b, AffinePoint base, Int base_order) : CurveParams(p, a, b) {
        set_base(base, base_order);
    }

    Int p() const { return p_; }
    Int a() const { return a_; }
    Int b() const { return b_; }
    const std::optional<AffinePoint>& base() const { return base_; }
    const std::optional<Int>& base_order() const { return base_order_; }

    // defined after the group operations below
    void set_base(AffinePoint base, Int base_order);

    friend bool operator==(const CurveParams&, const CurveParams&) = default;

private:
    Int p_, a_, b_;
    std::optional<AffinePoint> base_;
    std::optional<Int> base_order_;
};

// The two points sharing an x-coordinate; p1 carries the smaller y, and
// p2 = -p1. The y = 0 case never forms an XPair.
struct XPair {
    Int x = 0;
    AffinePoint p1;
    AffinePoint p2;
};

inline bool is_on_curve(const CurveParams& c, const AffinePoint& pt) {
    if (pt.is_identity()) return true;
    // unreduced coordinates are not curve members
    if (pt.x() < 0 || pt.x() >= c.p() || pt.y() < 0 || pt.y() >= c.p()) return false;
    Int lhs = modmath::mul(pt.y(), pt.y(), c.p());
    Int rhs = modmath::mod(modmath::pow(pt.x(), 3, c.p()) + modmath::mul(c.a(), pt.x(), c.p()) + c.b(), c.p());
    return lhs == rhs;
}

namespace detail {

inline void require_on_curve(const CurveParams& c, const AffinePoint& pt, const char* who) {
    if (!is_on_curve(c, pt))
        throw InvalidPoint(std::string(who) + ": point " + to_string(pt) + " is not on the curve");
}

// group law without input validation; callers guarantee membership
inline AffinePoint add_raw(const CurveParams& c, const AffinePoint& lhs, const AffinePoint& rhs) {
    if (lhs.is_identity()) return rhs;
    if (rhs.is_identity()) return lhs;
    const Int p = c.p();
    if (lhs.x() == rhs.x() && modmath::mod(lhs.y() + rhs.y(), p) == 0)
        return AffinePoint::identity();  // P + (-P), including doubling a y = 0 point
    Int slope;
    if (lhs == rhs) {
        slope = modmath::mul(modmath::mod(3 * modmath::mul(lhs.x(), lhs.x(), p) + c.a(), p),
                             modmath::inv(modmath::mod(2 * lhs.y(), p), p), p);
    } else {
        slope = modmath::mul(modmath::mod(rhs.y() - lhs.y(), p),
                             modmath::inv(modmath::mod(rhs.x() - lhs.x(), p), p), p);
    }
    Int x3 = modmath::mod(modmath::mul(slope, slope, p) - lhs.x() - rhs.x(), p);
    Int y3 = modmath::mod(modmath::mul(slope, modmath::mod(lhs.x() - x3, p), p) - lhs.y(), p);
    return AffinePoint::at(x3, y3);
}

inline AffinePoint scalar_mul_raw(const CurveParams& c, Int k, AffinePoint pt) {
    AffinePoint acc = AffinePoint::identity();
    while (k > 0) {
        if (k & 1) acc = add_raw(c, acc, pt);
        pt = add_raw(c, pt, pt);
        k >>= 1;
    }
    return acc;
}

}  // namespace detail

inline AffinePoint negate(const CurveParams& c, const AffinePoint& pt) {
    detail::require_on_curve(c, pt, "negate");
    if (pt.is_identity()) return pt;
    if (pt.y() == 0) return pt;
    return AffinePoint::at(pt.x(), c.p() - pt.y());
}

inline AffinePoint add(const CurveParams& c, const AffinePoint& lhs, const AffinePoint& rhs) {
    detail::require_on_curve(c, lhs, "add");
    detail::require_on_curve(c, rhs, "add");
    return detail::add_raw(c, lhs, rhs);
}

inline AffinePoint sub(const CurveParams& c, const AffinePoint& lhs, const AffinePoint& rhs) {
    return add(c, lhs, negate(c, rhs));
}

inline AffinePoint scalar_mul(const CurveParams& c, Int k, const AffinePoint& pt) {
    if (k < 0) throw OutOfRange("scalar_mul: negative scalar");
    detail::require_on_curve(c, pt, "scalar_mul");
    return detail::scalar_mul_raw(c, k, pt);
}

// All square roots of s mod p, ascending. Empty means non-residue.
// Uses the (p+1)/4 exponent when p = 3 (mod 4), Tonelli-Shanks otherwise.
// Pre: p prime (not re-checked; this sits in hot loops).
inline std::vector<Int> sqrt_mod_p(Int p, Int s) {
    s = modmath::mod(s, p);
    if (s == 0) return {0};
    if (modmath::pow(s, (p - 1) / 2, p) != 1) return {};
    Int root;
    if (p % 4 == 3) {
        root = modmath::pow(s, (p + 1) / 4, p);
    } else {
        // Tonelli-Shanks: p - 1 = q * 2^e with q odd
        Int q = p - 1, e = 0;
        while (q % 2 == 0) { q /= 2; ++e; }
        Int z = 2;
        while (modmath::pow(z, (p - 1) / 2, p) != p - 1) ++z;
        Int m = e;
        Int c = modmath::pow(z, q, p);
        Int t = modmath::pow(s, q, p);
        root = modmath::pow(s, (q + 1) / 2, p);
        while (t != 1) {
            Int i = 0, probe = t;
            while (probe != 1) { probe = modmath::mul(probe, probe, p); ++i; }
            Int b = modmath::pow(c, Int{1} << (m - i - 1), p);
            m = i;
            c = modmath::mul(b, b, p);
            t = modmath::mul(t, c, p);
            root = modmath::mul(root, b, p);
        }
    }
    assert(modmath::mul(root, root, p) == s);
    Int other = p - root;
    if (root > other) std::swap(root, other);
    return {root, other};
}

// Lift an x-coordinate to its two points. nullopt when the rhs is a
// non-residue; DegenerateX when rhs = 0 (a lone y = 0 point cannot support
// the protocol's two-case structure).
inline std::optional<XPair> lift_x(const CurveParams& c, Int x) {
    x = modmath::mod(x, c.p());
    Int rhs = modmath::mod(modmath::pow(x, 3, c.p()) + modmath::mul(c.a(), x, c.p()) + c.b(), c.p());
    if (rhs == 0)
        throw DegenerateX("x = " + std::to_string(x) + " lifts to a single y = 0 point");
    auto roots = sqrt_mod_p(c.p(), rhs);
    if (roots.empty()) return std::nullopt;
    return XPair{x, AffinePoint::at(x, roots[0]), AffinePoint::at(x, roots[1])};
}

// Least n >= 1 with n * pt = O, by iterated addition. Desk scale only.
inline Int point_order(const CurveParams& c, const AffinePoint& pt) {
    detail::require_on_curve(c, pt, "point_order");
    if (pt.is_identity()) throw InvalidPoint("point_order: identity has no generator order");
    Int n = 1;
    AffinePoint acc = pt;
    while (!acc.is_identity()) {
        acc = detail::add_raw(c, acc, pt);
        ++n;
    }
    return n;
}

inline Int uniform_int(Rng& rng, Int lo, Int hi) {
    assert(lo <= hi);
    return std::uniform_int_distribution<Int>(lo, hi)(rng);
}

inline bool coin(Rng& rng) { return (rng() & 1) != 0; }

// Uniform non-identity point: sample x until it lifts, then pick a root by a
// fair bit. A single-root (y = 0) x is kept only on heads so every affine
// point keeps equal weight. The result's discrete log stays unknown.
inline AffinePoint random_point(const CurveParams& c, Rng& rng) {
    constexpr int kMaxAttempts = 100000;
    for (int i = 0; i < kMaxAttempts; ++i) {
        Int x = uniform_int(rng, 0, c.p() - 1);
        Int rhs = modmath::mod(modmath::pow(x, 3, c.p()) + modmath::mul(c.a(), x, c.p()) + c.b(), c.p());
        auto roots = sqrt_mod_p(c.p(), rhs);
        if (roots.empty()) continue;
        bool heads = coin(rng);
        if (roots.size() == 2) return AffinePoint::at(x, heads ? roots[1] : roots[0]);
        if (heads) return AffinePoint::at(x, roots[0]);
    }
    throw Exhausted("random_point: no curve point found within attempt bound");
}

inline void CurveParams::set_base(AffinePoint base, Int base_order) {
    if (base.is_identity() || !is_on_curve(*this, base))
        throw InvalidCurve("base point is not a curve point");
    if (base_order < 1) throw InvalidCurve("base order must be positive");
    if (!detail::scalar_mul_raw(*this, base_order, base).is_identity())
        throw InvalidCurve("base_order * G != O");
    for (Int q : modmath::prime_factors(base_order)) {
        if (detail::scalar_mul_raw(*this, base_order / q, base).is_identity())
            throw InvalidCurve("base_order is not the least annihilator of G");
    }
    base_ = base;
    base_order_ = base_order;
}

}  // namespace ecot
