#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ecot/ec.hpp"

// Ground truth by brute force. This module re-implements every piece of
// modular and curve arithmetic from scratch on purpose: its whole value is
// that it shares nothing with ec.hpp beyond raw integer operations, so
// agreement between the two is evidence, not tautology.

namespace ecot::oracle {

inline constexpr Int kScanBound = Int{1} << 21;

namespace raw {

inline Int reduce(Int v, Int p) {
    v %= p;
    return v < 0 ? v + p : v;
}

inline Int mulp(Int a, Int b, Int p) { return (a % p) * (b % p) % p; }

inline Int powp(Int base, Int exp, Int p) {
    Int r = 1 % p;
    base = reduce(base, p);
    for (; exp; exp >>= 1) {
        if (exp & 1) r = mulp(r, base, p);
        base = mulp(base, base, p);
    }
    return r;
}

// Fermat inverse; p prime, a != 0 (mod p). A different route than the
// core's extended Euclid, which keeps the two codebases disjoint.
inline Int invp(Int a, Int p) { return powp(a, p - 2, p); }

inline Int rhs_of(const CurveParams& c, Int x) {
    return reduce(mulp(mulp(x, x, c.p()), x, c.p()) + mulp(c.a(), x, c.p()) + c.b(), c.p());
}

}  // namespace raw

// Chord-tangent sum written out independently of the core group law.
inline AffinePoint naive_add(const CurveParams& c, const AffinePoint& lhs, const AffinePoint& rhs) {
    const Int p = c.p();
    if (lhs.is_identity()) return rhs;
    if (rhs.is_identity()) return lhs;
    if (lhs.x() == rhs.x() && raw::reduce(lhs.y() + rhs.y(), p) == 0) return AffinePoint::identity();
    Int num, den;
    if (lhs.x() == rhs.x() && lhs.y() == rhs.y()) {
        num = raw::reduce(3 * raw::mulp(lhs.x(), lhs.x(), p) + c.a(), p);
        den = raw::reduce(2 * lhs.y(), p);
    } else {
        num = raw::reduce(rhs.y() - lhs.y(), p);
        den = raw::reduce(rhs.x() - lhs.x(), p);
    }
    Int slope = raw::mulp(num, raw::invp(den, p), p);
    Int x3 = raw::reduce(raw::mulp(slope, slope, p) - lhs.x() - rhs.x(), p);
    Int y3 = raw::reduce(raw::mulp(slope, raw::reduce(lhs.x() - x3, p), p) - lhs.y(), p);
    return AffinePoint::at(x3, y3);
}

inline AffinePoint naive_negate(const CurveParams& c, const AffinePoint& pt) {
    if (pt.is_identity() || pt.y() == 0) return pt;
    return AffinePoint::at(pt.x(), c.p() - pt.y());
}

inline AffinePoint naive_sub(const CurveParams& c, const AffinePoint& lhs, const AffinePoint& rhs) {
    return naive_add(c, lhs, naive_negate(c, rhs));
}

// Every group element, identity first, then ascending (x, y).
struct GroupTable {
    CurveParams curve;
    std::vector<AffinePoint> points;
    Int order = 0;

    explicit GroupTable(CurveParams c) : curve(std::move(c)), points{AffinePoint::identity()} {}

    bool contains(const AffinePoint& pt) const {
        if (pt.is_identity()) return true;
        return lookup_.count(pack(pt)) != 0;
    }

    void index() {
        for (const auto& pt : points)
            if (!pt.is_identity()) lookup_.insert(pack(pt));
    }

private:
    static std::uint64_t pack(const AffinePoint& pt) {
        return (static_cast<std::uint64_t>(pt.x()) << 32) | static_cast<std::uint64_t>(pt.y());
    }
    std::unordered_set<std::uint64_t> lookup_;
};

// Exhaustive point list by x-scan (roots found by Euler criterion plus a
// y-sweep per residue x), cross-checked against a y-scan count.
inline GroupTable enumerate(const CurveParams& curve) {
    const Int p = curve.p();
    if (p > kScanBound) throw TooLarge("curve modulus above the oracle scan bound");

    GroupTable table(curve);

    // smallest root per square value; ascending y fills each slot with the
    // smaller of the two roots first
    std::vector<Int> squares(static_cast<std::size_t>(p));
    std::vector<Int> root_of(static_cast<std::size_t>(p), -1);
    for (Int y = 0; y < p; ++y) {
        Int sq = raw::mulp(y, y, p);
        squares[static_cast<std::size_t>(y)] = sq;
        if (root_of[static_cast<std::size_t>(sq)] < 0) root_of[static_cast<std::size_t>(sq)] = y;
    }

    Int x_scan_count = 0;
    for (Int x = 0; x < p; ++x) {
        Int rhs = raw::rhs_of(curve, x);
        if (rhs == 0) {
            table.points.push_back(AffinePoint::at(x, 0));
            ++x_scan_count;
            continue;
        }
        Int lo = root_of[static_cast<std::size_t>(rhs)];
        if (lo < 0) continue;  // non-residue
        table.points.push_back(AffinePoint::at(x, lo));
        table.points.push_back(AffinePoint::at(x, p - lo));
        x_scan_count += 2;
    }

    // y-scan: every (x, y) with y^2 = rhs(x) is counted once from the y side
    std::vector<Int> rhs_values(static_cast<std::size_t>(p));
    for (Int x = 0; x < p; ++x) rhs_values[static_cast<std::size_t>(x)] = raw::rhs_of(curve, x);
    std::sort(rhs_values.begin(), rhs_values.end());
    Int y_scan_count = 0;
    for (Int y = 0; y < p; ++y) {
        auto [lo, hi] = std::equal_range(rhs_values.begin(), rhs_values.end(),
                                         squares[static_cast<std::size_t>(y)]);
        y_scan_count += hi - lo;
    }
    if (x_scan_count != y_scan_count)
        throw Error("oracle enumeration self-check failed: x-scan " + std::to_string(x_scan_count) +
                    " vs y-scan " + std::to_string(y_scan_count));

    table.order = static_cast<Int>(table.points.size());
    table.index();
    return table;
}

// k-fold repeated addition, no double-and-add shortcuts.
inline AffinePoint naive_mul(const GroupTable& table, Int k, const AffinePoint& pt) {
    if (!table.contains(pt)) throw InvalidPoint("naive_mul: point not in the group table");
    AffinePoint acc = AffinePoint::identity();
    for (Int i = 0; i < k; ++i) acc = naive_add(table.curve, acc, pt);
    return acc;
}

// Least k >= 0 with k * base = target, by linear scan of the cyclic subgroup;
// nullopt when target lies outside <base>.
inline std::optional<Int> small_dlog(const GroupTable& table, const AffinePoint& base,
                                     const AffinePoint& target) {
    if (base.is_identity() || !table.contains(base)) throw InvalidPoint("small_dlog: bad base");
    AffinePoint acc = AffinePoint::identity();
    Int k = 0;
    do {
        if (acc == target) return k;
        acc = naive_add(table.curve, acc, base);
        ++k;
    } while (!acc.is_identity() && k <= table.order);
    return std::nullopt;
}

inline Int naive_order(const GroupTable& table, const AffinePoint& pt) {
    if (pt.is_identity()) return 1;
    AffinePoint acc = pt;
    Int n = 1;
    while (!acc.is_identity()) {
        acc = naive_add(table.curve, acc, pt);
        ++n;
    }
    return n;
}

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// The `oracle verify` report: every curve computation checked against this
// module, with effort scaled to the group size.
inline std::vector<CheckResult> verify_curve(const CurveParams& curve, Rng& rng) {
    std::vector<CheckResult> out;
    auto check = [&out](std::string name, bool pass, std::string detail = "") {
        out.push_back(CheckResult{std::move(name), pass, std::move(detail)});
    };

    GroupTable table = enumerate(curve);
    check("enumeration x-scan/y-scan counts agree", true,
          std::to_string(table.order) + " elements incl. identity");

    bool closed = true;
    for (const auto& pt : table.points)
        if (!table.contains(naive_negate(curve, pt))) closed = false;
    check("table closed under negation", closed);

    bool core_membership = true;
    for (const auto& pt : table.points)
        if (!is_on_curve(curve, pt)) core_membership = false;
    check("every enumerated point passes is_on_curve", core_membership);

    const Int n = table.order;
    bool add_agrees = true;
    if (n <= 64) {
        for (const auto& lhs : table.points)
            for (const auto& rhs : table.points)
                if (!(add(curve, lhs, rhs) == naive_add(curve, lhs, rhs))) add_agrees = false;
        check("group law agrees with core on all pairs", add_agrees);
    } else {
        for (int i = 0; i < 20000; ++i) {
            const auto& lhs = table.points[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
            const auto& rhs = table.points[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
            if (!(add(curve, lhs, rhs) == naive_add(curve, lhs, rhs))) add_agrees = false;
        }
        check("group law agrees with core on 20000 sampled pairs", add_agrees);
    }

    bool commutes = true, inverse_law = true, identity_law = true;
    for (int i = 0; i < 5000; ++i) {
        const auto& lhs = table.points[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
        const auto& rhs = table.points[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
        if (!(naive_add(curve, lhs, rhs) == naive_add(curve, rhs, lhs))) commutes = false;
        if (!naive_add(curve, lhs, naive_negate(curve, lhs)).is_identity()) inverse_law = false;
        if (!(naive_add(curve, lhs, AffinePoint::identity()) == lhs)) identity_law = false;
    }
    check("commutativity (sampled)", commutes);
    check("P + (-P) = O", inverse_law);
    check("P + O = P", identity_law);

    bool assoc = true;
    for (int i = 0; i < 2000; ++i) {
        const auto& x = table.points[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
        const auto& y = table.points[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
        const auto& z = table.points[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
        if (!(naive_add(curve, naive_add(curve, x, y), z) ==
              naive_add(curve, x, naive_add(curve, y, z))))
            assoc = false;
    }
    check("associativity (sampled triples)", assoc);

    bool mul_agrees = true;
    if (n <= 64) {
        for (const auto& pt : table.points) {
            AffinePoint acc = AffinePoint::identity();
            for (Int k = 0; k <= n; ++k) {
                if (!(scalar_mul(curve, k, pt) == acc)) mul_agrees = false;
                acc = naive_add(curve, acc, pt);
            }
        }
        check("scalar_mul equals repeated addition, all k and points", mul_agrees);
    } else {
        for (int i = 0; i < 50; ++i) {
            const auto& pt = table.points[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
            Int k = uniform_int(rng, 0, std::min<Int>(n, 4000));
            if (!(scalar_mul(curve, k, pt) == naive_mul(table, k, pt))) mul_agrees = false;
        }
        check("scalar_mul equals repeated addition, sampled", mul_agrees);
    }

    // sqrt audit: every root squares back; per-x root counts add up to the
    // table size
    bool roots_square = true;
    Int counted = 1;
    Int sqrt_budget = std::min<Int>(curve.p(), 4096);
    for (Int s = 0; s < sqrt_budget; ++s) {
        for (Int r : sqrt_mod_p(curve.p(), s))
            if (raw::mulp(r, r, curve.p()) != raw::reduce(s, curve.p())) roots_square = false;
    }
    for (Int x = 0; x < curve.p(); ++x)
        counted += static_cast<Int>(sqrt_mod_p(curve.p(), raw::rhs_of(curve, x)).size());
    check("sqrt roots square back (prefix sweep)", roots_square);
    check("root counts sum to group order", counted == table.order,
          std::to_string(counted) + " vs " + std::to_string(table.order));

    bool lift_consistent = true;
    for (Int x = 0; x < std::min<Int>(curve.p(), 4096); ++x) {
        try {
            auto pair = lift_x(curve, x);
            if (!pair) continue;
            if (!(pair->p2 == negate(curve, pair->p1)) || pair->p1.y() >= pair->p2.y())
                lift_consistent = false;
            if (!table.contains(pair->p1) || !table.contains(pair->p2)) lift_consistent = false;
        } catch (const DegenerateX&) {
        }
    }
    check("lift_x pairs are negations, canonically oriented", lift_consistent);

    if (curve.base()) {
        Int ord = point_order(curve, *curve.base());
        check("base order matches point_order", curve.base_order() && *curve.base_order() == ord,
              "order " + std::to_string(ord));
        check("base order divides group order", table.order % ord == 0);
        check("order * G = O", naive_mul(table, ord, *curve.base()).is_identity());
    }

    if (n <= 64) {
        std::unordered_set<std::uint64_t> seen;
        for (int i = 0; i < 10000; ++i) {
            AffinePoint pt = random_point(curve, rng);
            if (pt.is_identity() || !table.contains(pt)) {
                seen.clear();
                break;
            }
            seen.insert((static_cast<std::uint64_t>(pt.x()) << 32) |
                        static_cast<std::uint64_t>(pt.y()));
        }
        check("random_point covers every non-identity element",
              static_cast<Int>(seen.size()) == n - 1,
              std::to_string(seen.size()) + " of " + std::to_string(n - 1));
    }

    return out;
}

}  // namespace ecot::oracle
