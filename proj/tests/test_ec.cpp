#include <gtest/gtest.h>

#include <set>

#include "ecot/ec.hpp"
#include "ecot/oracle.hpp"
#include "ecot/session.hpp"

using namespace ecot;

namespace {

const CurveParams& e23() {
    static CurveParams c = presets::e23();
    return c;
}

AffinePoint pt(Int x, Int y) { return AffinePoint::at(x, y); }

}  // namespace

TEST(CurveParams, RejectsBadParameters) {
    EXPECT_THROW(CurveParams(21, 9, 21), InvalidCurve);  // composite
    EXPECT_THROW(CurveParams(3, 1, 1), InvalidCurve);    // too small
    EXPECT_THROW(CurveParams(23, 0, 0), InvalidCurve);   // singular: 4a^3+27b^2 = 0
    EXPECT_THROW(CurveParams(Int{1} << 32, 9, 21), InvalidCurve);
}

TEST(CurveParams, ValidatesBasePoint) {
    EXPECT_THROW(CurveParams(23, 9, 21, pt(7, 7), 33), InvalidCurve);   // off curve
    EXPECT_THROW(CurveParams(23, 9, 21, pt(2, 1), 32), InvalidCurve);   // wrong order
    EXPECT_THROW(CurveParams(23, 9, 21, pt(2, 1), 66), InvalidCurve);   // not minimal
    EXPECT_NO_THROW(CurveParams(23, 9, 21, pt(2, 1), 33));
}

TEST(CurveParams, ReducesCoefficients) {
    CurveParams c(23, 9 + 23, 21 - 23);
    EXPECT_EQ(c.a(), 9);
    EXPECT_EQ(c.b(), 21);
}

TEST(IsOnCurve, MatchesCurveEquation) {
    EXPECT_TRUE(is_on_curve(e23(), pt(7, 6)));
    EXPECT_TRUE(is_on_curve(e23(), AffinePoint::identity()));
    EXPECT_FALSE(is_on_curve(e23(), pt(7, 7)));  // 7^2 = 3 != rhs(7) = 13 (mod 23)
}

TEST(IsOnCurve, RejectsUnreducedCoordinates) {
    EXPECT_FALSE(is_on_curve(e23(), pt(7 + 23, 6)));
    EXPECT_FALSE(is_on_curve(e23(), pt(7, 6 + 23)));
    EXPECT_FALSE(is_on_curve(e23(), pt(-16, 6)));
}

TEST(Negate, MatchesSymmetry) {
    EXPECT_EQ(negate(e23(), pt(7, 6)), pt(7, 17));
    EXPECT_EQ(negate(e23(), AffinePoint::identity()), AffinePoint::identity());
    EXPECT_EQ(negate(e23(), pt(2, 1)), pt(2, 22));
    EXPECT_THROW(negate(e23(), pt(7, 7)), InvalidPoint);
}

TEST(Negate, FixesOrderTwoPoints) {
    CurveParams c = presets::e1009();
    EXPECT_EQ(negate(c, pt(992, 0)), pt(992, 0));
}

TEST(Add, CoversEveryCase) {
    EXPECT_EQ(add(e23(), pt(7, 6), pt(7, 17)), AffinePoint::identity());
    EXPECT_EQ(add(e23(), AffinePoint::identity(), pt(2, 1)), pt(2, 1));
    EXPECT_EQ(add(e23(), pt(13, 9), pt(7, 17)), pt(15, 9));
    EXPECT_THROW(add(e23(), pt(7, 7), pt(2, 1)), InvalidPoint);
    EXPECT_THROW(add(e23(), pt(2, 1), pt(7, 7)), InvalidPoint);

    CurveParams c = presets::e1009();
    EXPECT_EQ(add(c, pt(992, 0), pt(992, 0)), AffinePoint::identity());
}

TEST(ScalarMul, MatchesWorkedValues) {
    EXPECT_EQ(scalar_mul(e23(), 5, pt(7, 6)), pt(11, 18));
    EXPECT_EQ(scalar_mul(e23(), 3, pt(2, 1)), pt(14, 19));
    EXPECT_EQ(scalar_mul(e23(), 0, pt(7, 6)), AffinePoint::identity());
    EXPECT_EQ(scalar_mul(e23(), 1, pt(7, 6)), pt(7, 6));
    EXPECT_EQ(scalar_mul(e23(), 5, pt(7, 17)), pt(11, 5));  // k(-P) = -(kP)
    EXPECT_THROW(scalar_mul(e23(), -1, pt(7, 6)), OutOfRange);
    EXPECT_THROW(scalar_mul(e23(), 2, pt(7, 7)), InvalidPoint);
}

TEST(ScalarMul, AgreesWithRepeatedAddition) {
    auto table = oracle::enumerate(e23());
    for (const auto& point : table.points) {
        AffinePoint acc = AffinePoint::identity();
        for (Int k = 0; k <= table.order; ++k) {
            EXPECT_EQ(scalar_mul(e23(), k, point), acc);
            acc = add(e23(), acc, point);
        }
    }
}

TEST(ScalarMul, IsAdditiveInTheScalar) {
    Rng rng(7);
    auto table = oracle::enumerate(e23());
    for (const auto& point : table.points) {
        for (int i = 0; i < 16; ++i) {
            Int k1 = uniform_int(rng, 0, 100), k2 = uniform_int(rng, 0, 100);
            EXPECT_EQ(scalar_mul(e23(), k1 + k2, point),
                      add(e23(), scalar_mul(e23(), k1, point), scalar_mul(e23(), k2, point)));
        }
    }
}

TEST(GroupLaws, HoldExhaustivelyOnTheSmallCurve) {
    auto table = oracle::enumerate(e23());
    ASSERT_EQ(table.order, 33);
    for (const auto& lhs : table.points) {
        EXPECT_EQ(add(e23(), lhs, AffinePoint::identity()), lhs);
        EXPECT_TRUE(add(e23(), lhs, negate(e23(), lhs)).is_identity());
        for (const auto& rhs : table.points) {
            AffinePoint sum = add(e23(), lhs, rhs);
            EXPECT_EQ(sum, add(e23(), rhs, lhs));
            EXPECT_TRUE(is_on_curve(e23(), sum));
        }
    }
    // associativity over every triple (33^3 stays cheap)
    for (const auto& x : table.points)
        for (const auto& y : table.points)
            for (const auto& z : table.points)
                ASSERT_EQ(add(e23(), add(e23(), x, y), z), add(e23(), x, add(e23(), y, z)));
}

TEST(SqrtModP, MatchesKnownRoots) {
    EXPECT_EQ(sqrt_mod_p(23, 13), (std::vector<Int>{6, 17}));
    EXPECT_EQ(sqrt_mod_p(23, 0), (std::vector<Int>{0}));
    EXPECT_TRUE(sqrt_mod_p(23, 5).empty());  // 5 is a non-residue mod 23
}

TEST(SqrtModP, ExhaustiveOnBothResidueClasses) {
    // 23 and 10007 take the (p+1)/4 shortcut; 1009 = 1 (mod 4) runs
    // Tonelli-Shanks
    for (Int p : {Int{23}, Int{1009}}) {
        Int with_two = 0, with_one = 0, without = 0;
        for (Int s = 0; s < p; ++s) {
            auto roots = sqrt_mod_p(p, s);
            for (Int r : roots) {
                EXPECT_EQ(modmath::mul(r, r, p), s);
                EXPECT_GE(r, 0);
                EXPECT_LT(r, p);
            }
            if (roots.size() == 2) {
                EXPECT_LT(roots[0], roots[1]);
                ++with_two;
            } else if (roots.size() == 1) {
                ++with_one;
            } else {
                ++without;
            }
        }
        // squaring is 2-to-1 away from zero
        EXPECT_EQ(with_one, 1);
        EXPECT_EQ(with_two, (p - 1) / 2);
        EXPECT_EQ(without, (p - 1) / 2);
    }
}

TEST(LiftX, ProducesTheCanonicalPair) {
    auto pair = lift_x(e23(), 7);
    ASSERT_TRUE(pair.has_value());
    EXPECT_EQ(pair->x, 7);
    EXPECT_EQ(pair->p1, pt(7, 6));
    EXPECT_EQ(pair->p2, pt(7, 17));
}

TEST(LiftX, NonResidueGivesNothing) {
    EXPECT_FALSE(lift_x(e23(), 5).has_value());
}

TEST(LiftX, RejectsDegenerateX) {
    CurveParams flat(23, 9, 0);  // rhs(0) = 0
    EXPECT_THROW(lift_x(flat, 0), DegenerateX);
    EXPECT_THROW(lift_x(presets::e1009(), 992), DegenerateX);
}

TEST(LiftX, PairsAreNegationsEverywhere) {
    for (Int x = 0; x < 23; ++x) {
        std::optional<XPair> pair;
        try {
            pair = lift_x(e23(), x);
        } catch (const DegenerateX&) {
            continue;
        }
        if (!pair) continue;
        EXPECT_EQ(pair->p2, negate(e23(), pair->p1));
        EXPECT_LT(pair->p1.y(), pair->p2.y());
    }
}

TEST(PointOrder, MatchesTheOracle) {
    auto table = oracle::enumerate(e23());
    EXPECT_EQ(point_order(e23(), pt(7, 6)), oracle::naive_order(table, pt(7, 6)));
    EXPECT_EQ(point_order(e23(), pt(7, 6)), 33);
    EXPECT_TRUE(scalar_mul(e23(), point_order(e23(), pt(2, 1)), pt(2, 1)).is_identity());
    for (const auto& point : table.points) {
        if (point.is_identity()) continue;
        EXPECT_EQ(table.order % point_order(e23(), point), 0);  // Lagrange
    }
    EXPECT_THROW(point_order(e23(), AffinePoint::identity()), InvalidPoint);
    EXPECT_THROW(point_order(e23(), pt(7, 7)), InvalidPoint);
}

TEST(RandomPoint, CoversTheWholeGroup) {
    auto table = oracle::enumerate(e23());
    Rng rng(11);
    std::set<std::pair<Int, Int>> seen;
    for (int i = 0; i < 10000; ++i) {
        AffinePoint point = random_point(e23(), rng);
        ASSERT_FALSE(point.is_identity());
        ASSERT_TRUE(is_on_curve(e23(), point));
        seen.emplace(point.x(), point.y());
    }
    EXPECT_EQ(static_cast<Int>(seen.size()), table.order - 1);
}

TEST(RandomPoint, HandlesSingleRootXs) {
    // E_1009(9,21) has the y = 0 point at x = 992; sampling must still
    // produce valid points (and may legitimately emit (992,0))
    CurveParams c = presets::e1009();
    Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        AffinePoint point = random_point(c, rng);
        ASSERT_TRUE(is_on_curve(c, point));
        ASSERT_FALSE(point.is_identity());
    }
}

TEST(Presets, BaseOrdersAreExact) {
    EXPECT_EQ(point_order(presets::e23(), *presets::e23().base()), 33);
    EXPECT_EQ(point_order(presets::e1009(), *presets::e1009().base()), 1038);
    EXPECT_EQ(point_order(presets::e10007(), *presets::e10007().base()), 10006);
    EXPECT_EQ(point_order(presets::e1048583(), *presets::e1048583().base()), 1048595);
}
