#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bsasym/oracles.hpp"

using namespace bsasym;

namespace {
double cone(double r, double x) { return std::max(r - x, 0.0); }
}  // namespace

TEST(Speeds, RadialCone) {
    EXPECT_NEAR(speed_radial_cone(1.6), 0.6, 1e-15);
    EXPECT_EQ(speed_radial_cone(0.8), 0.0);
    EXPECT_EQ(speed_radial_cone(1.0), 0.0);
    EXPECT_THROW(speed_radial_cone(-0.1), ContractViolation);
}

TEST(Speeds, RadialMaximumBeyondCriticalRadius) {
    EXPECT_NEAR(speed_radial([](double r) { return cone(1.6, r); }, 1.6, 2, 0.01), 0.6, 1e-12);
    EXPECT_EQ(speed_radial([](double r) { return cone(0.9, r); }, 0.9, 2, 0.01), 0.0);
    EXPECT_EQ(speed_radial([](double r) { return r <= 4.0 ? 2.5 : 0.0; }, 4.0, 3, 0.01), 2.5);
    const RadialTable t{{0.0, 1.0, 1.6}, {1.6, 0.6, 0.0}};
    EXPECT_NEAR(speed_radial(t, 2), 0.6, 1e-12);
}

TEST(Speeds, RadialAgreesWithConeFormula) {
    for (double r = 0.0; r <= 3.0; r += 0.1)
        EXPECT_NEAR(speed_radial([r](double x) { return cone(r, x); }, r, 2, 0.01), speed_radial_cone(r), 1e-12) << r;
}

TEST(Speeds, PositiveVelocity) {
    EXPECT_EQ(speed_positive_velocity(RadialCone{1.6}), 1.6);
    EXPECT_EQ(speed_positive_velocity(BallIndicator{0.2}), 1.0);
    EXPECT_EQ(speed_positive_velocity(RadialCone{0.0}), 0.0);
}

TEST(SpeedClaims, L1Cone) {
    EXPECT_EQ(speed_claim_l1(0.9), SpeedClaim::zero());
    EXPECT_EQ(speed_claim_l1(1.2), SpeedClaim::positive());
    const SpeedClaim c = speed_claim_l1(2.0);
    EXPECT_EQ(c.kind, SpeedClaim::Kind::lower_bound);
    EXPECT_NEAR(c.value, 2.0 - std::numbers::sqrt2, 1e-15);
    EXPECT_EQ(speed_claim_l1(1.0), SpeedClaim::unknown());
}

TEST(SpeedClaims, TwinCones) {
    EXPECT_EQ(speed_claim_twin(0.8, 0.1), SpeedClaim::zero());
    EXPECT_EQ(speed_claim_twin(0.8, 1.0), SpeedClaim::zero());
    EXPECT_EQ(speed_claim_twin(0.8, 0.5), SpeedClaim::unknown());
    const SpeedClaim a = speed_claim_twin(1.2, 0.0);
    EXPECT_EQ(a.kind, SpeedClaim::Kind::exact);
    EXPECT_NEAR(a.value, 0.4, 1e-15);
    const SpeedClaim b = speed_claim_twin(1.2, 1.5);
    EXPECT_NEAR(b.value, 0.2, 1e-15);
    EXPECT_EQ(speed_claim_twin(1.2, 0.6), SpeedClaim::unknown());
}

TEST(SpeedClaims, Satisfaction) {
    EXPECT_TRUE(SpeedClaim::exact(0.4).satisfied_by(0.45, 0.1));
    EXPECT_FALSE(SpeedClaim::lower_bound(0.5).satisfied_by(0.3, 0.1));
    EXPECT_TRUE(SpeedClaim::zero().satisfied_by(0.01, 0.05));
    EXPECT_FALSE(SpeedClaim::positive().satisfied_by(0.01, 0.05));
    EXPECT_TRUE(SpeedClaim::unknown().satisfied_by(7.0, 0.0));
}

TEST(Volcano, ProfileBranches) {
    const double R0 = 0.2, lam = 0.5, Lam = 5.05;
    EXPECT_EQ(volcano_profile(R0, 1.0, R0, lam, Lam), 1.0);
    EXPECT_NEAR(volcano_profile(std::numbers::e * R0, 2.0, R0, lam, Lam), 1.0, 1e-12);
    EXPECT_EQ(volcano_profile(1.0, 0.0, R0, lam, Lam), 0.0);
    EXPECT_THROW(volcano_profile(1.0, 1.0, R0, 0.5, 0.202), ConfigError);
    EXPECT_THROW(volcano_profile(1.0, 1.0, R0, 0.5, 4.0), ConfigError);
}

TEST(Volcano, ProfileIsContinuousMonotoneAndBounded) {
    const double R0 = 0.2, lam = 0.5, Lam = 5.05;
    const double h = 1e-3;
    for (double t = 0.0; t <= 4.0; t += 0.05) {
        for (double r = 0.0; r <= 5.0; r += 0.01) {
            const double v = volcano_profile(r, t, R0, lam, Lam);
            ASSERT_LE(v, t + 1e-15);
            ASSERT_GE(v, 0.0);
            ASSERT_GE(volcano_profile(r, t + h, R0, lam, Lam), v - 1e-15);
            ASSERT_LE(volcano_profile(r + h, t, R0, lam, Lam), v + 1e-15);
            ASSERT_NEAR(volcano_profile(r + h, t, R0, lam, Lam), v, 1.01 * h / R0);
            ASSERT_NEAR(volcano_profile(r, t + h, R0, lam, Lam), v, 1.01 * h);
        }
    }
}

TEST(Volcano, FujiFieldMatchesProfileInsideCutoff) {
    const double R0 = 0.2, lam = 0.5, Lam = 5.05;
    EXPECT_EQ(fuji_field({R0, 0.0}, 0.7, R0), 0.7);
    EXPECT_EQ(fuji_field({0.5, 0.5}, 0.0, R0), 0.0);
    EXPECT_NEAR(fuji_field({R0 * std::exp(1.3), 0.0}, 1.3, R0), 0.0, 1e-12);
    for (double t = 0.0; t <= 3.0; t += 0.1)
        for (double r = 0.01; r <= 1.0 / lam; r += 0.01)
            ASSERT_NEAR(fuji_field({r * 0.6, r * 0.8}, t, R0), volcano_profile(r, t, R0, lam, Lam), 1e-12);
}

TEST(Volcano, TwinTarget) {
    const double R0 = 0.2;
    const Point a{0.8, 0.0};
    EXPECT_NEAR(twin_target({0.8 + R0, 0.0}, 1.0, R0, a), 1.0, 1e-12);
    EXPECT_EQ(twin_target({0.0, 1.5}, 0.0, R0, a), 0.0);
    EXPECT_EQ(twin_target({0.0, 2.0}, 0.5, R0, a), 0.0);
}

TEST(ValueFunction, TrivialCases) {
    const auto f = [](double r) { return cone(1.6, r); };
    const RadialProfile zero_T = value_function_radial(f, 2, 4.0, 0.02, 0.02, 0.0);
    for (double v : zero_T.values) EXPECT_EQ(v, 0.0);
    const RadialProfile zero_f = value_function_radial([](double) { return 0.0; }, 2, 4.0, 0.02, 0.02, 3.0);
    for (double v : zero_f.values) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(value_function_radial(f, 2, 4.0, 0.01, 0.02, 1.0), ConfigError);
}

TEST(ValueFunction, MonotoneInTimeAndBounded) {
    const auto f = [](double r) { return cone(1.6, r); };
    const RadialProfile a = value_function_radial(f, 2, 6.0, 0.02, 0.02, 2.0);
    const RadialProfile b = value_function_radial(f, 2, 6.0, 0.02, 0.02, 4.0);
    for (std::size_t m = 0; m < a.size(); ++m) {
        EXPECT_LE(a.values[m], b.values[m] + 1e-12);
        EXPECT_LE(b.values[m], 1.6 * 4.0 + 1e-12);
    }
}

TEST(ValueFunction, ConeSpeed) {
    const auto f = [](double r) { return cone(1.6, r); };
    const RadialProfile phi = value_function_radial(f, 2, 8.0, 0.01, 0.01, 20.0);
    const double m = *std::max_element(phi.values.begin(), phi.values.end());
    EXPECT_NEAR(m / 20.0, 0.6, 0.05);
}

TEST(Circle, StationaryAndShortTime) {
    EXPECT_EQ(circle_radius(1.0, 3.0), 1.0);
    const double t = 1e-3;
    EXPECT_NEAR(circle_radius(2.0, t), 2.0 + t / 2.0, 1e-6);
}

TEST(Circle, MatchesImplicitSolution) {
    // For rho0 > 1: t = rho - rho0 + ln((rho - 1)/(rho0 - 1)).
    for (double t : {0.25, 0.5, 1.0, 3.0}) {
        const double rho = circle_radius(2.0, t);
        EXPECT_NEAR(rho - 2.0 + std::log(rho - 1.0), t, 1e-10);
    }
}

TEST(Circle, MonotoneOnEachSideOfTheFixedPoint) {
    double up = 1.5, down = 0.9;
    for (double t = 0.1; t <= 1.0; t += 0.1) {
        const double u = circle_radius(1.5, t), d = circle_radius(0.9, t);
        EXPECT_GT(u, up);
        EXPECT_LT(d, down);
        up = u;
        down = d;
    }
}

TEST(Circle, CollapseTimeIsStepConsistent) {
    const double coarse = circle_collapse_time(0.5, 1e-4);
    const double fine = circle_collapse_time(0.5, 5e-5);
    EXPECT_NEAR(coarse, fine, 1e-6);
    // Bisection on the finer step: the largest time that still integrates without collapse.
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 50; ++k) {
        const double mid = 0.5 * (lo + hi);
        try {
            circle_radius(0.5, mid, 5e-5);
            lo = mid;
        } catch (const CollapseError&) {
            hi = mid;
        }
    }
    EXPECT_NEAR(lo, coarse, 1e-6);
    try {
        circle_radius(0.5, 1.0);
        FAIL() << "expected collapse";
    } catch (const CollapseError& e) {
        EXPECT_NEAR(e.collapse_time(), coarse, 1e-12);
    }
}
