#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bsasym/analysis.hpp"

using namespace bsasym;

namespace {

const GridSpec kGrid(1.0, 10);

SpeedSeries series_of(double (*m)(double)) {
    SpeedSeries s;
    for (int k = 1; k <= 20; ++k) {
        const double t = 0.5 * k;
        s.push({t, m(t) / t, m(t), 0.0});
    }
    return s;
}

}  // namespace

TEST(SpeedEstimate, ConstantAndScaling) {
    EXPECT_DOUBLE_EQ(speed_estimate(Field(kGrid, 5.0), 10.0), 0.5);
    EXPECT_EQ(speed_estimate(Field(kGrid), 1.0), 0.0);
    const Field u = Field::sample(kGrid, [](Point x) { return x.x1 * x.x1 + 1.0; });
    EXPECT_NEAR(speed_estimate(u * 3.0, 2.0), 1.5 * speed_estimate(u, 1.0), 1e-14);
    EXPECT_THROW(speed_estimate(u, 0.0), ContractViolation);
}

TEST(L2Error, ExactSpeedGivesZero) {
    EXPECT_NEAR(l2_error(Field(kGrid, 3.0), 2.0, 1.5), 0.0, 1e-15);
    // Uniform offset e: sqrt(sum e^2 dx^2) / (2R)^2 = e sqrt(M) dx / 4 with M = 21^2 nodes.
    const double e = 0.25;
    EXPECT_NEAR(l2_error(Field(kGrid, 2.0 * (1.0 + e)), 2.0, 1.0), e * 21.0 * kGrid.dx() / 4.0, 1e-14);
}

TEST(SpeedSeries, RequiresIncreasingTimes) {
    SpeedSeries s;
    s.push({1.0, 0, 0, 0});
    EXPECT_THROW(s.push({1.0, 0, 0, 0}), ContractViolation);
    std::ostringstream os;
    write_csv(os, s, "echo");
    EXPECT_EQ(os.str().substr(0, 6), "# echo");
    EXPECT_NE(os.str().find("t,c_delta,m_sup,grad_max\n"), std::string::npos);
}

TEST(Subadditivity, Examples) {
    EXPECT_TRUE(subadditivity_report(series_of([](double t) { return 0.6 * t; }), 1e-12).empty());
    EXPECT_TRUE(subadditivity_report(series_of([](double t) { return std::sqrt(t); }), 0.0).empty());
    const auto v = subadditivity_report(series_of([](double t) { return t * t; }), 0.0);
    ASSERT_FALSE(v.empty());
    EXPECT_GT(v.front().m_ts, v.front().m_t + v.front().m_s);
    // The relative tolerance absorbs a mild superlinear excess.
    EXPECT_TRUE(subadditivity_report(series_of([](double t) { return t + 0.001 * t * t; }), 0.0, 0.05).empty());
}

TEST(FitLine, ExactAndDegenerate) {
    std::vector<XY> pts;
    for (double x : {1.6, 1.7, 1.8, 1.9, 2.0}) pts.push_back({x, 0.966253713 * x - 1.238608703});
    const LineFit f = fit_line(pts);
    EXPECT_NEAR(f.slope, 0.966253713, 1e-12);
    EXPECT_NEAR(f.intercept, -1.238608703, 1e-12);
    EXPECT_EQ(f.n_points, 5u);
    EXPECT_NEAR(f.residual_l2, 0.0, 1e-12);
    EXPECT_THROW(fit_line({{1.0, 2.0}}), AnalysisError);
    EXPECT_THROW(fit_line({{1.0, 2.0}, {1.0, 3.0}}), AnalysisError);
}

TEST(FitLine, KnownResidual) {
    const LineFit f = fit_line({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}});
    EXPECT_NEAR(f.slope, 0.0, 1e-15);
    EXPECT_NEAR(f.intercept, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(f.residual_l2, std::sqrt(2.0 / 3.0), 1e-15);
}

TEST(LevelRadius, ConeAndFlat) {
    const GridSpec g(2.56, 64);
    const Field u = Field::sample(g, [](Point x) { return 2.0 - norm(x); });
    EXPECT_NEAR(level_radius(u, 0.0), 2.0, 1e-12);
    EXPECT_NEAR(level_radius(u, 1.0), 1.0, 1e-12);
    const auto rays = level_radius_rays(u, 0.3);
    for (double r : rays) EXPECT_NEAR(r, rays[0], 1e-12);
    EXPECT_THROW(level_radius(Field(g, 1.0), 0.0), AnalysisError);
}

TEST(Monitor, ZeroSourceZeroState) {
    MonitorTolerances tol;
    tol.M_f = 0.0;
    tol.lipschitz = 0.0;
    tol.dx = 0.1;
    InvariantMonitor m(tol);
    for (int k = 1; k <= 4; ++k) m.observe(0.5 * k, Field(kGrid), 0.0);
    EXPECT_TRUE(m.all_passed());
    for (const auto& c : m.report()) {
        EXPECT_TRUE(c.passed) << c.name;
        if (c.name == "space_lipschitz") {
            EXPECT_EQ(c.worst_margin, tol.grad_slack);
        } else if (c.name != "subadditivity") {
            EXPECT_EQ(c.worst_margin, 0.0) << c.name;
        }
    }
}

TEST(Monitor, LinearGrowthPassesAndSpikeFails) {
    MonitorTolerances tol;
    tol.M_f = 1.0;
    tol.lipschitz = std::numeric_limits<double>::infinity();
    tol.dx = kGrid.dx();
    InvariantMonitor good(tol), bad(tol);
    for (int k = 1; k <= 8; ++k) {
        const double t = 0.5 * k;
        good.observe(t, Field(kGrid, t), 1.0);
        Field spiked(kGrid, t);
        if (k == 4) spiked.at(3, -2) = t + 2.0;  // beyond the 10 dx = 1 growth tolerance
        bad.observe(t, spiked, 1.0);
    }
    EXPECT_TRUE(good.all_passed());
    EXPECT_FALSE(bad.all_passed());
    bool growth_failed = false;
    for (const auto& c : bad.report()) {
        if (c.name == "u_growth_bound") {
            growth_failed = !c.passed;
            EXPECT_NEAR(c.worst_margin, -2.0, 1e-12);
        }
        if (c.name == "space_lipschitz") { EXPECT_FALSE(c.enabled); }
    }
    EXPECT_TRUE(growth_failed);
}

TEST(Monitor, RateAndMonotonicity) {
    MonitorTolerances tol;
    tol.M_f = 1.0;
    tol.lipschitz = std::numeric_limits<double>::infinity();
    tol.dx = kGrid.dx();
    InvariantMonitor fast(tol);
    fast.observe(1.0, Field(kGrid, 0.5), 1.5);
    InvariantMonitor shrinking(tol);
    shrinking.observe(1.0, Field(kGrid, 0.5));
    shrinking.observe(2.0, Field(kGrid, 0.4));
    for (const auto& c : fast.report())
        if (c.name == "time_lipschitz") { EXPECT_FALSE(c.passed); }
    for (const auto& c : shrinking.report())
        if (c.name == "sup_nondecreasing") { EXPECT_FALSE(c.passed); }
}

TEST(Comparison, Margin) {
    const Field a(kGrid, 1.0);
    Field b(kGrid, 2.0);
    EXPECT_EQ(comparison_margin(a, b), 1.0);
    b.at(0, 0) = 0.5;
    EXPECT_EQ(comparison_margin(a, b), -0.5);
}
