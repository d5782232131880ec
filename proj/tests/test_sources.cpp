#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bsasym/sources.hpp"

using namespace bsasym;

TEST(SourceEval, Examples) {
    EXPECT_DOUBLE_EQ(eval(RadialCone{1.6}, {0, 0}), 1.6);
    EXPECT_EQ(eval(L1Cone{2.0}, {1, 1}), 0.0);
    EXPECT_DOUBLE_EQ(eval(TwinCones{1.2, 0.0}, {0, 0}), 2.4);
    EXPECT_EQ(eval(BallIndicator{0.2}, {0.1, 0}), 1.0);
    EXPECT_EQ(eval(BallIndicator{0.2}, {0.3, 0}), 0.0);
    EXPECT_EQ(eval(TwinBallIndicator{0.2, 0.8}, {-0.7, 0.1}), 1.0);
    EXPECT_EQ(eval(TwinBallIndicator{0.2, 0.8}, {0.0, 0.0}), 0.0);
}

TEST(SourceMetadata, ClosedForms) {
    EXPECT_EQ(max_value(RadialCone{1.6}), 1.6);
    EXPECT_EQ(support_radius(RadialCone{1.6}), 1.6);
    EXPECT_EQ(max_value(TwinCones{1.2, 1.5}), 1.2);
    EXPECT_DOUBLE_EQ(support_radius(TwinCones{1.2, 1.5}), 2.7);
    EXPECT_EQ(max_value(BallIndicator{0.2}), 1.0);
    EXPECT_EQ(support_radius(BallIndicator{0.2}), 0.2);
    EXPECT_EQ(lipschitz_bound(RadialCone{1.0}), 1.0);
    EXPECT_DOUBLE_EQ(lipschitz_bound(L1Cone{1.0}), std::numbers::sqrt2);
    EXPECT_TRUE(std::isinf(lipschitz_bound(BallIndicator{0.2})));
}

TEST(SourceMetadata, OverlappingTwinConesMaxMatchesDenseScan) {
    const TwinCones tc{1.2, 0.3};
    double best = 0.0;
    for (int k = 0; k <= 60000; ++k) {
        const double x = -3.0 + 6.0 * k / 60000.0;
        best = std::max(best, eval(tc, {x, 0.0}));
    }
    EXPECT_NEAR(max_value(tc), best, 1e-12);
    EXPECT_NEAR(best, 1.8, 1e-12);
}

TEST(SourceProperties, BoundedBySupAndZeroOutsideSupport) {
    const std::vector<SourceTerm> all{RadialCone{1.6}, L1Cone{2.0}, TwinCones{1.2, 0.3}, TwinCones{0.8, 1.0},
                                      BallIndicator{0.2}, TwinBallIndicator{0.2, 0.8},
                                      RadialTable{{0.0, 1.0, 2.0}, {1.0, 0.5, 0.0}}};
    const GridSpec g(2.56, 64);
    for (const auto& s : all) {
        const Field f = sample_to_field(s, g);
        EXPECT_LE(sup(f), max_value(s) + 1e-15);
        EXPECT_GE(inf(f), 0.0);
        // The maximum is attained on the grid to within one cell's worth of slope.
        const double slope = std::isfinite(lipschitz_bound(s)) ? lipschitz_bound(s) : 0.0;
        EXPECT_GE(sup(f), max_value(s) - slope * g.dx() * std::numbers::sqrt2 - 1e-12);
        const int N = g.index_radius();
        for (int j = -N; j <= N; ++j)
            for (int i = -N; i <= N; ++i)
                if (norm(node_coord(g, i, j)) > support_radius(s)) { ASSERT_EQ(f.at(i, j), 0.0); }
    }
}

TEST(SourceProperties, RadialVariantsAreRotationInvariant) {
    const std::vector<SourceTerm> radial{RadialCone{1.3}, BallIndicator{0.5}, TwinCones{1.2, 0.0},
                                         RadialTable{{0.0, 2.0}, {1.0, 0.0}}};
    for (const auto& s : radial) {
        EXPECT_TRUE(is_radial(s));
        for (double a = 0.0; a < 6.3; a += 0.37) {
            const Point p{0.9 * std::cos(a), 0.9 * std::sin(a)};
            EXPECT_NEAR(eval(s, p), eval(s, {0.9, 0.0}), 1e-12);
        }
    }
    EXPECT_FALSE(is_radial(L1Cone{1.0}));
}

TEST(RadialTable, InterpolatesAndVanishesBeyond) {
    const RadialTable t{{0.0, 1.0, 2.0}, {2.0, 1.0, 0.0}};
    EXPECT_DOUBLE_EQ(t.at(0.5), 1.5);
    EXPECT_EQ(t.at(2.5), 0.0);
    EXPECT_EQ(lipschitz_bound(t), 1.0);
    EXPECT_TRUE(std::isinf(lipschitz_bound(RadialTable{{0.0, 1.0}, {1.0, 1.0}})));
}

TEST(RadialTable, LoadsCsvAndRejectsBadInput) {
    const auto dir = std::filesystem::temp_directory_path();
    const auto good = dir / "bsasym_table_good.csv";
    std::ofstream(good) << "radius,value\n0,1.5\n1,0.5\n2,0\n";
    const RadialTable t = load_radial_table(good.string());
    ASSERT_EQ(t.radii.size(), 3u);
    EXPECT_EQ(t.values[0], 1.5);
    const auto bad = dir / "bsasym_table_bad.csv";
    std::ofstream(bad) << "0,1\n0,2\n";
    EXPECT_THROW(load_radial_table(bad.string()), ConfigError);
    EXPECT_THROW(load_radial_table((dir / "does_not_exist.csv").string()), ConfigError);
}

TEST(SourceValidation, RejectsInvalid) {
    EXPECT_THROW(validate(RadialCone{-1.0}), ConfigError);
    EXPECT_THROW(validate(BallIndicator{0.0}), ConfigError);
    EXPECT_THROW(validate(TwinCones{1.0, -0.1}), ConfigError);
    EXPECT_THROW(validate(RadialTable{{0.0, 1.0}, {1.0, -1.0}}), ConfigError);
}
