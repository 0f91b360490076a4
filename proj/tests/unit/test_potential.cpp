#include "gsi/potential.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace gsi {
namespace {

const FlatWallPotential canonical = FlatWallPotential::canonical();

TEST(FlatWall, WellBottomAndEntrance) {
    const PotentialSample bottom = canonical.eval(0.5);
    EXPECT_DOUBLE_EQ(bottom.value, 0.0);
    EXPECT_DOUBLE_EQ(bottom.slope, 0.0);
    EXPECT_DOUBLE_EQ(canonical.value(0.0), 1.0);
    EXPECT_DOUBLE_EQ(canonical.value(-3.0), 1.0);
}

TEST(FlatWall, ThreeQuartersOfTheLayer) {
    // frozen value; the oracle evaluates the rational square independently
    constexpr double expected = 4.0;
    EXPECT_NEAR(oracle::Well{}.W(0.75), expected, 1e-15);
    EXPECT_NEAR(canonical.value(0.75), expected, 1e-14);
}

TEST(FlatWall, HardWallIsOutsideTheDomain) {
    EXPECT_THROW((void)canonical.eval(1.0), DomainError);
    EXPECT_THROW((void)canonical.eval(1.5), DomainError);
}

TEST(FlatWall, ContinuationIsSmoothAcrossEntrance) {
    const PotentialSample in = canonical.eval(1e-9);
    const PotentialSample out = canonical.eval_continued(-1e-9);
    EXPECT_NEAR(in.value, out.value, 1e-7);
    EXPECT_NEAR(in.slope, out.slope, 1e-6);
}

TEST(FlatWallProperty, HypothesesOnRandomHeights) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> z(0.0, 0.999);
    for (int i = 0; i < 1000; ++i) {
        const double h = z(rng);
        const PotentialSample s = canonical.eval(h);
        EXPECT_GE(s.value, 0.0);
        if (h < 0.5) EXPECT_LT(s.slope, 0.0) << h;
        if (h > 0.5) EXPECT_GT(s.slope, 0.0) << h;
        // step shrinks towards both ends so the truncation error stays relative
        const double d = 1e-4 * std::min(h, 1.0 - h);
        if (h > 1e-3) {
            const double fd = (canonical.value(h + d) - canonical.value(h - d)) / (2 * d);
            EXPECT_NEAR(fd, s.slope, 1e-6 * std::max(1.0, std::abs(s.slope))) << h;
        }
    }
    EXPECT_GT(canonical.value(1.0 - 1e-8), 1e12);
}

TEST(Hypotheses, CanonicalPasses) {
    EXPECT_TRUE(validate_hypotheses(canonical, 1000).pass);
}

TEST(Hypotheses, WellOutsideLayerFailsH3) {
    const HypothesisReport r = validate_hypotheses(FlatWallPotential(1.0, 1.0, 1.2), 1000);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.violated, "H3");
}

TEST(Hypotheses, NegativeDepthFails) {
    EXPECT_FALSE(validate_hypotheses(FlatWallPotential(-1.0, 1.0, 0.5), 1000).pass);
}

TEST(Hypotheses, RoughLayerLargerThanCellFails) {
    EXPECT_FALSE(validate_hypotheses(PeriodicWallPotential(canonical, 1.0, 0.95, 0.1), 1000).pass);
    EXPECT_TRUE(validate_hypotheses(PeriodicWallPotential(canonical, 1.0, 0.8, 0.1), 1000).pass);
}

TEST(RoughWall, FlatWhenAmplitudeVanishes) {
    const PeriodicWallPotential p(canonical, 1.0, 1.0, 0.0);
    for (double y : {0.0, 0.3, 0.77}) {
        for (double z : {0.1, 0.5, 0.9}) {
            EXPECT_DOUBLE_EQ(p.eval(y, z).value, canonical.value(z));
            EXPECT_DOUBLE_EQ(p.eval(y, z).d_y, 0.0);
        }
    }
}

TEST(RoughWall, WellBottomCurve) {
    const PeriodicWallPotential p(canonical, 1.0, 0.8, 0.1);
    for (double y : {0.0, 0.25, 0.6}) EXPECT_NEAR(p.eval(y, p.well_position(y)).value, 0.0, 1e-15);
}

TEST(RoughWall, ChainRuleAtCrest) {
    // s(0) = 0.9, so V(0, 0.45 * 0.9) = W(0.45) and the z-slope carries 1 / 0.9
    const PeriodicWallPotential p(canonical, 1.0, 0.8, 0.1);
    const PeriodicPotentialSample s = p.eval(0.0, 0.45 * 0.9);
    const PotentialSample flat = canonical.eval(0.45);
    EXPECT_NEAR(s.value, flat.value, 1e-14);
    EXPECT_NEAR(s.d_z, flat.slope / 0.9, 1e-12);
    const double d = 1e-6, z = 0.45 * 0.9;
    const double fd = (p.eval(0.0, z + d).value - p.eval(0.0, z - d).value) / (2 * d);
    EXPECT_NEAR(s.d_z, fd, 1e-6 * std::abs(fd));
}

TEST(RoughWallProperty, PeriodicAndDifferentiable) {
    const PeriodicWallPotential p(canonical, 1.0, 0.8, 0.1);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> uy(0.0, 1.0), uz(0.0, 0.95);
    for (int i = 0; i < 500; ++i) {
        const double y = uy(rng), z = uz(rng) * p.wall_position(y) * 0.95;
        const PeriodicPotentialSample s = p.eval(y, z);
        const PeriodicPotentialSample shifted = p.eval(y + 1.0, z);
        EXPECT_NEAR(s.value, shifted.value, 1e-14 * std::max(1.0, s.value));
        const double d = 1e-6;
        const double fy = (p.eval(y + d, z).value - p.eval(y - d, z).value) / (2 * d);
        const double fz = (p.eval(y, z + d).value - p.eval(y, z - d).value) / (2 * d);
        EXPECT_NEAR(s.d_y, fy, 1e-6 * std::max(1.0, std::abs(fy)));
        EXPECT_NEAR(s.d_z, fz, 1e-6 * std::max(1.0, std::abs(fz)));
        EXPECT_DOUBLE_EQ(p.eval(y, -0.5).value, 1.0);
    }
}

TEST(RoughWall, ReducePeriod) {
    EXPECT_DOUBLE_EQ(reduce_period(1.25), 0.25);
    EXPECT_DOUBLE_EQ(reduce_period(-0.25), 0.75);
    EXPECT_GE(reduce_period(-1e-18), 0.0);
    EXPECT_LT(reduce_period(-1e-18), 1.0);
}

} // namespace
} // namespace gsi
