#include "gsi/kinematics.hpp"
#include "gsi/phonon.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace gsi {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
const FlatWallPotential canonical = FlatWallPotential::canonical();
const oracle::Well well{};
const numerics::QuadratureSpec spec{};

TEST(EquivalentVelocity, Examples) {
    EXPECT_DOUBLE_EQ(equivalent_velocity(canonical, 0.5, -1.0), -1.0);
    EXPECT_NEAR(equivalent_velocity(canonical, 0.0, 1.0), std::sqrt(2.0), 1e-15);
    // height with W = 3, between z_m and 0.75
    const double z3 = well.right_turn(std::sqrt(3.0));
    EXPECT_NEAR(equivalent_velocity(canonical, z3, 1.0), 2.0, 1e-12);
    EXPECT_NEAR(physical_velocity(canonical, z3, 2.0), 1.0, 1e-12);
    EXPECT_NEAR(physical_velocity(canonical, 0.0, -std::sqrt(2.0)), -1.0, 1e-15);
    EXPECT_GT(equivalent_velocity(canonical, 0.5, 0.0), -1e-300);
}

TEST(EquivalentVelocity, InadmissibleStateIsRejected) {
    EXPECT_THROW((void)physical_velocity(canonical, 0.0, 0.5), DomainError);
}

TEST(EquivalentVelocityProperty, RoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uz(0.0, 0.99), uv(-6.0, 6.0);
    for (int i = 0; i < 2000; ++i) {
        const double z = uz(rng), v = uv(rng);
        // recovering v from e^2 - W loses digits in proportion to (v^2 + W) / v^2
        const double w = canonical.value(z);
        const double tol = 8.0 * std::numeric_limits<double>::epsilon() * (v * v + w) / std::abs(v) + 1e-15;
        EXPECT_NEAR(physical_velocity(canonical, z, equivalent_velocity(canonical, z, v)), v, tol) << z;
    }
}

TEST(TurningPoints, TrappedAndFree) {
    // frozen from the closed-form linear solve in the oracle
    constexpr double trapped_lo = 0.33333333333333331, trapped_hi = 0.59999999999999998;
    constexpr double free_hi = 0.75;
    EXPECT_NEAR(well.left_turn(0.5), trapped_lo, 1e-15);
    EXPECT_NEAR(well.right_turn(0.5), trapped_hi, 1e-15);
    EXPECT_NEAR(well.right_turn(2.0), free_hi, 1e-15);

    const TurningPair t = turning_points(canonical, 0.5);
    EXPECT_TRUE(t.trapped);
    EXPECT_NEAR(t.z_plus, trapped_lo, 1e-12);
    EXPECT_NEAR(t.z_minus, trapped_hi, 1e-12);
    const TurningPair f = turning_points(canonical, 2.0);
    EXPECT_FALSE(f.trapped);
    EXPECT_DOUBLE_EQ(f.z_plus, 0.0);
    EXPECT_NEAR(f.z_minus, free_hi, 1e-12);
    const TurningPair bottom = turning_points(canonical, 0.0);
    EXPECT_DOUBLE_EQ(bottom.z_plus, 0.5);
    EXPECT_DOUBLE_EQ(bottom.z_minus, 0.5);
}

TEST(TurningPointsProperty, PotentialEqualsEnergyAtTurns) {
    for (int i = 1; i < 200; ++i) {
        const double e = 0.02 * i;
        const TurningPair t = turning_points(canonical, e);
        EXPECT_NEAR(canonical.value(t.z_minus), e * e, 1e-10 * std::max(1.0, e * e)) << e;
        if (t.trapped) EXPECT_NEAR(canonical.value(t.z_plus), e * e, 1e-10) << e;
        const TurningPair m = turning_points(canonical, -e);
        EXPECT_EQ(m.z_plus, t.z_plus);
        EXPECT_EQ(m.z_minus, t.z_minus);
    }
}

TEST(InverseSpeed, Examples) {
    const double z3 = well.right_turn(std::sqrt(3.0));
    EXPECT_NEAR(inverse_speed(canonical, z3, 2.0), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(inverse_speed(canonical, 0.5, 2.0), 0.5);
    EXPECT_THROW((void)inverse_speed(canonical, 0.0, 0.5), DomainError);
    EXPECT_GT(inverse_speed(canonical, well.right_turn(2.0) - 1e-12, 2.0), 1e4);
}

TEST(CrossingTime, SmallOscillationLimit) {
    EXPECT_NEAR(crossing_time(canonical, 1e-3, spec), std::numbers::pi / 4.0, 1e-3);
}

TEST(CrossingTime, FrozenOracleValues) {
    // midpoint rule on the endpoint-regularised pass, Richardson extrapolated
    struct Case {
        double e;
        double tau;
    };
    constexpr Case cases[] = {{0.5, 0.86523278416496208},
                              {0.9, 1.1027926014371177},
                              {1.2, 0.74494847783165363},
                              {2.0, 0.43301270190087165},
                              {10.0, 0.097323233128273068}};
    for (const Case& c : cases) {
        EXPECT_NEAR(oracle::crossing_time(well, c.e), c.tau, 1e-11 * c.tau) << c.e;
        EXPECT_NEAR(crossing_time(canonical, c.e, spec), c.tau, 1e-9 * c.tau) << c.e;
    }
}

TEST(CrossingTimeProperty, EvenAndDecreasingAtHighSpeed) {
    double previous = crossing_time(canonical, 2.0, spec);
    for (double e = 2.5; e <= 20.0; e += 0.5) {
        const double t = crossing_time(canonical, e, spec);
        EXPECT_EQ(t, crossing_time(canonical, -e, spec));
        EXPECT_LT(t, previous) << e;
        previous = t;
    }
    EXPECT_LT(crossing_time(canonical, 10.0, spec), 0.1);
}

TEST(ChangeOfVariables, GaussianIntegral) {
    for (double z : {0.0, 0.2, 0.5, 0.7}) {
        const double w = canonical.value(z);
        const double got = change_of_variables_integral(canonical, z, [](EnergyState e) { return maxwellian_G(e); }, spec);
        EXPECT_NEAR(got, two_pi * std::exp(-0.5 * w), 1e-9) << z;
    }
}

TEST(ChangeOfVariables, OddIntegrandVanishes) {
    const double got = change_of_variables_integral(
        canonical, 0.3, [](EnergyState e) { return e.ez * maxwellian_G(e); }, spec);
    EXPECT_NEAR(got, 0.0, 1e-12);
}

// Layer integral of the e-coordinate velocity integral against the same integral done in plain velocities.
TEST(ChangeOfVariablesProperty, LayerIntegralOfPullback) {
    const auto psi = [](EnergyState e) { return (1.0 + e.vx * e.vx + 0.5 * e.ez * e.ez) * maxwellian_G(e); };
    const double top = 0.9;
    const double pulled_back = numerics::integrate_singular(
        [&](double z) { return change_of_variables_integral(canonical, z, psi, spec); }, 0.0, top, spec);
    const double plain = numerics::integrate_singular(
        [&](double z) {
            const double w = canonical.value(z);
            // plain velocity integral of psi(v_x, e(z, v_z)) done on a fine tensor rule
            double s = 0.0;
            const int n = 400;
            const double h = 24.0 / n;
            for (int i = 0; i < n; ++i) {
                const double vx = -12.0 + (i + 0.5) * h;
                for (int j = 0; j < n; ++j) {
                    const double vz = -12.0 + (j + 0.5) * h;
                    const double ez = (vz >= 0 ? 1.0 : -1.0) * std::sqrt(vz * vz + w);
                    s += psi({vx, ez}) * h * h;
                }
            }
            return s;
        },
        0.0, top, spec);
    EXPECT_NEAR(pulled_back, plain, 1e-6 * std::abs(pulled_back));
}

TEST(VelocityGrid, HalfSpaceLayout) {
    const VelocityGrid g = VelocityGrid::half_space(4, 3, 2.0, 3.0);
    EXPECT_TRUE(g.symmetric());
    EXPECT_EQ(g.size(), 12u);
    for (std::size_t c = 0; c < g.size(); ++c) {
        EXPECT_GT(g.incoming(c).z, 0.0);
        EXPECT_DOUBLE_EQ(g.outgoing(c).z, -g.incoming(c).z);
        const std::size_t r = g.reversed(c);
        EXPECT_DOUBLE_EQ(g.incoming(r).x, -g.outgoing(c).x);
        EXPECT_DOUBLE_EQ(g.incoming(r).z, -g.outgoing(c).z);
        EXPECT_EQ(g.reversed(r), c);
        EXPECT_DOUBLE_EQ(g.measure(c), 1.0 * 1.0);
    }
}

TEST(GridAxis, Locate) {
    const GridAxis a = GridAxis::uniform(4, 0.0, 1.0);
    EXPECT_EQ(a.locate(0.0), 0u);
    EXPECT_EQ(a.locate(0.6), 2u);
    EXPECT_EQ(a.locate(1.0), GridAxis::npos);
    EXPECT_EQ(a.locate(-0.1), GridAxis::npos);
}

} // namespace
} // namespace gsi
