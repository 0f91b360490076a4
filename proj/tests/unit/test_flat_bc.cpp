#include "gsi/flat_bc.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace gsi {
namespace {

const FlatWallPotential canonical = FlatWallPotential::canonical();
const numerics::QuadratureSpec spec{};
const CollisionKernelModel half = CollisionKernelModel::constant(0.5);

VelocityGrid small_grid() { return VelocityGrid::half_space(12, 10, 5.0, 5.0); }

std::vector<double> random_inflow(const VelocityGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double ux = 2.0 * u(rng) - 1.0, t = 0.5 + u(rng);
    std::vector<double> f(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Velocity v = g.incoming(c);
        f[c] = std::exp(-((v.x - ux) * (v.x - ux) + v.z * v.z) / (2.0 * t)) * (0.5 + u(rng));
    }
    return f;
}

TEST(AccommodationFormulas, Examples) {
    EXPECT_NEAR(accommodation_from_times(0.5, 1.0), 1.0 - std::exp(-1.0), 1e-15);
    EXPECT_NEAR(accommodation_from_times(0.5, 1.0), 0.632121, 1e-6);
    EXPECT_DOUBLE_EQ(pade_from_times(0.5, 1.0), 0.5);
    EXPECT_NEAR(accommodation_from_times(1e-12, 1.0), 0.0, 1e-11);
    EXPECT_NEAR(accommodation_from_times(1.0, 1e-12), 1.0, 1e-15);
    const double r = 1e-6;
    EXPECT_NEAR(accommodation_from_times(0.5 * r, 1.0) / pade_from_times(0.5 * r, 1.0), 1.0, 1e-5);
}

TEST(AccommodationFraction, FrozenOracleValues) {
    // a for nu0 = 0.5 on the canonical well, optical depth integrated by the oracle
    struct Case {
        double v_z;
        double a;
    };
    constexpr Case cases[] = {{0.5, 0.98304039148413636}, {1.0, 0.94761727185663813}, {3.0, 0.69587782006309062}};
    const oracle::Well well{};
    for (const Case& c : cases) {
        EXPECT_NEAR(oracle::accommodation_constant(well, c.v_z, 0.5), c.a, 1e-11) << c.v_z;
        EXPECT_NEAR(accommodation_fraction(half, canonical, {0.7, c.v_z}, spec), c.a, 1e-9) << c.v_z;
    }
}

TEST(AccommodationFraction, OnlyNormalSpeedMattersForConstantKernel) {
    for (double vx : {-3.0, 0.0, 2.0}) {
        EXPECT_NEAR(accommodation_fraction(half, canonical, {vx, 1.5}, spec),
                    accommodation_fraction(half, canonical, {0.0, 1.5}, spec), 1e-15);
    }
}

TEST(AccommodationFraction, Limits) {
    for (double vz : {0.1, 1.0, 4.0}) {
        EXPECT_LT(accommodation_fraction(half.scaled(1e-4), canonical, {0.0, vz}, spec), 1e-3);
        EXPECT_GT(accommodation_fraction(half.scaled(1e4), canonical, {0.0, vz}, spec), 1.0 - 1e-3);
    }
}

TEST(AccommodationTableProperty, ParityRangeAndTail) {
    const VelocityGrid g = VelocityGrid::half_space(16, 24, 5.0, 6.0);
    for (const CollisionKernelModel& m : {half, CollisionKernelModel::gaussian_smooth(0.5, 1.5, 1.0)}) {
        const auto t = accommodation_table(m, canonical, g, spec);
        for (std::size_t ix = 0; ix < g.nx(); ++ix) {
            for (std::size_t jz = 0; jz < g.nz(); ++jz) {
                const double a = t[g.index(ix, jz)].a;
                EXPECT_GE(a, 0.0);
                EXPECT_LE(a, 1.0);
                EXPECT_NEAR(a, t[g.index(g.nx() - 1 - ix, jz)].a, 1e-14);
                const AccommodationSample s = accommodation_sample(m, canonical, g.incoming(g.index(ix, jz)), spec);
                EXPECT_NEAR(s.a, a, 1e-14);
                // a(v_x, -v_z) = a(v_x, v_z)
                EXPECT_NEAR(accommodation_fraction(m, canonical, {g.incoming(g.index(ix, jz)).x, -g.incoming(g.index(ix, jz)).z}, spec), a, 1e-14);
            }
        }
        // decreasing over the upper half of the normal speeds
        const std::size_t centre = g.nx() / 2;
        for (std::size_t jz = g.nz() / 2; jz + 1 < g.nz(); ++jz) {
            EXPECT_GT(t[g.index(centre, jz)].a, t[g.index(centre, jz + 1)].a) << jz;
        }
    }
}

TEST(PadeTable, SecondOrderDifference) {
    std::vector<double> ratios;
    for (int i = 0; i <= 20; ++i) ratios.push_back(std::pow(10.0, -4.0 + 0.1 * i));
    const auto rows = pade_table(ratios);
    for (const PadeRow& r : rows) {
        // a = 1 - exp(-r), a_pade = r / (1 + r), both ~ r
        EXPECT_NEAR(r.a, -std::expm1(-r.ratio), 1e-16);
        EXPECT_NEAR(r.a_pade, r.ratio / (1.0 + r.ratio), 1e-16);
        EXPECT_NEAR(r.difference, std::abs(r.a - r.a_pade), 1e-18);
        EXPECT_LT(r.difference, r.ratio * r.ratio);
    }
    EXPECT_NEAR(pade_difference_exponent(rows), 2.0, 0.1);
}

TEST(Kappa, Linearity) {
    const VelocityGrid g = small_grid();
    std::vector<double> m = maxwellian_on(g);
    EXPECT_NEAR(diffuse_kappa(m, g), 1.0, 1e-15);
    for (double& v : m) v *= 2.0;
    EXPECT_NEAR(diffuse_kappa(m, g), 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(diffuse_kappa(std::vector<double>(g.size(), 0.0), g), 0.0);
}

TEST(Beta1, ReductionsAndWeighting) {
    const VelocityGrid g = small_grid();
    std::vector<double> m = maxwellian_on(g);
    std::vector<double> a(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) a[c] = 0.2 + 0.6 * (g.incoming(c).z / 5.0);
    std::vector<double> scaled(m);
    for (double& v : scaled) v *= 3.0;
    EXPECT_NEAR(beta1(scaled, a, g), 3.0, 1e-14);
    const std::vector<double> ones(g.size(), 1.0);
    std::mt19937_64 rng(2);
    const auto f = random_inflow(g, rng);
    EXPECT_NEAR(beta1(f, ones, g), diffuse_kappa(f, g), 1e-14);

    // two bumps, one where a is almost 0 and one where a is almost 1: beta1 follows the second
    std::vector<double> step(g.size()), bumps(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Velocity v = g.incoming(c);
        step[c] = v.x < 0.0 ? 1e-9 : 1.0;
        bumps[c] = v.x < 0.0 ? 5.0 * m[c] : 2.0 * m[c];
    }
    EXPECT_NEAR(beta1(bumps, step, g), 2.0, 1e-8);
    EXPECT_THROW((void)beta1(f, std::vector<double>(g.size(), 0.0), g), PreconditionError);
}

TEST(FlatBoundary, SpecularIsAnInvolution) {
    const VelocityGrid g = small_grid();
    const FlatBoundary b = FlatBoundary::specular(g);
    std::mt19937_64 rng(3);
    const auto f = random_inflow(g, rng);
    // outgoing cell c mirrors incoming cell c, so two reflections give back the inflow
    EXPECT_EQ(b.apply(b.apply(f)), f);
}

TEST(FlatBoundary, MaxwellLikePreservesMaxwellian) {
    const VelocityGrid g = VelocityGrid::half_space(32, 32, 5.0, 5.0);
    const FlatBoundary b = FlatBoundary::maxwell_like(half, canonical, g, spec);
    const auto m = maxwellian_on(g);
    const auto out = b.apply(m);
    for (std::size_t c = 0; c < g.size(); ++c) EXPECT_NEAR(out[c], m[c], 1e-10 * m[c]);
}

TEST(FlatBoundary, ConstantAccommodationIsClassicalMaxwell) {
    const VelocityGrid g = small_grid();
    const double alpha = 0.3;
    const FlatBoundary b = FlatBoundary::maxwell_like(g, std::vector<double>(g.size(), alpha));
    std::mt19937_64 rng(4);
    const auto f = random_inflow(g, rng);
    const double kappa = diffuse_kappa(f, g);
    const auto out = b.apply(f);
    for (std::size_t c = 0; c < g.size(); ++c) {
        EXPECT_NEAR(out[c], (1.0 - alpha) * f[c] + alpha * kappa * maxwellian_M(g.outgoing(c)), 1e-14);
    }
}

TEST(FlatBoundaryProperty, FluxBalanceAndPositivity) {
    const VelocityGrid g = small_grid();
    const std::vector<FlatBoundary> all{FlatBoundary::specular(g), FlatBoundary::perfect_accommodation(g),
                                        FlatBoundary::maxwell_like(half, canonical, g, spec)};
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = random_inflow(g, rng);
        for (const FlatBoundary& b : all) {
            const auto out = b.apply(f);
            EXPECT_LT(flux_imbalance(g, f, out), 1e-12) << to_string(b.regime());
            for (double v : out) EXPECT_GE(v, 0.0);
        }
    }
}

TEST(FlatBoundary, KernelReproducesApply) {
    const VelocityGrid g = small_grid();
    std::mt19937_64 rng(6);
    const auto f = random_inflow(g, rng);
    for (const FlatBoundary& b : {FlatBoundary::specular(g), FlatBoundary::perfect_accommodation(g),
                                  FlatBoundary::maxwell_like(half, canonical, g, spec)}) {
        const auto direct = b.apply(f);
        const auto via = b.kernel().apply(f);
        for (std::size_t c = 0; c < g.size(); ++c) EXPECT_NEAR(via[c], direct[c], 1e-10) << to_string(b.regime());
    }
}

TEST(FlatBoundary, ExtremeAccommodationKernels) {
    const VelocityGrid g = small_grid();
    const DiscreteKernel mirror = FlatBoundary::maxwell_like(g, std::vector<double>(g.size(), 0.0)).kernel();
    EXPECT_NEAR(mirror_cell_fraction(mirror), 1.0, 1e-15);
    const DiscreteKernel diffuse = FlatBoundary::maxwell_like(g, std::vector<double>(g.size(), 1.0)).kernel();
    const DiscreteKernel perfect = FlatBoundary::perfect_accommodation(g).kernel();
    for (std::size_t r = 0; r < g.size(); ++r) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            EXPECT_NEAR(diffuse.density_entry(r, c), perfect.density_entry(r, c), 1e-14);
            // rows depend on the incoming velocity only through its normal flux weight
            EXPECT_NEAR(diffuse.density_entry(r, c) / g.speed_z(c), diffuse.density_entry(r, 0) / g.speed_z(0),
                        1e-14 * diffuse.density_entry(r, 0) / g.speed_z(0));
        }
    }
}

TEST(FlatBoundary, MaxwellLikeKernelAxiomsOnFullGrid) {
    const VelocityGrid g = VelocityGrid::half_space(32, 32, 5.0, 5.0);
    const BoundaryReport r = verify_kernel_axioms(FlatBoundary::maxwell_like(half, canonical, g, spec).kernel());
    EXPECT_EQ(r.nonnegativity, 0.0);
    EXPECT_LT(r.normalization, 1e-8);
    EXPECT_LT(r.reciprocity, 1e-8);
    EXPECT_LT(r.mass_flux, 1e-8);
    const BoundaryReport s = verify_kernel_axioms(FlatBoundary::specular(g).kernel());
    EXPECT_EQ(s.reciprocity, 0.0);
}

std::vector<double> drifted(const VelocityGrid& g, double ux, double uz) {
    std::vector<double> f(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Velocity v = g.incoming(c);
        f[c] = std::exp(-0.5 * ((v.x - ux) * (v.x - ux) + (v.z - uz) * (v.z - uz)));
    }
    return f;
}

TEST(MomentAccommodation, ConstantAccommodationGivesItForEveryMoment) {
    const VelocityGrid g = VelocityGrid::half_space(32, 32, 5.0, 5.0);
    const std::vector<double> a(g.size(), 0.3);
    const auto f = drifted(g, 0.5, 0.5);
    const auto out = FlatBoundary::maxwell_like(g, a).apply(f);
    for (Moment m : {Moment::tangential, Moment::normal, Moment::energy}) {
        EXPECT_NEAR(moment_accommodation(f, out, a, g, m), 0.3, 1e-12) << to_string(m);
    }
}

TEST(MomentAccommodation, DiffuseAndSpecularEnds) {
    const VelocityGrid g = VelocityGrid::half_space(32, 32, 5.0, 5.0);
    const auto f = drifted(g, 0.5, 0.5);
    const std::vector<double> ones(g.size(), 1.0);
    const auto diffuse = FlatBoundary::perfect_accommodation(g).apply(f);
    const auto mirror = FlatBoundary::specular(g).apply(f);
    for (Moment m : {Moment::tangential, Moment::normal, Moment::energy}) {
        EXPECT_NEAR(moment_accommodation(f, diffuse, ones, g, m), 1.0, 1e-12) << to_string(m);
    }
    EXPECT_NEAR(moment_accommodation(f, mirror, ones, g, Moment::tangential), 0.0, 1e-12);
}

TEST(MomentAccommodation, VelocityDependentAccommodationSplits) {
    const VelocityGrid g = VelocityGrid::half_space(32, 32, 5.0, 5.0);
    const FlatBoundary b = FlatBoundary::maxwell_like(half, canonical, g, spec);
    const auto f = drifted(g, 0.5, 0.5);
    const auto out = b.apply(f);
    const double t = moment_accommodation(f, out, b.accommodation(), g, Moment::tangential);
    const double n = moment_accommodation(f, out, b.accommodation(), g, Moment::normal);
    const double e = moment_accommodation(f, out, b.accommodation(), g, Moment::energy);
    EXPECT_GT(std::abs(t - n), 1e-3);
    EXPECT_GT(std::abs(t - e), 1e-3);
    EXPECT_GT(std::abs(n - e), 1e-3);
}

} // namespace
} // namespace gsi
