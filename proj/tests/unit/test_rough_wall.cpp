#include "gsi/rough_wall.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace gsi {
namespace {

const FlatWallPotential canonical = FlatWallPotential::canonical();
const PeriodicWallPotential rough(canonical, 1.0, 0.8, 0.1);
const PeriodicWallPotential smooth(canonical, 1.0, 0.8, 0.0);
const CollisionKernelModel half = CollisionKernelModel::constant(0.5);
const numerics::OdeSpec ode{};

VelocityGrid grid8() { return VelocityGrid::half_space(8, 8, 4.0, 4.0); }

RoughKernelOptions options(int samples) {
    RoughKernelOptions o;
    o.samples_per_cell = samples;
    return o;
}

TEST(TraceParticle, FlatCellIsSeparable) {
    // without roughness the normal motion is one-dimensional with time of flight 2 s0 tau_z(e)
    struct Case {
        double v_z;
        double flight_time;
    };
    constexpr Case cases[] = {{0.5, 1.3272868349754958}, {1.0, 0.97715317518245115}, {3.0, 0.45604304268032059}};
    const oracle::Well well{};
    for (const Case& c : cases) {
        const double e = std::sqrt(c.v_z * c.v_z + 1.0);
        EXPECT_NEAR(2.0 * 0.8 * oracle::crossing_time(well, e), c.flight_time, 1e-11);
        for (double vx : {-1.3, 0.0, 0.7}) {
            const double y0 = 0.3;
            const ExitRecord r = trace_particle(smooth, half, y0, {vx, c.v_z}, ode);
            EXPECT_NEAR(r.flight_time, c.flight_time, 1e-8) << c.v_z;
            EXPECT_NEAR(r.exit_velocity.x, vx, 1e-9);
            EXPECT_NEAR(r.exit_velocity.z, -c.v_z, 1e-8);
            const double y = y0 + vx * c.flight_time;
            EXPECT_NEAR(r.exit_y, y - std::floor(y), 1e-8);
            // optical depth of the free-space rate over the flight
            EXPECT_NEAR(r.optical_depth, half.free_space_rate({vx, c.v_z}) * r.flight_time, 1e-7);
        }
    }
}

TEST(TraceParticle, PeriodRatioScalesTangentialTransport) {
    const PeriodicWallPotential wide(canonical, 2.0, 0.8, 0.0);
    const ExitRecord a = trace_particle(smooth, half, 0.1, {0.4, 1.0}, ode);
    const ExitRecord b = trace_particle(wide, half, 0.1, {0.4, 1.0}, ode);
    EXPECT_NEAR(b.flight_time, a.flight_time, 1e-10);
    const double y = 0.1 + 0.4 * a.flight_time / 2.0;
    EXPECT_NEAR(b.exit_y, y - std::floor(y), 1e-8);
}

TEST(TraceParticle, RejectsOutgoingEntry) {
    EXPECT_THROW((void)trace_particle(rough, half, 0.0, {0.1, -1.0}, ode), PreconditionError);
}

TEST(TraceParticleProperty, EnergyAndSpeedConserved) {
    for (std::uint64_t i = 0; i < 300; ++i) {
        const EntryState e = flux_entry(i, 4.0);
        const ExitRecord r = trace_particle(rough, half, e.y, e.v, ode);
        const double s0 = std::hypot(e.v.x, e.v.z);
        EXPECT_LT(r.energy_drift, 1e-8) << i;
        EXPECT_LT(std::abs(std::hypot(r.exit_velocity.x, r.exit_velocity.z) - s0) / s0, 1e-8) << i;
        EXPECT_LT(r.exit_velocity.z, 0.0);
        EXPECT_GE(r.exit_y, 0.0);
        EXPECT_LT(r.exit_y, 1.0);
    }
}

TEST(TraceParticleProperty, TimeReversal) {
    const ReversibilityReport r = reversibility_check(rough, half, 2000, 4.0, 1e-6, ode);
    EXPECT_EQ(r.samples, 2000);
    EXPECT_GE(static_cast<double>(r.within_tolerance), 0.99 * static_cast<double>(r.samples - r.discarded));
    EXPECT_LT(r.worst_energy_drift, 1e-8);
    // r(y', v') = r(y, -v) along each pair
    EXPECT_LT(r.worst_depth_mismatch, 1e-6);
}

TEST(QuasiRandom, UnitCubeAndDeterminism) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto p = quasi_random_point(i);
        for (double u : p) {
            EXPECT_GE(u, 0.0);
            EXPECT_LT(u, 1.0);
        }
        EXPECT_EQ(p, quasi_random_point(i));
    }
}

TEST(FluxEntry, CoversTheHalfDiscWithFluxWeight) {
    const int n = 100000;
    double mean_cube = 0.0, mean_cos = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const EntryState e = flux_entry(i, 2.0);
        const double s = std::hypot(e.v.x, e.v.z);
        EXPECT_GT(e.v.z, 0.0);
        EXPECT_LE(s, 2.0 + 1e-12);
        mean_cube += s * s * s / 8.0;
        mean_cos += e.v.x / s;
    }
    // speed^3 uniform and the direction cosine uniform on [-1, 1]
    EXPECT_NEAR(mean_cube / n, 0.5, 1e-3);
    EXPECT_NEAR(mean_cos / n, 0.0, 1e-3);
}

TEST(MeasurePreservation, BinnedInflowMatchesOutflow) {
    const MeasureReport r = measure_preservation(rough, 100000, 3, 3, 4.0, ode);
    EXPECT_EQ(r.samples, 100000);
    EXPECT_EQ(r.inflow.size(), 9u);
    EXPECT_LT(r.worst_relative_defect, 1e-2);
}

TEST(RoughKernel, FlatCellConcentratesOnMirrorCells) {
    const RoughKernelSet set = build_rough_kernels(smooth, half, grid8(), options(50));
    EXPECT_GE(mirror_cell_fraction(set.specular), 0.99);
    const VelocityGrid g = grid8();
    const auto probe = flux_probe(g);
    const auto out = apply_rough_bc(set, probe, RoughMode::specular);
    for (std::size_t c = 0; c < g.size(); ++c) EXPECT_NEAR(out[c], probe[c], 1e-2 * probe[c] + 1e-14);
}

TEST(RoughKernel, AssemblyInvariants) {
    const VelocityGrid g = grid8();
    const RoughKernelSet set = build_rough_kernels(rough, half, g, options(50));
    const RoughKernelReport r = verify_rough_kernel(set);
    EXPECT_EQ(r.specular.nonnegativity, 0.0);
    EXPECT_LT(r.specular.normalization, 1e-12);
    EXPECT_LT(r.specular.mass_flux, 1e-12);
    EXPECT_LE(r.survival_excess, 0.0);
    EXPECT_EQ(r.accommodation_range, 0.0);
    EXPECT_LT(r.thermalized_reciprocity, 1e-12);
    for (std::size_t row = 0; row < g.size(); ++row) {
        for (std::size_t col = 0; col < g.size(); ++col) {
            EXPECT_LE(set.survival.density_entry(row, col), set.specular.density_entry(row, col));
        }
    }
    for (std::size_t c = 0; c < g.size(); ++c) {
        EXPECT_GE(set.psi[c], 0.0);
        EXPECT_LE(set.psi[c], 1.0);
    }
}

TEST(RoughKernel, DeterministicAcrossWorkerCounts) {
    const VelocityGrid g = grid8();
    RoughKernelOptions one = options(30), many = options(30);
    one.parallelism.threads = 1;
    many.parallelism.threads = 4;
    const RoughKernelSet a = build_rough_kernels(rough, half, g, one);
    const RoughKernelSet b = build_rough_kernels(rough, half, g, many);
    for (std::size_t r = 0; r < g.size(); ++r) {
        for (std::size_t c = 0; c < g.size(); ++c) EXPECT_EQ(a.specular.density_entry(r, c), b.specular.density_entry(r, c));
    }
    EXPECT_EQ(a.psi, b.psi);
    EXPECT_EQ(a.accommodation, b.accommodation);
}

TEST(RoughKernel, CollisionLimits) {
    const VelocityGrid g = grid8();
    EXPECT_THROW((void)half.scaled(0.0), DomainError);
    // survival is exp(-r) with r proportional to the rate
    const RoughKernelSet faint = build_rough_kernels(rough, half.scaled(1e-9), g, options(20));
    for (std::size_t r = 0; r < g.size(); ++r) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            EXPECT_NEAR(faint.survival.density_entry(r, c), faint.specular.density_entry(r, c),
                        1e-7 * faint.specular.density_entry(r, c));
        }
        EXPECT_LT(faint.accommodation[r], 1e-7);
    }

    const RoughKernelSet heavy = build_rough_kernels(rough, half.scaled(1e4), g, options(20));
    for (std::size_t c = 0; c < g.size(); ++c) EXPECT_GT(heavy.accommodation[c], 1.0 - 1e-6);
}

TEST(RoughMaxwellLike, EquilibriumAndLinearity) {
    const VelocityGrid g = grid8();
    const RoughKernelSet set = build_rough_kernels(rough, half, g, options(50));
    const auto m = maxwellian_on(g);
    EXPECT_NEAR(diffuse_amplitude(set, m), 1.0, 1e-12);
    std::vector<double> twice(m);
    for (double& v : twice) v *= 2.0;
    EXPECT_NEAR(diffuse_amplitude(set, twice), 2.0, 1e-12);
    const auto zero = apply_rough_bc(set, std::vector<double>(g.size(), 0.0), RoughMode::maxwell_like);
    for (double v : zero) EXPECT_EQ(v, 0.0);
    const auto probe = flux_probe(g);
    for (RoughMode mode : {RoughMode::specular, RoughMode::maxwell_like}) {
        const auto out = apply_rough_bc(set, probe, mode);
        EXPECT_LT(flux_imbalance(g, probe, out), 1e-12);
        for (double v : out) EXPECT_GE(v, 0.0);
    }
}

TEST(RoughKernel, ReciprocityDefectTracksInjectedAsymmetry) {
    const VelocityGrid g = grid8();
    const DiscreteKernel k2 = thermalized_kernel(build_rough_kernels(rough, half, g, options(20)));
    EXPECT_LT(relative_reciprocity_defect(k2), 1e-12);
    double previous = 0.0;
    for (double eps : {1e-4, 1e-3, 1e-2}) {
        DiscreteKernel k = k2;
        k.add_dense(5, 17, eps * k2.density_entry(5, 17));
        const double d = relative_reciprocity_defect(k);
        if (previous > 0.0) EXPECT_NEAR(d / previous, 10.0, 0.1);
        previous = d;
    }
}

} // namespace
} // namespace gsi
