#include "gsi/discrete_kernel.hpp"
#include "gsi/flat_bc.hpp"

#include <gtest/gtest.h>

namespace gsi {
namespace {

VelocityGrid grid() { return VelocityGrid::half_space(6, 5, 3.0, 3.0); }

TEST(DiscreteKernel, MirrorPartAppliesPointwise) {
    const VelocityGrid g = grid();
    DiscreteKernel k(g);
    EXPECT_FALSE(k.has_mirror_part());
    for (std::size_t c = 0; c < g.size(); ++c) k.set_mirror_mass(c, 1.0);
    EXPECT_TRUE(k.has_mirror_part());
    std::vector<double> f(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) f[c] = 0.1 * static_cast<double>(c);
    EXPECT_EQ(k.apply(f), f);
    EXPECT_DOUBLE_EQ(mirror_cell_fraction(k), 1.0);
    EXPECT_DOUBLE_EQ(k.density_entry(2, 2), 1.0 / g.measure(2));
    EXPECT_DOUBLE_EQ(k.density_entry(2, 3), 0.0);
    EXPECT_THROW((void)k.apply(std::vector<double>(3, 0.0)), PreconditionError);
}

TEST(DiscreteKernel, InjectedNegativeEntryIsReported) {
    DiscreteKernel k = FlatBoundary::perfect_accommodation(grid()).kernel();
    EXPECT_EQ(verify_kernel_axioms(k).nonnegativity, 0.0);
    k.set_dense(4, 7, -1e-3);
    EXPECT_NEAR(verify_kernel_axioms(k).nonnegativity, 1e-3, 1e-18);
}

TEST(DiscreteKernel, ReciprocityDefectGrowsWithInjectedAsymmetry) {
    const DiscreteKernel base = FlatBoundary::perfect_accommodation(grid()).kernel();
    EXPECT_LT(reciprocity_defect(base), 1e-15);
    double previous = 0.0;
    for (double eps : {1e-6, 1e-5, 1e-4}) {
        DiscreteKernel k = base;
        k.add_dense(3, 8, eps);
        const double d = reciprocity_defect(k);
        if (previous > 0.0) EXPECT_NEAR(d / previous, 10.0, 1e-6);
        previous = d;
    }
}

TEST(DiscreteKernel, FluxProbeAndMaxwellian) {
    const VelocityGrid g = grid();
    const auto probe = flux_probe(g);
    for (double v : probe) EXPECT_GE(v, 0.0);
    const auto m = maxwellian_on(g);
    EXPECT_GT(normal_flux(g, m), 0.0);
    EXPECT_DOUBLE_EQ(flux_imbalance(g, m, m), 0.0);
}

} // namespace
} // namespace gsi
