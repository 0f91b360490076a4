#include "gsi/discrete_kernel.hpp"

#include "gsi/errors.hpp"
#include "gsi/phonon.hpp"

#include <algorithm>
#include <cmath>

namespace gsi {

DiscreteKernel::DiscreteKernel(VelocityGrid grid)
    : grid_(std::move(grid)), dense_(grid_.size() * grid_.size(), 0.0), mirror_(grid_.size(), 0.0) {}

bool DiscreteKernel::has_mirror_part() const noexcept {
    return std::any_of(mirror_.begin(), mirror_.end(), [](double m) { return m != 0.0; });
}

double DiscreteKernel::density_entry(std::size_t row, std::size_t col) const noexcept {
    double k = dense(row, col);
    if (row == col) k += mirror_[col] / grid_.measure(col);
    return k;
}

double DiscreteKernel::flux_entry(std::size_t row, std::size_t col) const noexcept {
    return density_entry(row, col) * grid_.speed_z(row) / grid_.speed_z(col);
}

std::vector<double> DiscreteKernel::apply(std::span<const double> f_in) const {
    if (f_in.size() != size()) throw PreconditionError("DiscreteKernel::apply: inflow does not match the grid");
    const std::size_t n = size();
    std::vector<double> weighted(n);
    for (std::size_t c = 0; c < n; ++c) weighted[c] = f_in[c] * grid_.measure(c);
    std::vector<double> out(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = &dense_[r * n];
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) s += row[c] * weighted[c];
        out[r] = s + mirror_[r] * f_in[r];
    }
    return out;
}

std::vector<double> flux_probe(const VelocityGrid& grid) {
    std::vector<double> f(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const Velocity v = grid.incoming(c);
        const double shape = 1.0 + 0.3 * v.x + 0.2 * (v.x * v.x + v.z * v.z - 2.0);
        f[c] = maxwellian_M(v) * std::max(shape, 0.0);
    }
    return f;
}

double normal_flux(const VelocityGrid& grid, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) s += grid.speed_z(c) * f[c] * grid.measure(c);
    return s;
}

std::vector<double> maxwellian_on(const VelocityGrid& grid) {
    std::vector<double> m(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) m[c] = maxwellian_M(grid.incoming(c));
    return m;
}

double flux_imbalance(const VelocityGrid& grid, std::span<const double> f_in, std::span<const double> f_out) {
    const double in = normal_flux(grid, f_in);
    const double out = normal_flux(grid, f_out);
    return std::abs(out - in) / in;
}

double reciprocity_defect(const DiscreteKernel& k) {
    const VelocityGrid& g = k.grid();
    const std::size_t n = g.size();
    const std::vector<double> m = maxwellian_on(g);
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t rr = g.reversed(r);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t rc = g.reversed(c);
            const double lhs = m[c] * g.speed_z(r) * k.density_entry(r, c);
            const double rhs = m[r] * g.speed_z(c) * k.density_entry(rc, rr);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

double mirror_cell_fraction(const DiscreteKernel& k) {
    double worst = 1.0;
    for (std::size_t c = 0; c < k.size(); ++c) worst = std::min(worst, k.flux_entry(c, c) * k.grid().measure(c));
    return worst;
}

BoundaryReport verify_kernel_axioms(const DiscreteKernel& k) {
    const VelocityGrid& g = k.grid();
    const std::size_t n = g.size();
    BoundaryReport rep;
    double most_negative = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        most_negative = std::min(most_negative, k.mirror_mass(c));
        double column = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            most_negative = std::min(most_negative, k.dense(r, c));
            column += k.dense(r, c) * g.speed_z(r) / g.speed_z(c) * g.measure(r);
        }
        column += k.mirror_mass(c);
        rep.normalization = std::max(rep.normalization, std::abs(column - 1.0));
    }
    rep.nonnegativity = -most_negative;
    const std::vector<double> probe = flux_probe(g);
    rep.mass_flux = flux_imbalance(g, probe, k.apply(probe));
    if (g.symmetric()) rep.reciprocity = reciprocity_defect(k);
    return rep;
}

} // namespace gsi
