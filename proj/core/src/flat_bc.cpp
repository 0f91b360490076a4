#include "gsi/flat_bc.hpp"

#include "gsi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gsi {

namespace {

void check_half_grid(std::span<const double> f, const VelocityGrid& grid, const char* who) {
    if (f.size() != grid.size()) throw PreconditionError(std::string(who) + ": values do not match the grid");
}

double weighted_flux(std::span<const double> f, std::span<const double> weight, const VelocityGrid& grid) {
    double s = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) s += grid.speed_z(c) * weight[c] * f[c] * grid.measure(c);
    return s;
}

} // namespace

std::string to_string(Regime r) {
    switch (r) {
    case Regime::specular: return "specular";
    case Regime::perfect_accommodation: return "perfect-accommodation";
    case Regime::maxwell_like: return "maxwell-like";
    case Regime::numerical_albedo: return "numerical-albedo";
    }
    return "unknown";
}

std::string to_string(Moment m) {
    switch (m) {
    case Moment::tangential: return "tangential";
    case Moment::normal: return "normal";
    case Moment::energy: return "energy";
    }
    return "unknown";
}

double accommodation_from_times(double crossing_time, double mean_collision_time) noexcept {
    return -std::expm1(-2.0 * crossing_time / mean_collision_time);
}

double pade_from_times(double crossing_time, double mean_collision_time) noexcept {
    return 1.0 / (1.0 + mean_collision_time / (2.0 * crossing_time));
}

AccommodationSample accommodation_sample(const CollisionKernelModel& model, const FlatWallPotential& p, Velocity v,
                                         const numerics::QuadratureSpec& spec) {
    if (v.z == 0.0) throw PreconditionError("accommodation_sample: requires v_z != 0");
    const double ez = equivalent_velocity(p, 0.0, std::abs(v.z));
    const TransitIntegrals t = transit_integrals(model, p, ez, spec);
    AccommodationSample s;
    s.tau_z = t.time;
    s.tau_ms_bar = t.time / optical_depth(model, t, v.x);
    s.a = accommodation_from_times(s.tau_z, s.tau_ms_bar);
    s.a_pade = pade_from_times(s.tau_z, s.tau_ms_bar);
    return s;
}

double accommodation_fraction(const CollisionKernelModel& model, const FlatWallPotential& p, Velocity v,
                              const numerics::QuadratureSpec& spec) {
    return accommodation_sample(model, p, v, spec).a;
}

double pade_accommodation(const CollisionKernelModel& model, const FlatWallPotential& p, Velocity v,
                          const numerics::QuadratureSpec& spec) {
    return accommodation_sample(model, p, v, spec).a_pade;
}

std::vector<AccommodationSample> accommodation_table(const CollisionKernelModel& model, const FlatWallPotential& p,
                                                     const VelocityGrid& grid, const numerics::QuadratureSpec& spec,
                                                     Parallelism parallelism) {
    std::vector<AccommodationSample> table(grid.size());
    parallel_for(grid.nz(), parallelism, [&](std::size_t jz) {
        const double vz = grid.normal().nodes[jz];
        if (!(vz > 0.0)) throw PreconditionError("accommodation_table: normal nodes must be positive");
        const TransitIntegrals t = transit_integrals(model, p, equivalent_velocity(p, 0.0, vz), spec);
        for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
            AccommodationSample& s = table[grid.index(ix, jz)];
            s.tau_z = t.time;
            s.tau_ms_bar = t.time / optical_depth(model, t, grid.tangential().nodes[ix]);
            s.a = accommodation_from_times(s.tau_z, s.tau_ms_bar);
            s.a_pade = pade_from_times(s.tau_z, s.tau_ms_bar);
        }
    });
    return table;
}

std::vector<PadeRow> pade_table(std::span<const double> ratios) {
    std::vector<PadeRow> rows;
    rows.reserve(ratios.size());
    for (double r : ratios) {
        if (!(r > 0.0)) throw PreconditionError("pade_table: ratios must be positive");
        PadeRow row;
        row.ratio = r;
        row.a = -std::expm1(-r);
        row.a_pade = r / (1.0 + r);
        row.difference = row.a - row.a_pade;
        rows.push_back(row);
    }
    return rows;
}

double pade_difference_exponent(std::span<const PadeRow> rows) {
    if (rows.size() < 2) throw PreconditionError("pade_difference_exponent: need at least two rows");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const PadeRow& r : rows) {
        const double x = std::log(r.ratio);
        const double y = std::log(std::abs(r.difference));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double diffuse_kappa(std::span<const double> f_in, const VelocityGrid& grid) {
    check_half_grid(f_in, grid, "diffuse_kappa");
    const std::vector<double> m = maxwellian_on(grid);
    return normal_flux(grid, f_in) / normal_flux(grid, m);
}

double beta1(std::span<const double> f_in, std::span<const double> accommodation, const VelocityGrid& grid) {
    check_half_grid(f_in, grid, "beta1");
    check_half_grid(accommodation, grid, "beta1");
    const std::vector<double> m = maxwellian_on(grid);
    const double den = weighted_flux(m, accommodation, grid);
    if (!(den > 0.0)) throw PreconditionError("beta1: accommodation weight vanishes on the grid");
    return weighted_flux(f_in, accommodation, grid) / den;
}

FlatBoundary FlatBoundary::specular(VelocityGrid grid) { return {Regime::specular, std::move(grid)}; }

FlatBoundary FlatBoundary::perfect_accommodation(VelocityGrid grid) {
    return {Regime::perfect_accommodation, std::move(grid)};
}

FlatBoundary FlatBoundary::maxwell_like(VelocityGrid grid, std::vector<double> accommodation) {
    if (accommodation.size() != grid.size()) throw PreconditionError("FlatBoundary: accommodation size mismatch");
    for (double a : accommodation) {
        if (!(a >= 0.0 && a <= 1.0)) throw PreconditionError("FlatBoundary: accommodation must lie in [0, 1]");
    }
    FlatBoundary b(Regime::maxwell_like, std::move(grid));
    b.accommodation_ = std::move(accommodation);
    return b;
}

FlatBoundary FlatBoundary::maxwell_like(const CollisionKernelModel& model, const FlatWallPotential& p,
                                        VelocityGrid grid, const numerics::QuadratureSpec& spec,
                                        Parallelism parallelism) {
    const std::vector<AccommodationSample> table = accommodation_table(model, p, grid, spec, parallelism);
    std::vector<double> a(table.size());
    for (std::size_t c = 0; c < table.size(); ++c) a[c] = table[c].a;
    return maxwell_like(std::move(grid), std::move(a));
}

FlatBoundary FlatBoundary::numerical_albedo(std::shared_ptr<const LkslSolver> solver) {
    if (!solver) throw PreconditionError("FlatBoundary: numerical albedo needs a solver");
    FlatBoundary b(Regime::numerical_albedo, solver->grid());
    b.solver_ = std::move(solver);
    return b;
}

std::vector<double> FlatBoundary::apply(std::span<const double> f_in) const {
    check_half_grid(f_in, grid_, "FlatBoundary::apply");
    const std::size_t n = grid_.size();
    switch (regime_) {
    case Regime::specular: return {f_in.begin(), f_in.end()};
    case Regime::perfect_accommodation: {
        const double kappa = diffuse_kappa(f_in, grid_);
        std::vector<double> out = maxwellian_on(grid_);
        for (double& v : out) v *= kappa;
        return out;
    }
    case Regime::maxwell_like: {
        // a == 0 everywhere degenerates to the mirror
        const bool any = std::ranges::any_of(accommodation_, [](double a) { return a > 0.0; });
        const double b = any ? beta1(f_in, accommodation_, grid_) : 0.0;
        std::vector<double> out(n);
        for (std::size_t c = 0; c < n; ++c) {
            const double a = accommodation_[c];
            out[c] = a * b * maxwellian_M(grid_.outgoing(c)) + (1.0 - a) * f_in[c];
        }
        return out;
    }
    case Regime::numerical_albedo: return solver_->solve(f_in).outgoing;
    }
    throw PreconditionError("FlatBoundary::apply: unknown regime");
}

DiscreteKernel FlatBoundary::kernel(Parallelism parallelism) const {
    DiscreteKernel k(grid_);
    const std::size_t n = grid_.size();
    const std::vector<double> m = maxwellian_on(grid_);
    switch (regime_) {
    case Regime::specular:
        for (std::size_t c = 0; c < n; ++c) k.set_mirror_mass(c, 1.0);
        k.metadata().kind = "flat-specular";
        break;
    case Regime::perfect_accommodation: {
        const double d = normal_flux(grid_, m);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) k.set_dense(r, c, grid_.speed_z(c) * m[r] / d);
        }
        k.metadata().kind = "flat-perfect-accommodation";
        break;
    }
    case Regime::maxwell_like: {
        const double d = weighted_flux(m, accommodation_, grid_);
        for (std::size_t r = 0; d > 0.0 && r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                k.set_dense(r, c, accommodation_[r] * accommodation_[c] * grid_.speed_z(c) * m[r] / d);
            }
        }
        for (std::size_t c = 0; c < n; ++c) k.set_mirror_mass(c, 1.0 - accommodation_[c]);
        k.metadata().kind = "flat-maxwell-like";
        break;
    }
    case Regime::numerical_albedo: {
        // column c is the response to a unit cell of inflow mass
        parallel_for(n, parallelism, [&](std::size_t c) {
            std::vector<double> unit(n, 0.0);
            unit[c] = 1.0;
            const std::vector<double> out = solver_->solve(unit).outgoing;
            for (std::size_t r = 0; r < n; ++r) k.set_dense(r, c, out[r] / grid_.measure(c));
        });
        k.metadata().kind = "flat-numerical-albedo";
        break;
    }
    }
    return k;
}

double moment_accommodation(std::span<const double> f_in, std::span<const double> f_out,
                            std::span<const double> accommodation, const VelocityGrid& grid, Moment moment) {
    check_half_grid(f_in, grid, "moment_accommodation");
    check_half_grid(f_out, grid, "moment_accommodation");
    const auto weight = [moment](Velocity v) {
        switch (moment) {
        case Moment::tangential: return v.x;
        case Moment::normal: return std::abs(v.z);
        case Moment::energy: return 0.5 * (v.x * v.x + v.z * v.z);
        }
        return 0.0;
    };
    double incoming = 0.0, outgoing = 0.0, equilibrium = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const double w = grid.speed_z(c) * grid.measure(c);
        incoming += w * weight(grid.incoming(c)) * f_in[c];
        outgoing += w * weight(grid.outgoing(c)) * f_out[c];
        equilibrium += w * weight(grid.outgoing(c)) * maxwellian_M(grid.outgoing(c));
    }
    const double j0 = beta1(f_in, accommodation, grid);
    const double den = incoming - j0 * equilibrium;
    if (!(std::abs(den) > 1e-300)) throw PreconditionError("moment_accommodation: degenerate denominator");
    return (incoming - outgoing) / den;
}

} // namespace gsi
