#include "gsi/rough_wall.hpp"

#include "gsi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gsi {

namespace {

using State = std::array<double, 5>; // y, z, v_x, v_z, optical depth

constexpr std::size_t block_size = 2048;

double hamiltonian(const PeriodicWallPotential& pot, double y, double z, Velocity v) {
    const double potential = z <= 0.0 ? pot.outer_value() : pot.eval_continued(y, z).value;
    return 0.5 * (v.x * v.x + v.z * v.z) + 0.5 * potential;
}

std::size_t clamp_locate(const GridAxis& axis, double x, bool& clamped) {
    const std::size_t i = axis.locate(x);
    if (i != GridAxis::npos) return i;
    clamped = true;
    return x < axis.edges.front() ? 0 : axis.size() - 1;
}

double periodic_distance(double a, double b) {
    const double d = std::abs(reduce_period(a) - reduce_period(b));
    return std::min(d, 1.0 - d);
}

} // namespace

std::array<double, 3> quasi_random_point(std::uint64_t i) noexcept {
    // root of x^4 = x + 1
    constexpr double g = 1.2207440846057594;
    constexpr double a1 = 1.0 / g;
    constexpr double a2 = a1 / g;
    constexpr double a3 = a2 / g;
    const auto frac = [](double x) { return x - std::floor(x); };
    const auto n = static_cast<double>(i);
    return {frac(0.5 + a1 * n), frac(0.5 + a2 * n), frac(0.5 + a3 * n)};
}

EntryState flux_entry(std::uint64_t i, double speed_max) noexcept {
    const auto u = quasi_random_point(i);
    const double speed = speed_max * std::cbrt(u[1]);
    const double c = 1.0 - 2.0 * u[2];
    return {u[0], {speed * c, speed * std::sqrt(std::max(0.0, 1.0 - c * c))}};
}

ExitRecord trace_particle(const PeriodicWallPotential& pot, const CollisionKernelModel& model, double entry_y,
                          Velocity entry_velocity, const numerics::OdeSpec& spec) {
    if (!(entry_velocity.z > 0.0)) throw PreconditionError("trace_particle: entry velocity must point into the wall");
    const double beta = pot.period_ratio();
    auto field = [&](const State& x) {
        const PeriodicPotentialSample v = pot.eval_continued(x[0], x[1]);
        return State{x[2] / beta, x[3], -0.5 * v.d_y / beta, -0.5 * v.d_z, model.free_space_rate({x[2], x[3]})};
    };
    auto stop = [](const State& x) { return x[1]; };
    const State start{entry_y, 0.0, entry_velocity.x, entry_velocity.z, 0.0};
    const numerics::OdeResult<5> out = numerics::trace_ode(start, field, stop, spec);

    ExitRecord rec;
    rec.entry_y = entry_y;
    rec.entry_velocity = entry_velocity;
    rec.exit_y = reduce_period(out.state[0]);
    rec.exit_velocity = {out.state[2], out.state[3]};
    rec.flight_time = out.time;
    rec.optical_depth = out.state[4];
    rec.steps = out.steps;
    const double h0 = hamiltonian(pot, entry_y, 0.0, entry_velocity);
    const double h1 = hamiltonian(pot, out.state[0], out.state[1], rec.exit_velocity);
    rec.energy_drift = std::abs(h1 - h0) / h0;
    return rec;
}

RoughKernelSet build_rough_kernels(const PeriodicWallPotential& pot, const CollisionKernelModel& model,
                                   const VelocityGrid& grid, const RoughKernelOptions& options) {
    if (!grid.symmetric()) throw PreconditionError("build_rough_kernels: grid must be symmetric");
    if (options.samples_per_cell < 1) throw PreconditionError("build_rough_kernels: samples_per_cell must be >= 1");
    if (!(options.normal_cutoff >= 0.0)) throw PreconditionError("build_rough_kernels: normal cutoff must be >= 0");
    options.ode.validate();

    const std::size_t n = grid.size();
    const GridAxis& tx = grid.tangential();
    const GridAxis& tz = grid.normal();
    RoughKernelSet set{DiscreteKernel(grid), DiscreteKernel(grid), std::vector<double>(n, 0.0),
                       std::vector<double>(n, 0.0), 0.0};
    std::vector<long> discarded(n, 0);
    std::vector<double> clamped(n, 0.0), cutoff(n, 0.0);

    parallel_for(n, options.parallelism, [&](std::size_t c) {
        const std::size_t ix = grid.ix_of(c);
        const std::size_t jz = grid.jz_of(c);
        const double xlo = tx.edges[ix], xw = tx.edges[ix + 1] - xlo;
        const double zlo = tz.edges[jz], zhi = tz.edges[jz + 1];
        if (options.normal_cutoff > zlo) {
            const double top = std::min(options.normal_cutoff, zhi);
            cutoff[c] = (top * top - zlo * zlo) / (zhi * zhi - zlo * zlo);
        }
        std::vector<double> hits(n, 0.0), survivors(n, 0.0);
        double total = 0.0, survived = 0.0, off_grid = 0.0;
        long traced = 0;
        for (int s = 0; s < options.samples_per_cell; ++s) {
            const auto u = quasi_random_point(static_cast<std::uint64_t>(s));
            const Velocity v{xlo + xw * u[1], zlo + (zhi - zlo) * u[2]};
            if (!(v.z > options.normal_cutoff) || !(v.z > 0.0)) continue;
            ++traced;
            ExitRecord rec;
            try {
                rec = trace_particle(pot, model, u[0], v, options.ode);
            } catch (const NumericalError&) {
                ++discarded[c];
                continue;
            }
            bool outside = false;
            const std::size_t ox = clamp_locate(tx, rec.exit_velocity.x, outside);
            const std::size_t oz = clamp_locate(tz, -rec.exit_velocity.z, outside);
            const std::size_t r = grid.index(ox, oz);
            // equilibrium flux inside the cell, so that M is reproduced to second order in the cell width
            const double w = v.z * maxwellian_M(v);
            const double weight_alive = w * std::exp(-rec.optical_depth);
            hits[r] += w;
            survivors[r] += weight_alive;
            total += w;
            survived += weight_alive;
            if (outside) off_grid += w;
        }
        if (traced == 0 || !(total > 0.0)) {
            throw NumericalError("build_rough_kernels: no usable sample in column (" + std::to_string(ix) + ", " +
                                 std::to_string(jz) + ")");
        }
        if (static_cast<double>(discarded[c]) > options.max_discarded_fraction * static_cast<double>(traced)) {
            throw NumericalError("build_rough_kernels: " + std::to_string(discarded[c]) + " of " +
                                 std::to_string(traced) + " trajectories failed in column (" + std::to_string(ix) +
                                 ", " + std::to_string(jz) + ")");
        }
        const double vc = grid.speed_z(c);
        for (std::size_t r = 0; r < n; ++r) {
            if (hits[r] == 0.0) continue;
            const double scale = vc / (grid.speed_z(r) * grid.measure(r) * total);
            set.specular.set_dense(r, c, hits[r] * scale);
            set.survival.set_dense(r, c, survivors[r] * scale);
        }
        set.psi[c] = 1.0 - survived / total;
        clamped[c] = off_grid / total;
    });

    long dropped = 0;
    double worst_cutoff = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        set.accommodation[c] = set.psi[grid.reversed(c)];
        dropped += discarded[c];
        worst_cutoff = std::max(worst_cutoff, cutoff[c]);
        set.clamped_flux_fraction = std::max(set.clamped_flux_fraction, clamped[c]);
    }
    for (DiscreteKernel* k : {&set.specular, &set.survival}) {
        KernelMetadata& m = k->metadata();
        m.samples_per_column = options.samples_per_cell;
        m.ode_tolerance = options.ode.step_tol;
        m.discarded_samples = dropped;
        m.cutoff_flux_fraction = worst_cutoff;
        m.normal_cutoff = options.normal_cutoff;
    }
    set.specular.metadata().kind = "rough-specular";
    set.survival.metadata().kind = "rough-survival";
    return set;
}

DiscreteKernel build_specular_kernel(const PeriodicWallPotential& pot, const VelocityGrid& grid,
                                     const RoughKernelOptions& options) {
    return build_rough_kernels(pot, CollisionKernelModel::constant(1.0), grid, options).specular;
}

double diffuse_amplitude(const RoughKernelSet& set, std::span<const double> f_in) {
    const VelocityGrid& grid = set.specular.grid();
    if (f_in.size() != grid.size()) throw PreconditionError("diffuse_amplitude: inflow does not match the grid");
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const double w = grid.speed_z(c) * grid.measure(c);
        num += w * set.psi[c] * f_in[c];
        den += w * set.accommodation[c] * maxwellian_M(grid.outgoing(c));
    }
    if (!(den > 0.0)) throw PreconditionError("diffuse_amplitude: thermalised fraction vanishes");
    return num / den;
}

std::vector<double> apply_rough_bc(const RoughKernelSet& set, std::span<const double> f_in, RoughMode mode) {
    const VelocityGrid& grid = set.specular.grid();
    if (f_in.size() != grid.size()) throw PreconditionError("apply_rough_bc: inflow does not match the grid");
    if (mode == RoughMode::specular) return set.specular.apply(f_in);
    std::vector<double> out = set.survival.apply(f_in);
    const double sigma = diffuse_amplitude(set, f_in);
    for (std::size_t r = 0; r < grid.size(); ++r) {
        out[r] += set.accommodation[r] * sigma * maxwellian_M(grid.outgoing(r));
    }
    return out;
}

DiscreteKernel thermalized_kernel(const RoughKernelSet& set) {
    const VelocityGrid& grid = set.specular.grid();
    const std::size_t n = grid.size();
    double den = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        den += grid.speed_z(r) * grid.measure(r) * set.accommodation[r] * maxwellian_M(grid.outgoing(r));
    }
    if (!(den > 0.0)) throw PreconditionError("thermalized_kernel: thermalised fraction vanishes");
    DiscreteKernel k(grid);
    for (std::size_t r = 0; r < n; ++r) {
        const double mr = maxwellian_M(grid.outgoing(r));
        for (std::size_t c = 0; c < n; ++c) {
            k.set_dense(r, c, set.accommodation[r] * set.psi[c] * grid.speed_z(c) * mr / den);
        }
    }
    k.metadata().kind = "rough-thermalized";
    return k;
}

double relative_reciprocity_defect(const DiscreteKernel& k) {
    const VelocityGrid& g = k.grid();
    const std::vector<double> m = maxwellian_on(g);
    double largest = 0.0;
    for (std::size_t r = 0; r < g.size(); ++r) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            largest = std::max(largest, m[c] * g.speed_z(r) * k.density_entry(r, c));
        }
    }
    return largest > 0.0 ? reciprocity_defect(k) / largest : 0.0;
}

RoughKernelReport verify_rough_kernel(const RoughKernelSet& set) {
    const DiscreteKernel& k = set.specular;
    const VelocityGrid& g = k.grid();
    const std::size_t n = g.size();
    RoughKernelReport rep;
    rep.specular = verify_kernel_axioms(k);
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            s += k.density_entry(r, c) * g.measure(c);
            rep.survival_excess = std::max(rep.survival_excess, set.survival.dense(r, c) - k.dense(r, c));
        }
        rep.density_normalization = std::max(rep.density_normalization, std::abs(s - 1.0));
    }
    rep.specular_reciprocity_relative = relative_reciprocity_defect(k);
    rep.survival_reciprocity = relative_reciprocity_defect(set.survival);
    rep.thermalized_reciprocity = relative_reciprocity_defect(thermalized_kernel(set));
    for (double a : set.accommodation) {
        rep.accommodation_range = std::max({rep.accommodation_range, -a, a - 1.0});
    }
    return rep;
}

MeasureReport measure_preservation(const PeriodicWallPotential& pot, long samples, int rings, int sectors,
                                   double speed_max, const numerics::OdeSpec& spec, Parallelism parallelism) {
    if (samples < 1 || rings < 1 || sectors < 1 || !(speed_max > 0.0)) {
        throw PreconditionError("measure_preservation: invalid sampling parameters");
    }
    const auto bins = static_cast<std::size_t>(rings) * static_cast<std::size_t>(sectors);
    const auto total = static_cast<std::size_t>(samples);
    const std::size_t blocks = (total + block_size - 1) / block_size;
    std::vector<std::vector<double>> in(blocks, std::vector<double>(bins, 0.0)), out(in);
    std::vector<long> dropped(blocks, 0);
    const CollisionKernelModel model = CollisionKernelModel::constant(1.0);
    // equal flux mass per bin: uniform in speed^3 and in cos(angle to the tangential axis)
    auto bin_of = [&](Velocity v) {
        const double speed = std::hypot(v.x, v.z);
        const double c = speed > 0.0 ? v.x / speed : 1.0;
        const double ring_coord = std::pow(speed / speed_max, 3.0) * rings;
        const double sector_coord = 0.5 * (1.0 - c) * sectors;
        const auto ring = std::min<std::size_t>(static_cast<std::size_t>(std::max(ring_coord, 0.0)), rings - 1);
        const auto sector = std::min<std::size_t>(static_cast<std::size_t>(std::max(sector_coord, 0.0)), sectors - 1);
        return ring * static_cast<std::size_t>(sectors) + sector;
    };
    parallel_for(blocks, parallelism, [&](std::size_t b) {
        const std::size_t end = std::min(total, (b + 1) * block_size);
        for (std::size_t i = b * block_size; i < end; ++i) {
            const EntryState e = flux_entry(i, speed_max);
            if (!(e.v.z > 0.0)) continue;
            ExitRecord rec;
            try {
                rec = trace_particle(pot, model, e.y, e.v, spec);
            } catch (const NumericalError&) {
                ++dropped[b];
                continue;
            }
            in[b][bin_of(e.v)] += 1.0;
            out[b][bin_of(rec.exit_velocity)] += 1.0;
        }
    });
    MeasureReport rep;
    rep.samples = samples;
    rep.inflow.assign(bins, 0.0);
    rep.outflow.assign(bins, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        rep.discarded += dropped[b];
        for (std::size_t k = 0; k < bins; ++k) {
            rep.inflow[k] += in[b][k];
            rep.outflow[k] += out[b][k];
        }
    }
    for (std::size_t k = 0; k < bins; ++k) {
        if (rep.inflow[k] > 0.0) {
            rep.worst_relative_defect =
                std::max(rep.worst_relative_defect, std::abs(rep.outflow[k] - rep.inflow[k]) / rep.inflow[k]);
        }
    }
    return rep;
}

ReversibilityReport reversibility_check(const PeriodicWallPotential& pot, const CollisionKernelModel& model,
                                        long samples, double speed_max, double tolerance,
                                        const numerics::OdeSpec& spec, Parallelism parallelism) {
    if (samples < 1 || !(speed_max > 0.0) || !(tolerance > 0.0)) {
        throw PreconditionError("reversibility_check: invalid sampling parameters");
    }
    const auto total = static_cast<std::size_t>(samples);
    const std::size_t blocks = (total + block_size - 1) / block_size;
    std::vector<ReversibilityReport> partial(blocks);
    parallel_for(blocks, parallelism, [&](std::size_t b) {
        ReversibilityReport& rep = partial[b];
        const std::size_t end = std::min(total, (b + 1) * block_size);
        for (std::size_t i = b * block_size; i < end; ++i) {
            const EntryState e = flux_entry(i, speed_max);
            if (!(e.v.z > 0.0)) continue;
            ++rep.samples;
            ExitRecord fwd, back;
            try {
                fwd = trace_particle(pot, model, e.y, e.v, spec);
                back = trace_particle(pot, model, fwd.exit_y, {-fwd.exit_velocity.x, -fwd.exit_velocity.z}, spec);
            } catch (const NumericalError&) {
                ++rep.discarded;
                continue;
            }
            const double gap = std::max({periodic_distance(back.exit_y, e.y),
                                         std::abs(back.exit_velocity.x + e.v.x),
                                         std::abs(back.exit_velocity.z + e.v.z)});
            rep.worst_round_trip = std::max(rep.worst_round_trip, gap);
            rep.worst_energy_drift = std::max({rep.worst_energy_drift, fwd.energy_drift, back.energy_drift});
            const double speed = std::hypot(e.v.x, e.v.z);
            const double out_speed = std::hypot(fwd.exit_velocity.x, fwd.exit_velocity.z);
            const double back_speed = std::hypot(back.exit_velocity.x, back.exit_velocity.z);
            rep.worst_speed_defect = std::max({rep.worst_speed_defect, std::abs(out_speed - speed) / speed,
                                               std::abs(back_speed - out_speed) / out_speed});
            if (gap >= tolerance) continue;
            ++rep.within_tolerance;
            // depths compared only along pairs that actually retrace each other
            if (fwd.optical_depth > 0.0) {
                rep.worst_depth_mismatch = std::max(
                    rep.worst_depth_mismatch, std::abs(fwd.optical_depth - back.optical_depth) / fwd.optical_depth);
            }
        }
    });
    ReversibilityReport rep;
    for (const ReversibilityReport& p : partial) {
        rep.samples += p.samples;
        rep.discarded += p.discarded;
        rep.within_tolerance += p.within_tolerance;
        rep.worst_round_trip = std::max(rep.worst_round_trip, p.worst_round_trip);
        rep.worst_energy_drift = std::max(rep.worst_energy_drift, p.worst_energy_drift);
        rep.worst_speed_defect = std::max(rep.worst_speed_defect, p.worst_speed_defect);
        rep.worst_depth_mismatch = std::max(rep.worst_depth_mismatch, p.worst_depth_mismatch);
    }
    return rep;
}

} // namespace gsi
