#include "gsi/lksl.hpp"

#include "gsi/errors.hpp"
#include "gsi/flat_bc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gsi {

namespace {

// (1 - exp(-d)) / d, the cell average of exp(-s) over s in [0, d]
double mean_decay(double d) noexcept { return d > 0.0 ? -std::expm1(-d) / d : 1.0; }

void check_inflow(std::span<const double> f_star, const VelocityGrid& grid, const char* who) {
    if (f_star.size() != grid.size()) throw PreconditionError(std::string(who) + ": inflow does not match the grid");
    for (double f : f_star) {
        if (!std::isfinite(f)) throw PreconditionError(std::string(who) + ": inflow must be finite");
    }
}

} // namespace

LayerDiscretization::LayerDiscretization(const FlatWallPotential& p, const VelocityGrid& grid,
                                         const LkslOptions& options) {
    if (options.z_points < 2) throw PreconditionError("LayerDiscretization: need at least 2 heights");
    if (options.trapped_ordinates < 1) throw PreconditionError("LayerDiscretization: need trapped ordinates");
    options.quadrature.validate();

    const double threshold = p.escape_speed();
    const auto nt = static_cast<std::size_t>(options.trapped_ordinates);
    const double de = threshold / static_cast<double>(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        const double e = (static_cast<double>(k) + 0.5) * de;
        magnitude_.push_back(e);
        flux_weight_.push_back(e * de);
    }
    trapped_count_ = nt;
    const GridAxis& normal = grid.normal();
    for (std::size_t j = 0; j < normal.size(); ++j) {
        const double vz = normal.nodes[j];
        if (!(vz > 0.0)) throw PreconditionError("LayerDiscretization: normal nodes must be positive");
        magnitude_.push_back(equivalent_velocity(p, 0.0, vz));
        flux_weight_.push_back(vz * normal.weights[j]);
    }

    double top = 0.0;
    for (double e : magnitude_) {
        turning_.push_back(turning_points(p, e));
        top = std::max(top, turning_.back().z_minus);
    }
    const auto nz = static_cast<std::size_t>(options.z_points);
    heights_.resize(nz);
    for (std::size_t i = 0; i < nz; ++i) heights_[i] = top * static_cast<double>(i) / static_cast<double>(nz - 1);
    heights_.back() = top;

    const std::size_t nm = magnitudes();
    cell_time_.assign(cells() * nm, 0.0);
    for (std::size_t n = 0; n < cells(); ++n) {
        for (std::size_t m = 0; m < nm; ++m) {
            const auto [lo, hi] = span_in_cell(n, m);
            if (!(lo < hi)) continue;
            const double e = magnitude_[m];
            auto speed = [&p, e](double z) {
                const double s = inverse_speed_inside(p, z, e);
                return std::isfinite(s) ? s : 0.0;
            };
            cell_time_[n * nm + m] = numerics::integrate_singular(
                speed, lo, hi, turning_flags(p, e, lo, hi, turning_[m], options.quadrature));
        }
    }
}

std::pair<double, double> LayerDiscretization::span_in_cell(std::size_t n, std::size_t m) const noexcept {
    const TurningPair& tp = turning_[m];
    return {std::max(heights_[n], tp.z_plus), std::min(heights_[n + 1], tp.z_minus)};
}

std::vector<double> LayerDiscretization::signed_ordinates() const {
    const std::size_t nm = magnitudes();
    std::vector<double> e(2 * nm);
    for (std::size_t m = 0; m < nm; ++m) {
        e[signed_index(m, false)] = -magnitude_[m];
        e[signed_index(m, true)] = magnitude_[m];
    }
    return e;
}

std::size_t LayerDiscretization::signed_index(std::size_t m, bool positive) const noexcept {
    const std::size_t nm = magnitudes();
    return positive ? nm + m : nm - 1 - m;
}

LkslSolver::LkslSolver(CollisionKernelModel model, FlatWallPotential p, VelocityGrid grid, LkslOptions options)
    : model_(model), potential_(p), grid_(std::move(grid)), options_(options), layer_(potential_, grid_, options_) {
    if (!(options_.tolerance > 0.0) || options_.max_iterations < 1) {
        throw PreconditionError("LkslSolver: tolerance and max_iterations must be positive");
    }
    const std::size_t nx = grid_.nx();
    const std::size_t nm = layer_.magnitudes();
    const std::size_t nq = 2 * nm;
    const std::size_t ncell = layer_.cells();
    const std::vector<double> ez = layer_.signed_ordinates();
    const GridAxis& tx = grid_.tangential();

    gx_.resize(nx * nx);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < nx; ++j) gx_[i * nx + j] = model_.factor(tx.nodes[i], tx.nodes[j]);
    }
    gz_.resize(nq * nq);
    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = 0; j < nq; ++j) gz_[i * nq + j] = model_.factor(ez[i], ez[j]);
    }

    omega_.assign(ncell * nq, 0.0);
    for (std::size_t n = 0; n < ncell; ++n) {
        const double dz = layer_.heights()[n + 1] - layer_.heights()[n];
        for (std::size_t m = 0; m < nm; ++m) {
            const double w = layer_.flux_weight(m) * layer_.cell_time(n, m) / dz;
            omega_[n * nq + layer_.signed_index(m, false)] = w;
            omega_[n * nq + layer_.signed_index(m, true)] = w;
        }
    }

    // discrete loss rates: the gain operator applied to G, which makes G an exact fixed point
    loss_.assign(ncell * nx * nq, 0.0);
    depth_.assign(ncell * nx * nq, 0.0);
    std::vector<double> weighted(nx * nq), partial(nx * nq);
    for (std::size_t n = 0; n < ncell; ++n) {
        double total = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t q = 0; q < nq; ++q) {
                const double v = maxwellian_G(tx.nodes[ix], ez[q]) * omega_[n * nq + q] * tx.weights[ix];
                weighted[ix * nq + q] = v;
                total += v;
            }
        }
        const bool bumped = model_.bump() > 0.0;
        if (bumped) {
            for (std::size_t ix = 0; ix < nx; ++ix) {
                for (std::size_t q = 0; q < nq; ++q) {
                    double s = 0.0;
                    for (std::size_t r = 0; r < nq; ++r) s += gz_[q * nq + r] * weighted[ix * nq + r];
                    partial[ix * nq + q] = s;
                }
            }
        }
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t q = 0; q < nq; ++q) {
                double rate = model_.floor_rate() * total;
                if (bumped) {
                    double s = 0.0;
                    for (std::size_t jx = 0; jx < nx; ++jx) s += gx_[ix * nx + jx] * partial[jx * nq + q];
                    rate += model_.bump() * s;
                }
                const std::size_t at = (n * nx + ix) * nq + q;
                loss_[at] = rate;
                const std::size_t m = q < nm ? nm - 1 - q : q - nm;
                depth_[at] = rate * layer_.cell_time(n, m);
            }
        }
    }
}

LkslResult LkslSolver::solve(std::span<const double> f_star) const {
    check_inflow(f_star, grid_, "LkslSolver::solve");
    const std::size_t nx = grid_.nx();
    const std::size_t nm = layer_.magnitudes();
    const std::size_t nq = 2 * nm;
    const std::size_t ncell = layer_.cells();
    const std::size_t nt = layer_.trapped_count();
    const std::vector<double> ez = layer_.signed_ordinates();
    const GridAxis& tx = grid_.tangential();
    const auto at = [&](std::size_t n, std::size_t ix, std::size_t q) { return (n * nx + ix) * nq + q; };

    std::vector<double> g(nx * nq);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t q = 0; q < nq; ++q) g[ix * nq + q] = maxwellian_G(tx.nodes[ix], ez[q]);
    }
    std::vector<double> decay(depth_.size()), average(depth_.size());
    for (std::size_t i = 0; i < depth_.size(); ++i) {
        decay[i] = std::exp(-depth_[i]);
        average[i] = mean_decay(depth_[i]);
    }
    // cells visited by each magnitude
    std::vector<std::size_t> first(nm, ncell), last(nm, 0);
    for (std::size_t m = 0; m < nm; ++m) {
        for (std::size_t n = 0; n < ncell; ++n) {
            if (layer_.cell_time(n, m) > 0.0) {
                first[m] = std::min(first[m], n);
                last[m] = n;
            }
        }
        if (first[m] == ncell) throw NumericalError("LkslSolver: an ordinate visits no cell; refine the z grid");
    }

    double scale = 0.0;
    for (double f : f_star) scale = std::max(scale, std::abs(f));
    if (scale == 0.0) scale = 1.0;

    // start from the equilibrium carrying the inflow flux
    const double start = diffuse_kappa(f_star, grid_) * std::exp(0.5 * potential_.well_depth());
    std::vector<double> mean(ncell * nx * nq, 0.0), next(mean.size(), 0.0), target(mean.size(), 0.0);
    for (std::size_t n = 0; n < ncell; ++n) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t q = 0; q < nq; ++q) {
                // slots of ordinates that never enter cell n stay zero in both buffers
                if (omega_[n * nq + q] > 0.0) mean[at(n, ix, q)] = start * g[ix * nq + q];
            }
        }
    }

    const std::vector<double>& h = layer_.heights();
    SurfaceField field(h, tx.nodes, ez);
    std::vector<double> outgoing(grid_.size(), 0.0);
    std::vector<double> weighted(nx * nq), partial(nx * nq);
    const bool bumped = model_.bump() > 0.0;

    auto update_targets = [&](const std::vector<double>& phi) {
        for (std::size_t n = 0; n < ncell; ++n) {
            double total = 0.0;
            for (std::size_t ix = 0; ix < nx; ++ix) {
                for (std::size_t q = 0; q < nq; ++q) {
                    const double v = phi[at(n, ix, q)] * omega_[n * nq + q] * tx.weights[ix];
                    weighted[ix * nq + q] = v;
                    total += v;
                }
            }
            if (bumped) {
                for (std::size_t ix = 0; ix < nx; ++ix) {
                    for (std::size_t q = 0; q < nq; ++q) {
                        double s = 0.0;
                        for (std::size_t r = 0; r < nq; ++r) s += gz_[q * nq + r] * weighted[ix * nq + r];
                        partial[ix * nq + q] = s;
                    }
                }
            }
            for (std::size_t ix = 0; ix < nx; ++ix) {
                for (std::size_t q = 0; q < nq; ++q) {
                    const std::size_t i = at(n, ix, q);
                    if (!(loss_[i] > 0.0)) continue;
                    double gain = model_.floor_rate() * total;
                    if (bumped) {
                        double s = 0.0;
                        for (std::size_t jx = 0; jx < nx; ++jx) s += gx_[ix * nx + jx] * partial[jx * nq + q];
                        gain += model_.bump() * s;
                    }
                    target[i] = g[ix * nq + q] * gain / loss_[i];
                }
            }
        }
    };

    // one cell: returns the exit value and stores the cell average
    auto cross = [&](std::size_t i, double x) {
        const double t = target[i];
        next[i] = t + (x - t) * average[i];
        return t + (x - t) * decay[i];
    };
    auto record = [&](std::size_t iz, std::size_t ix, std::size_t q, double v, bool enabled) {
        if (enabled) field.set(iz, ix, q, v);
    };

    auto sweep = [&](bool keep) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t m = 0; m < nm; ++m) {
                const std::size_t up = layer_.signed_index(m, true);
                const std::size_t down = layer_.signed_index(m, false);
                const TurningPair& tp = layer_.turning(m);
                double x = 0.0;
                if (m < nt) {
                    double loop = 0.0, total_depth = 0.0;
                    for (std::size_t n = first[m]; n <= last[m]; ++n) {
                        const std::size_t i = at(n, ix, up);
                        loop = target[i] + (loop - target[i]) * decay[i];
                        total_depth += depth_[i];
                    }
                    for (std::size_t n = last[m] + 1; n-- > first[m];) {
                        const std::size_t i = at(n, ix, down);
                        loop = target[i] + (loop - target[i]) * decay[i];
                        total_depth += depth_[i];
                    }
                    const double open = -std::expm1(-total_depth);
                    if (!(open > 0.0)) throw NumericalError("LkslSolver: trapped ordinate without collisions");
                    x = loop / open;
                } else {
                    x = f_star[grid_.index(ix, m - nt)];
                }
                for (std::size_t n = first[m]; n <= last[m]; ++n) {
                    record(n, ix, up, x, keep && h[n] >= tp.z_plus);
                    x = cross(at(n, ix, up), x);
                }
                if (keep && h[last[m] + 1] <= tp.z_minus) field.set(last[m] + 1, ix, up, x);
                if (keep && h[last[m] + 1] <= tp.z_minus) field.set(last[m] + 1, ix, down, x);
                for (std::size_t n = last[m] + 1; n-- > first[m];) {
                    x = cross(at(n, ix, down), x);
                    record(n, ix, down, x, keep && h[n] >= tp.z_plus);
                }
                if (m >= nt) outgoing[grid_.index(ix, m - nt)] = x;
            }
        }
    };

    LkslResult result;
    for (int it = 1;; ++it) {
        update_targets(mean);
        sweep(false);
        double change = 0.0;
        for (std::size_t i = 0; i < mean.size(); ++i) change = std::max(change, std::abs(next[i] - mean[i]));
        mean.swap(next);
        const double residual = change / scale;
        result.residual_history.push_back(residual);
        result.iterations = it;
        result.residual = residual;
        if (!std::isfinite(residual)) throw NumericalError("LkslSolver: iteration diverged");
        if (residual < options_.tolerance) break;
        if (it >= options_.max_iterations) {
            throw NumericalError("LkslSolver: no convergence after " + std::to_string(it) +
                                 " iterations (residual " + std::to_string(residual) + ")");
        }
    }
    // final sweep with the converged averages fills the field and the outgoing trace
    update_targets(mean);
    sweep(true);

    result.outgoing = std::move(outgoing);
    result.field = std::move(field);
    const double in = normal_flux(grid_, f_star);
    result.mass_flux_residual = in > 0.0 ? flux_imbalance(grid_, f_star, result.outgoing)
                                         : std::abs(normal_flux(grid_, result.outgoing));
    return result;
}

LkslResult solve_lksl(std::span<const double> f_star, const CollisionKernelModel& model, const FlatWallPotential& p,
                      const VelocityGrid& grid, const LkslOptions& options) {
    return LkslSolver(model, p, grid, options).solve(f_star);
}

ClosedFormResult phi01_closed_form(std::span<const double> f_star, std::optional<double> alpha1,
                                   const CollisionKernelModel& model, const FlatWallPotential& p,
                                   const VelocityGrid& grid, const LkslOptions& options) {
    check_inflow(f_star, grid, "phi01_closed_form");
    const LayerDiscretization layer(p, grid, options);
    const std::size_t nx = grid.nx();
    const std::size_t nt = layer.trapped_count();
    const std::size_t nm = layer.magnitudes();
    const std::size_t ncell = layer.cells();
    const std::vector<double>& h = layer.heights();
    const GridAxis& tx = grid.tangential();

    ClosedFormResult out;
    const std::vector<AccommodationSample> table = accommodation_table(model, p, grid, options.quadrature);
    out.accommodation.resize(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) out.accommodation[c] = table[c].a;

    if (alpha1) {
        out.alpha1 = *alpha1;
    } else {
        // flux weights e de = v dv, and G = M exp(-W_m / 2) on the inflow
        double num = 0.0, den = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            for (std::size_t m = nt; m < nm; ++m) {
                const std::size_t c = grid.index(ix, m - nt);
                const double w = tx.weights[ix] * layer.flux_weight(m) * out.accommodation[c];
                num += w * f_star[c];
                den += w * maxwellian_G(tx.nodes[ix], layer.magnitude(m));
            }
        }
        if (!(den > 0.0)) throw PreconditionError("phi01_closed_form: vanishing accommodation weight");
        out.alpha1 = num / den;
    }

    SurfaceField field(h, tx.nodes, layer.signed_ordinates());
    for (std::size_t m = 0; m < nm; ++m) {
        const double e = layer.magnitude(m);
        const TurningPair& tp = layer.turning(m);
        const std::size_t up = layer.signed_index(m, true);
        const std::size_t down = layer.signed_index(m, false);
        if (m < nt) {
            for (std::size_t iz = 0; iz < h.size(); ++iz) {
                if (h[iz] < tp.z_plus || h[iz] > tp.z_minus) continue;
                for (std::size_t ix = 0; ix < nx; ++ix) {
                    const double eq = out.alpha1 * maxwellian_G(tx.nodes[ix], e);
                    field.set(iz, ix, up, eq);
                    field.set(iz, ix, down, eq);
                }
            }
            continue;
        }
        // cumulative transit integrals from z = 0 to each height
        std::vector<TransitIntegrals> cumulative(h.size());
        for (std::size_t n = 0; n < ncell; ++n) {
            const auto [lo, hi] = layer.span_in_cell(n, m);
            TransitIntegrals acc = cumulative[n];
            if (lo < hi) {
                const TransitIntegrals t = transit_integrals(model, p, e, lo, hi, tp, options.quadrature);
                acc.time += t.time;
                acc.isotropic += t.isotropic;
                acc.anisotropic += t.anisotropic;
            }
            cumulative[n + 1] = acc;
        }
        const TransitIntegrals& whole = cumulative.back();
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double f = f_star[grid.index(ix, m - nt)];
            const double eq = out.alpha1 * maxwellian_G(tx.nodes[ix], e);
            const double total = optical_depth(model, whole, tx.nodes[ix]);
            const double top = eq + (f - eq) * std::exp(-total);
            for (std::size_t iz = 0; iz < h.size(); ++iz) {
                if (h[iz] > tp.z_minus) continue;
                const double d = optical_depth(model, cumulative[iz], tx.nodes[ix]);
                field.set(iz, ix, up, eq + (f - eq) * std::exp(-d));
                field.set(iz, ix, down, eq + (top - eq) * std::exp(-(total - d)));
            }
        }
    }
    out.field = std::move(field);

    out.outgoing.resize(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const double a = out.accommodation[c];
        const double e = layer.magnitude(nt + grid.jz_of(c));
        out.outgoing[c] = (1.0 - a) * f_star[c] + a * out.alpha1 * maxwellian_G(grid.incoming(c).x, e);
    }
    return out;
}

} // namespace gsi
