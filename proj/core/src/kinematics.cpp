#include "gsi/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gsi {

namespace {

double signed_unit(double x) { return std::signbit(x) && x != 0.0 ? -1.0 : 1.0; }

void check_axis(const GridAxis& a, const char* name) {
    const std::size_t n = a.nodes.size();
    if (n == 0 || a.weights.size() != n || a.edges.size() != n + 1) {
        throw PreconditionError(std::string("VelocityGrid: inconsistent ") + name + " axis");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a.weights[i] > 0.0)) throw PreconditionError(std::string("VelocityGrid: non-positive weight on ") + name);
        if (!(a.edges[i] <= a.nodes[i] && a.nodes[i] <= a.edges[i + 1])) {
            throw PreconditionError(std::string("VelocityGrid: node outside its cell on ") + name);
        }
        if (i > 0 && !(a.nodes[i - 1] < a.nodes[i])) {
            throw PreconditionError(std::string("VelocityGrid: unsorted nodes on ") + name);
        }
    }
}

// Moves a bracketed root towards `inside` until the state is admissible there, so that the
// inverse-square-root singularity sits on or just outside the integration interval.
template <class F>
double admissible_side(const F& excess, double root, double inside) {
    double step = std::numeric_limits<double>::epsilon() * std::max(std::abs(root), 1.0);
    double z = root;
    for (int k = 0; k < 64 && excess(z) > 0.0; ++k) {
        z = root + std::copysign(step, inside - root);
        step *= 2.0;
    }
    return z;
}

} // namespace

GridAxis GridAxis::uniform(int n, double lo, double hi) {
    if (n < 1 || !(lo < hi)) throw PreconditionError("GridAxis::uniform: need n >= 1 and lo < hi");
    GridAxis a;
    const double h = (hi - lo) / n;
    a.edges.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) a.edges[static_cast<std::size_t>(i)] = lo + h * i;
    a.edges.back() = hi;
    for (int i = 0; i < n; ++i) {
        // midpoint written symmetrically so that a mirrored axis is mirrored bit for bit
        const auto k = static_cast<std::size_t>(i);
        a.nodes.push_back(0.5 * (a.edges[k] + a.edges[k + 1]));
        a.weights.push_back(a.edges[k + 1] - a.edges[k]);
    }
    return a;
}

std::size_t GridAxis::locate(double x) const noexcept {
    if (!(x >= edges.front()) || !(x < edges.back())) return npos;
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

VelocityGrid::VelocityGrid(GridAxis tangential, GridAxis normal)
    : tangential_(std::move(tangential)), normal_(std::move(normal)) {
    check_axis(tangential_, "tangential");
    check_axis(normal_, "normal");
    if (!(normal_.edges.front() >= 0.0)) throw PreconditionError("VelocityGrid: normal axis must be non-negative");
    symmetric_ = true;
    const std::size_t n = tangential_.size();
    for (std::size_t i = 0; i < n && symmetric_; ++i) {
        symmetric_ = tangential_.nodes[i] == -tangential_.nodes[n - 1 - i] &&
                     tangential_.weights[i] == tangential_.weights[n - 1 - i];
    }
}

VelocityGrid VelocityGrid::half_space(int nx, int nz, double vx_max, double vz_max) {
    GridAxis tx = GridAxis::uniform(nx, -vx_max, vx_max);
    // enforce exact mirror symmetry of the tangential nodes
    const std::size_t n = tx.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        tx.nodes[n - 1 - i] = -tx.nodes[i];
        tx.weights[n - 1 - i] = tx.weights[i];
        tx.edges[n - i] = -tx.edges[i];
    }
    if (n % 2 == 1) tx.nodes[n / 2] = 0.0;
    return {std::move(tx), GridAxis::uniform(nz, 0.0, vz_max)};
}

Velocity VelocityGrid::incoming(std::size_t c) const noexcept {
    return {tangential_.nodes[ix_of(c)], normal_.nodes[jz_of(c)]};
}

Velocity VelocityGrid::outgoing(std::size_t c) const noexcept {
    return {tangential_.nodes[ix_of(c)], -normal_.nodes[jz_of(c)]};
}

double VelocityGrid::measure(std::size_t c) const noexcept {
    return tangential_.weights[ix_of(c)] * normal_.weights[jz_of(c)];
}

std::size_t VelocityGrid::reversed(std::size_t c) const {
    if (!symmetric_) throw PreconditionError("VelocityGrid::reversed: grid is not symmetric");
    return index(nx() - 1 - ix_of(c), jz_of(c));
}

double equivalent_velocity(const FlatWallPotential& p, double z, double v_z) {
    return signed_unit(v_z) * std::sqrt(v_z * v_z + p.value(z));
}

double physical_velocity(const FlatWallPotential& p, double z, double e_z) {
    const double w = p.value(z);
    const double d = e_z * e_z - w;
    if (d < 0.0) {
        // tolerate round-off at a turning point
        if (d > -8.0 * std::numeric_limits<double>::epsilon() * std::max(w, 1.0)) return 0.0;
        throw DomainError("physical_velocity: state is not admissible at this height");
    }
    return signed_unit(e_z) * std::sqrt(d);
}

TurningPair turning_points(const FlatWallPotential& p, double e_z) {
    const double r2 = e_z * e_z;
    const double zm = p.well_position();
    const double L = p.thickness();
    if (r2 == 0.0) return {zm, zm, true};
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * L;
    auto excess = [&p, r2](double z) { return p.value(z) - r2; };

    double hi = zm;
    double gap = L - zm;
    while (excess(hi) <= 0.0) {
        gap *= 0.5;
        hi = L - gap;
        if (gap < tol) {
            hi = std::nextafter(L, 0.0);
            break;
        }
    }
    TurningPair tp;
    tp.z_minus = admissible_side(excess, numerics::find_root_monotone(excess, zm, hi, tol), zm);
    tp.trapped = r2 < p.well_depth();
    tp.z_plus = tp.trapped ? admissible_side(excess, numerics::find_root_monotone(excess, 0.0, zm, tol), zm) : 0.0;
    return tp;
}

double inverse_speed_inside(const FlatWallPotential& p, double z, double e_z) noexcept {
    if (z >= p.thickness()) return std::numeric_limits<double>::infinity();
    const double d = e_z * e_z - p.eval(z).value;
    return d > 0.0 ? 1.0 / std::sqrt(d) : std::numeric_limits<double>::infinity();
}

double inverse_speed(const FlatWallPotential& p, double z, double e_z) {
    const double d = e_z * e_z - p.value(z);
    if (!(d > 0.0)) throw DomainError("inverse_speed: infinite at or beyond a turning point");
    return 1.0 / std::sqrt(d);
}

numerics::QuadratureSpec turning_flags(const FlatWallPotential& p, double e_z, double lo, double hi,
                                       const TurningPair& tp, const numerics::QuadratureSpec& spec) {
    const bool lower_turns = lo == tp.z_plus && (tp.trapped || e_z * e_z <= p.value(lo));
    return spec.with_singular_ends(lower_turns, hi == tp.z_minus);
}

double crossing_time(const FlatWallPotential& p, double e_z, const numerics::QuadratureSpec& spec) {
    if (e_z == 0.0) throw PreconditionError("crossing_time: requires e_z != 0");
    const TurningPair tp = turning_points(p, e_z);
    const auto integrand = [&p, e_z](double z) {
        const double s = inverse_speed_inside(p, z, e_z);
        return std::isfinite(s) ? s : 0.0;
    };
    return numerics::integrate_singular(integrand, tp.z_plus, tp.z_minus,
                                        turning_flags(p, e_z, tp.z_plus, tp.z_minus, tp, spec));
}

double change_of_variables_integral(const FlatWallPotential& p, double z,
                                    const std::function<double(EnergyState)>& psi,
                                    const numerics::QuadratureSpec& spec, double velocity_cutoff) {
    const double w = p.value(z);
    const double threshold = std::sqrt(w);
    const double top = std::sqrt(w + velocity_cutoff * velocity_cutoff);
    const numerics::QuadratureSpec lower = spec.with_singular_ends(true, false);
    const numerics::QuadratureSpec upper = spec.with_singular_ends(false, true);
    const numerics::QuadratureSpec plain = spec.with_singular_ends(false, false);
    auto inner = [&](double vx) {
        auto weighted = [&](double ez) {
            const double d = ez * ez - w;
            return d > 0.0 ? psi({vx, ez}) * std::abs(ez) / std::sqrt(d) : 0.0;
        };
        return numerics::integrate_singular(weighted, threshold, top, lower) +
               numerics::integrate_singular(weighted, -top, -threshold, upper);
    };
    return numerics::integrate_singular(inner, -velocity_cutoff, velocity_cutoff, plain);
}

} // namespace gsi
