#include "gsi/phonon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace gsi {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double overlap_cutoff = 12.0;

// N(W, e_z) = integral over u of factor(e_z, sign(u) sqrt(u^2 + W)) exp(-u^2/2)
double normal_overlap(const CollisionKernelModel& model, double w, double ez, const numerics::QuadratureSpec& spec) {
    auto f = [&](double u) {
        const double e2 = std::copysign(std::sqrt(u * u + w), u);
        return model.factor(ez, e2) * std::exp(-0.5 * u * u);
    };
    auto plain = spec.with_singular_ends(false, false);
    // the split at u = 0 isolates the jump of e' from -sqrt(W) to +sqrt(W)
    return numerics::integrate_singular(f, -overlap_cutoff, -0.0, plain) +
           numerics::integrate_singular(f, 0.0, overlap_cutoff, plain);
}

} // namespace

std::string to_string(KernelKind k) {
    switch (k) {
    case KernelKind::constant: return "constant";
    case KernelKind::gaussian_smooth: return "gaussian-smooth";
    }
    return "unknown";
}

CollisionKernelModel::CollisionKernelModel(KernelKind kind, double floor_rate, double peak_rate, double width)
    : kind_(kind), floor_(floor_rate), peak_(peak_rate), width_(width) {
    if (!(floor_rate > 0.0) || !(peak_rate >= floor_rate) || !std::isfinite(peak_rate)) {
        throw DomainError("CollisionKernelModel: need 0 < nu0 <= nu1 < inf");
    }
    if (kind == KernelKind::gaussian_smooth && !(width > 0.0 && std::isfinite(width))) {
        throw DomainError("CollisionKernelModel: gaussian-smooth width must be positive");
    }
}

CollisionKernelModel CollisionKernelModel::constant(double rate) {
    return {KernelKind::constant, rate, rate, 1.0};
}

CollisionKernelModel CollisionKernelModel::gaussian_smooth(double floor_rate, double peak_rate, double width) {
    return {KernelKind::gaussian_smooth, floor_rate, peak_rate, width};
}

CollisionKernelModel CollisionKernelModel::scaled(double factor) const {
    if (!(factor > 0.0)) throw DomainError("CollisionKernelModel::scaled: factor must be positive");
    return {kind_, floor_ * factor, peak_ * factor, width_};
}

double CollisionKernelModel::factor(double a, double b) const noexcept {
    if (kind_ == KernelKind::constant) return 1.0;
    const double d = (a - b) / width_;
    return std::exp(-d * d);
}

double CollisionKernelModel::operator()(EnergyState a, EnergyState b) const noexcept {
    if (kind_ == KernelKind::constant) return floor_;
    return floor_ + bump() * factor(a.vx, b.vx) * factor(a.ez, b.ez);
}

double CollisionKernelModel::smoothed_factor(double a) const noexcept {
    if (kind_ == KernelKind::constant) return std::sqrt(two_pi);
    const double w2 = width_ * width_;
    return std::sqrt(two_pi * w2 / (w2 + 2.0)) * std::exp(-a * a / (w2 + 2.0));
}

double CollisionKernelModel::free_space_rate(Velocity v) const noexcept {
    return two_pi * floor_ + bump() * smoothed_factor(v.x) * smoothed_factor(v.z);
}

double maxwellian_G(double v_x, double e_z) noexcept { return std::exp(-0.5 * (v_x * v_x + e_z * e_z)); }

double maxwellian_M(Velocity v) noexcept { return std::exp(-0.5 * (v.x * v.x + v.z * v.z)); }

double loss_rate(const CollisionKernelModel& model, const FlatWallPotential& p, double z, EnergyState e,
                 const numerics::QuadratureSpec& spec) {
    const double w = p.value(z);
    double rate = two_pi * model.floor_rate();
    if (model.bump() > 0.0) rate += model.bump() * model.smoothed_factor(e.vx) * normal_overlap(model, w, e.ez, spec);
    return std::exp(-0.5 * w) * rate;
}

double tau_ms(const CollisionKernelModel& model, const FlatWallPotential& p, double z, EnergyState e,
              const numerics::QuadratureSpec& spec) {
    return 1.0 / loss_rate(model, p, z, e, spec);
}

TransitIntegrals transit_integrals(const CollisionKernelModel& model, const FlatWallPotential& p, double e_z,
                                   double lo, double hi, const TurningPair& tp,
                                   const numerics::QuadratureSpec& spec) {
    TransitIntegrals t;
    if (!(lo < hi)) return t;
    const numerics::QuadratureSpec flags = turning_flags(p, e_z, lo, hi, tp, spec);
    auto speed = [&](double z) {
        const double s = inverse_speed_inside(p, z, e_z);
        return std::isfinite(s) ? s : 0.0;
    };
    t.time = numerics::integrate_singular(speed, lo, hi, flags);
    t.isotropic = numerics::integrate_singular(
        [&](double z) { return speed(z) * std::exp(-0.5 * p.value(z)); }, lo, hi, flags);
    if (model.bump() > 0.0) {
        t.anisotropic = numerics::integrate_singular(
            [&](double z) {
                const double w = p.value(z);
                return speed(z) * std::exp(-0.5 * w) * normal_overlap(model, w, e_z, spec);
            },
            lo, hi, flags);
    }
    return t;
}

TransitIntegrals transit_integrals(const CollisionKernelModel& model, const FlatWallPotential& p, double e_z,
                                   const numerics::QuadratureSpec& spec) {
    const TurningPair tp = turning_points(p, e_z);
    return transit_integrals(model, p, e_z, tp.z_plus, tp.z_minus, tp, spec);
}

double optical_depth(const CollisionKernelModel& model, const TransitIntegrals& t, double v_x) noexcept {
    double d = two_pi * model.floor_rate() * t.isotropic;
    if (model.bump() > 0.0) d += model.bump() * model.smoothed_factor(v_x) * t.anisotropic;
    return d;
}

double mean_tau_ms(const CollisionKernelModel& model, const FlatWallPotential& p, EnergyState e,
                   const numerics::QuadratureSpec& spec) {
    if (e.ez == 0.0) throw PreconditionError("mean_tau_ms: requires e_z != 0");
    const TransitIntegrals t = transit_integrals(model, p, e.ez, spec);
    return t.time / optical_depth(model, t, e.vx);
}

SliceQuadrature SliceQuadrature::at_height(const FlatWallPotential& p, double z, const GridAxis& tangential,
                                           int n_normal, double normal_max) {
    const GridAxis vz = GridAxis::uniform(n_normal, -normal_max, normal_max);
    SliceQuadrature q;
    q.height = z;
    for (std::size_t ix = 0; ix < tangential.size(); ++ix) {
        for (std::size_t jz = 0; jz < vz.size(); ++jz) {
            q.nodes.push_back({tangential.nodes[ix], equivalent_velocity(p, z, vz.nodes[jz])});
            q.weights.push_back(tangential.weights[ix] * vz.weights[jz]);
        }
    }
    return q;
}

double density(const SliceQuadrature& q, std::span<const double> phi) {
    double n = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) n += phi[j] * q.weights[j];
    return n;
}

std::vector<double> node_loss_rates(const CollisionKernelModel& model, const SliceQuadrature& q) {
    std::vector<double> rates(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) s += model(q.nodes[i], q.nodes[j]) * maxwellian_G(q.nodes[j]) * q.weights[j];
        rates[i] = s;
    }
    return rates;
}

std::vector<double> apply_Q(const CollisionKernelModel& model, const SliceQuadrature& q, std::span<const double> phi) {
    if (phi.size() != q.size()) throw PreconditionError("apply_Q: field does not match the quadrature");
    std::vector<double> out(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double gi = maxwellian_G(q.nodes[i]);
        double gain = 0.0, loss = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double k = model(q.nodes[i], q.nodes[j]) * q.weights[j];
            gain += k * phi[j];
            loss += k * maxwellian_G(q.nodes[j]);
        }
        out[i] = gi * gain - loss * phi[i];
    }
    return out;
}

Proposition1Report check_proposition1(const CollisionKernelModel& model, const SliceQuadrature& q, int trials,
                                      std::uint64_t seed) {
    if (trials < 1) throw PreconditionError("check_proposition1: trials must be at least 1");
    const std::size_t n = q.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = maxwellian_G(q.nodes[i]);
    const std::vector<double> rates = node_loss_rates(model, q);
    const double max_rate = *std::max_element(rates.begin(), rates.end());
    const double gamma = density(q, g);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto random_field = [&] {
        std::vector<double> f(n);
        const double offset = 1.0 + unit(rng);
        for (std::size_t i = 0; i < n; ++i) f[i] = g[i] * (offset + unit(rng)) + 0.05 * unit(rng);
        return f;
    };
    auto weighted = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * q.weights[i] / g[i];
        return s;
    };

    Proposition1Report r;
    r.trials = trials;
    r.h_theorem_margin = std::numeric_limits<double>::infinity();
    r.coercivity_ratio = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const std::vector<double> phi = random_field();
        const std::vector<double> psi = random_field();
        const std::vector<double> qphi = apply_Q(model, q, phi);
        const std::vector<double> qpsi = apply_Q(model, q, psi);

        double scale = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            scale += std::abs(phi[i]) * q.weights[i];
            mass += qphi[i] * q.weights[i];
        }
        r.mass_residual = std::max(r.mass_residual, std::abs(mass) / (scale * max_rate));

        const double c = 1.5 + 0.5 * unit(rng);
        std::vector<double> eq(g);
        for (double& v : eq) v *= c;
        const std::vector<double> qeq = apply_Q(model, q, eq);
        for (std::size_t i = 0; i < n; ++i) {
            r.equilibrium_residual = std::max(r.equilibrium_residual, std::abs(qeq[i]) / (c * max_rate));
        }

        const double a = weighted(qphi, psi);
        const double b = weighted(qpsi, phi);
        r.symmetry_residual = std::max(r.symmetry_residual, std::abs(a - b) / (std::abs(a) + std::abs(b)));

        const double nphi = density(q, phi);
        std::vector<double> micro(n);
        for (std::size_t i = 0; i < n; ++i) micro[i] = phi[i] - nphi / gamma * g[i];
        const double entropy = weighted(qphi, phi);
        const double bound = -model.floor_rate() * gamma * weighted(micro, micro);
        const double slack = (bound - entropy) / (std::abs(bound) + std::abs(entropy));
        r.h_theorem_margin = std::min(r.h_theorem_margin, slack);
        if (slack < -1e-12) ++r.h_theorem_violations;
        if (bound != 0.0) r.coercivity_ratio = std::min(r.coercivity_ratio, entropy / bound);

        if (model.kind() == KernelKind::constant) {
            const double rate = model.floor_rate() * gamma;
            double worst = 0.0, size = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double bgk = rate * (nphi / gamma * g[i] - phi[i]);
                worst = std::max(worst, std::abs(qphi[i] - bgk));
                size = std::max(size, std::abs(qphi[i]));
            }
            r.bgk_residual = std::max(r.bgk_residual, worst / size);
        }
    }
    return r;
}

SurfaceField::SurfaceField(std::vector<double> z, std::vector<double> vx, std::vector<double> ez)
    : heights(std::move(z)), tangential(std::move(vx)), ordinates(std::move(ez)) {
    const std::size_t n = heights.size() * tangential.size() * ordinates.size();
    values.assign(n, std::numeric_limits<double>::quiet_NaN());
    admissible.assign(n, 0);
}

} // namespace gsi
