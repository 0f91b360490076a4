#include "gsi/potential.hpp"

#include "gsi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gsi {

namespace {

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

HypothesisReport violation(std::string label, std::string detail, double y, double z) {
    return {false, std::move(label), std::move(detail), y, z};
}

} // namespace

FlatWallPotential::FlatWallPotential(double well_depth, double thickness, double well_position)
    : well_depth_(well_depth), thickness_(thickness), well_position_(well_position) {
    if (!finite_all({well_depth, thickness, well_position})) {
        throw DomainError("FlatWallPotential: parameters must be finite");
    }
    if (!(thickness > 0.0) || well_position == 0.0) {
        throw DomainError("FlatWallPotential: thickness must be positive and the well off z = 0");
    }
}

double FlatWallPotential::escape_speed() const noexcept { return std::sqrt(std::max(well_depth_, 0.0)); }

PotentialSample FlatWallPotential::eval_continued(double z) const {
    const double L = thickness_;
    const double zm = well_position_;
    const double gap = L - z;
    const double g = (zm - z) * L / (zm * gap);
    const double dg = L * (zm - L) / (zm * gap * gap);
    return {well_depth_ * g * g, 2.0 * well_depth_ * g * dg};
}

PotentialSample FlatWallPotential::eval(double z) const {
    if (z >= thickness_) {
        throw DomainError("FlatWallPotential::eval: z must lie below the wall");
    }
    if (z <= 0.0) return {well_depth_, 0.0};
    return eval_continued(z);
}

PeriodicWallPotential::PeriodicWallPotential(FlatWallPotential base, double period_ratio, double mean_scale,
                                             double scale_amplitude)
    : base_(base), period_ratio_(period_ratio), mean_scale_(mean_scale), scale_amplitude_(scale_amplitude) {
    if (!finite_all({period_ratio, mean_scale, scale_amplitude})) {
        throw DomainError("PeriodicWallPotential: parameters must be finite");
    }
    if (!(period_ratio > 0.0) || !(mean_scale - std::abs(scale_amplitude) > 0.0)) {
        throw DomainError("PeriodicWallPotential: need period_ratio > 0 and a positive scale profile");
    }
}

double reduce_period(double y) {
    const double r = y - std::floor(y);
    return r < 1.0 ? r : 0.0;
}

double PeriodicWallPotential::scale(double y) const {
    return mean_scale_ + scale_amplitude_ * std::cos(2.0 * std::numbers::pi * reduce_period(y));
}

double PeriodicWallPotential::scale_slope(double y) const {
    return -2.0 * std::numbers::pi * scale_amplitude_ * std::sin(2.0 * std::numbers::pi * reduce_period(y));
}

PeriodicPotentialSample PeriodicWallPotential::eval_continued(double y, double z) const {
    const double s = scale(y);
    const double ds = scale_slope(y);
    const PotentialSample w = base_.eval_continued(z / s);
    return {w.value, -w.slope * z * ds / (s * s), w.slope / s};
}

PeriodicPotentialSample PeriodicWallPotential::eval(double y, double z) const {
    if (z >= wall_position(y)) {
        throw DomainError("PeriodicWallPotential::eval: z must lie below the wall");
    }
    if (z <= 0.0) return {outer_value(), 0.0, 0.0};
    return eval_continued(y, z);
}

HypothesisReport validate_hypotheses(const FlatWallPotential& p, int n_samples) {
    if (n_samples < 10) throw PreconditionError("validate_hypotheses: n_samples must be at least 10");
    const double L = p.thickness();
    const double zm = p.well_position();
    const double Wm = p.well_depth();
    if (!(Wm > 0.0)) {
        return violation("H1", "well depth must be positive (W >= 0 with a non-trivial well)", 0.0, 0.0);
    }
    if (!(zm > 0.0 && zm < L)) {
        return violation("H3", "well bottom must lie strictly inside (0, L)", 0.0, zm);
    }
    if (p.value(zm) != 0.0 || p.eval(zm).slope != 0.0) {
        return violation("H3", "potential must vanish with zero slope at the well bottom", 0.0, zm);
    }
    for (int i = 0; i < n_samples; ++i) {
        const double z = L * (i + 0.5) / n_samples;
        const PotentialSample w = p.eval(z);
        if (!(w.value >= 0.0)) return violation("H1", "negative potential", 0.0, z);
        if (z < zm && !(w.slope < 0.0)) return violation("H3", "not attractive below the well bottom", 0.0, z);
        if (z > zm && !(w.slope > 0.0)) return violation("H3", "not repulsive above the well bottom", 0.0, z);
    }
    double previous = p.value(L * (1.0 - 1e-2));
    for (int k = 3; k <= 8; ++k) {
        const double z = L * (1.0 - std::pow(10.0, -k));
        const double w = p.value(z);
        if (!(w > previous)) return violation("H2", "potential does not blow up at the wall", 0.0, z);
        previous = w;
    }
    if (!(previous > 1e6 * Wm)) return violation("H2", "potential does not blow up at the wall", 0.0, L);
    for (int i = 0; i <= n_samples; ++i) {
        const double z = -L * i / n_samples;
        if (p.value(z) != Wm) return violation("H4", "potential is not constant outside the layer", 0.0, z);
    }
    const double inner = p.value(1e-12 * L);
    if (std::abs(inner - Wm) > 1e-9 * Wm) {
        return violation("H4", "potential is discontinuous at the layer entrance", 0.0, 0.0);
    }
    return {};
}

HypothesisReport validate_hypotheses(const PeriodicWallPotential& p, int n_samples) {
    HypothesisReport base = validate_hypotheses(p.base(), n_samples);
    if (!base.pass) return base;
    const double s0 = p.mean_scale();
    const double s1 = p.scale_amplitude();
    if (!(s1 >= 0.0 && s1 < s0)) {
        return violation("profile", "scale profile needs 0 <= s1 < s0", 0.0, 0.0);
    }
    if (s0 + s1 > 1.0) {
        return violation("cell", "surface layer exceeds the cell (s0 + s1 > 1)", 0.0, 0.0);
    }
    const double L = p.base().thickness();
    for (int i = 0; i < n_samples; ++i) {
        const double y = (i + 0.25) / n_samples;
        const double top = p.wall_position(y);
        const double bottom = p.well_position(y);
        const PeriodicPotentialSample at_bottom = p.eval(y, bottom);
        if (std::abs(at_bottom.value) > 1e-12) {
            return violation("well-bottom", "potential does not vanish on the well-bottom curve", y, bottom);
        }
        for (int j = 0; j < n_samples; ++j) {
            const double z = top * (j + 0.5) / n_samples;
            const PeriodicPotentialSample v = p.eval(y, z);
            const PeriodicPotentialSample shifted = p.eval(y + 1.0, z);
            if (std::abs(v.value - shifted.value) > 1e-12 * (1.0 + std::abs(v.value))) {
                return violation("periodicity", "potential is not 1-periodic in y", y, z);
            }
            if (!(v.value >= 0.0)) return violation("H1", "negative potential", y, z);
            if (z < bottom && !(v.d_z < 0.0)) {
                return violation("attractive-repulsive", "not attractive below the well bottom", y, z);
            }
            if (z > bottom && !(v.d_z > 0.0)) {
                return violation("attractive-repulsive", "not repulsive above the well bottom", y, z);
            }
        }
        const double near = p.eval(y, top * (1.0 - 1e-7)).value;
        if (!(near > 1e6 * p.outer_value())) {
            return violation("blow-up", "potential does not blow up at the wall", y, top);
        }
        for (int j = 0; j <= 4; ++j) {
            const double z = -L * j / 4.0;
            if (p.eval(y, z).value != p.outer_value()) {
                return violation("finite-range", "potential is not constant outside the layer", y, z);
            }
        }
    }
    return {};
}

} // namespace gsi
