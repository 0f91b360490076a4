/// @file
/// @brief Wall potentials: the separable flat-wall well and its periodic rough-wall rescaling.
#pragma once

#include "gsi/errors.hpp"

#include <string>

namespace gsi {

/// Representative of y in [0, 1).
[[nodiscard]] double reduce_period(double y);

struct PotentialSample {
    double value = 0.0;
    double slope = 0.0;
};

struct PeriodicPotentialSample {
    double value = 0.0;
    double d_y = 0.0;
    double d_z = 0.0;
};

/// W(z) = W_m ((z_m - z) L / (z_m (L - z)))^2 on [0, L), W_m for z <= 0.
///
/// Construction only checks finiteness; use validate_hypotheses to vet a parameter set.
class FlatWallPotential {
public:
    FlatWallPotential(double well_depth, double thickness, double well_position);
    /// The shipped reference well: W_m = 1, L = 1, z_m = 0.5.
    static FlatWallPotential canonical() { return {1.0, 1.0, 0.5}; }

    [[nodiscard]] double well_depth() const noexcept { return well_depth_; }
    [[nodiscard]] double thickness() const noexcept { return thickness_; }
    [[nodiscard]] double well_position() const noexcept { return well_position_; }
    /// |e_z| threshold separating trapped from free states.
    [[nodiscard]] double escape_speed() const noexcept;

    /// Throws DomainError for z >= L.
    [[nodiscard]] PotentialSample eval(double z) const;
    [[nodiscard]] double value(double z) const { return eval(z).value; }

    /// The closed form continued to z < 0; smooth across z = 0. Used by integrators
    /// whose trial stages may overshoot the layer entrance.
    [[nodiscard]] PotentialSample eval_continued(double z) const;

private:
    double well_depth_;
    double thickness_;
    double well_position_;
};

/// V(y, z) = W(z / s(y)) with s(y) = s0 + s1 cos(2 pi y), 1-periodic in y.
class PeriodicWallPotential {
public:
    PeriodicWallPotential(FlatWallPotential base, double period_ratio, double mean_scale, double scale_amplitude);

    [[nodiscard]] const FlatWallPotential& base() const noexcept { return base_; }
    /// The constant dividing v_x in the tangential transport y' = v_x / beta.
    [[nodiscard]] double period_ratio() const noexcept { return period_ratio_; }
    [[nodiscard]] double mean_scale() const noexcept { return mean_scale_; }
    [[nodiscard]] double scale_amplitude() const noexcept { return scale_amplitude_; }
    [[nodiscard]] double outer_value() const noexcept { return base_.well_depth(); }

    [[nodiscard]] double scale(double y) const;
    [[nodiscard]] double scale_slope(double y) const;
    /// Location of the hard wall and of the well bottom above horizontal position y.
    [[nodiscard]] double wall_position(double y) const { return base_.thickness() * scale(y); }
    [[nodiscard]] double well_position(double y) const { return base_.well_position() * scale(y); }

    /// Throws DomainError for z at or beyond the wall.
    [[nodiscard]] PeriodicPotentialSample eval(double y, double z) const;
    /// Smooth continuation to z < 0 of the in-layer expression.
    [[nodiscard]] PeriodicPotentialSample eval_continued(double y, double z) const;

private:
    FlatWallPotential base_;
    double period_ratio_;
    double mean_scale_;
    double scale_amplitude_;
};

struct HypothesisReport {
    bool pass = true;
    /// Label of the first violated hypothesis ("H1".."H4", "periodicity", ...), empty on pass.
    std::string violated;
    std::string detail;
    double at_y = 0.0;
    double at_z = 0.0;
};

[[nodiscard]] HypothesisReport validate_hypotheses(const FlatWallPotential& p, int n_samples);
[[nodiscard]] HypothesisReport validate_hypotheses(const PeriodicWallPotential& p, int n_samples);

} // namespace gsi
