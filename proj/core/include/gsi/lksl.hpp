/// @file
/// @brief Stationary transport problem inside the surface layer: the discrete-ordinates
/// albedo solver and the first-order explicit construction along trajectories.
#pragma once

#include "gsi/phonon.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gsi {

struct LkslOptions {
    int z_points = 64;
    int trapped_ordinates = 16;
    /// Sup-norm change of the cell averages, relative to max |f*|, that ends the iteration.
    double tolerance = 1e-13;
    int max_iterations = 20000;
    numerics::QuadratureSpec quadrature{};
};

/// Ordinates and z cells shared by the numerical and the explicit constructions.
///
/// Positive magnitudes come first as trapped nodes on (0, sqrt(W_m)) then one free node
/// e_z(0, v_z) per normal node of the velocity grid. Every magnitude appears with both signs.
class LayerDiscretization {
public:
    LayerDiscretization(const FlatWallPotential& p, const VelocityGrid& grid, const LkslOptions& options);

    [[nodiscard]] const std::vector<double>& heights() const noexcept { return heights_; }
    [[nodiscard]] std::size_t cells() const noexcept { return heights_.size() - 1; }
    [[nodiscard]] std::size_t magnitudes() const noexcept { return magnitude_.size(); }
    [[nodiscard]] std::size_t trapped_count() const noexcept { return trapped_count_; }
    [[nodiscard]] double magnitude(std::size_t m) const noexcept { return magnitude_[m]; }
    [[nodiscard]] const TurningPair& turning(std::size_t m) const noexcept { return turning_[m]; }
    /// Weight standing for |e_z| de_z; equals v_z dv_z for free magnitudes.
    [[nodiscard]] double flux_weight(std::size_t m) const noexcept { return flux_weight_[m]; }
    /// Portion of cell n visited by magnitude m; empty when lo >= hi.
    [[nodiscard]] std::pair<double, double> span_in_cell(std::size_t n, std::size_t m) const noexcept;
    /// Time spent by magnitude m in cell n (integral of sigma).
    [[nodiscard]] double cell_time(std::size_t n, std::size_t m) const noexcept { return cell_time_[n * magnitudes() + m]; }
    /// Signed ordinates laid out as -e (descending magnitude) then +e (ascending).
    [[nodiscard]] std::vector<double> signed_ordinates() const;
    [[nodiscard]] std::size_t signed_index(std::size_t m, bool positive) const noexcept;

private:
    std::vector<double> heights_;
    std::vector<double> magnitude_;
    std::vector<double> flux_weight_;
    std::vector<TurningPair> turning_;
    std::vector<double> cell_time_;
    std::size_t trapped_count_ = 0;
};

struct LkslResult {
    /// Outgoing trace on the half-grid (cell c holds v = (v_x, -v_z)).
    std::vector<double> outgoing;
    SurfaceField field;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
    /// |sum v_z (f* - f_out) dv| / sum v_z f* dv.
    double mass_flux_residual = 0.0;
};

/// Source iteration with frozen gain, exact exponential upwind sweeps on each
/// ordinate, and closed exchange between +e and -e at turning points.
class LkslSolver {
public:
    LkslSolver(CollisionKernelModel model, FlatWallPotential p, VelocityGrid grid, LkslOptions options = {});

    [[nodiscard]] LkslResult solve(std::span<const double> f_star) const;

    [[nodiscard]] const VelocityGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const LayerDiscretization& layer() const noexcept { return layer_; }
    [[nodiscard]] const LkslOptions& options() const noexcept { return options_; }

private:
    CollisionKernelModel model_;
    FlatWallPotential potential_;
    VelocityGrid grid_;
    LkslOptions options_;
    LayerDiscretization layer_;
    std::vector<double> gx_;    // tangential factor table
    std::vector<double> gz_;    // normal factor table over signed ordinates
    std::vector<double> loss_;  // per (cell, v_x, signed ordinate)
    std::vector<double> depth_; // loss * cell time
    std::vector<double> omega_; // per (cell, signed ordinate) without the v_x weight
};

[[nodiscard]] LkslResult solve_lksl(std::span<const double> f_star, const CollisionKernelModel& model,
                                    const FlatWallPotential& p, const VelocityGrid& grid,
                                    const LkslOptions& options = {});

struct ClosedFormResult {
    SurfaceField field;
    std::vector<double> outgoing;
    std::vector<double> accommodation;
    double alpha1 = 0.0;
};

/// First approximation obtained by freezing the gain at alpha1 G and integrating along
/// trajectories. alpha1 defaults to the value that makes the outgoing flux balance.
[[nodiscard]] ClosedFormResult phi01_closed_form(std::span<const double> f_star, std::optional<double> alpha1,
                                                 const CollisionKernelModel& model, const FlatWallPotential& p,
                                                 const VelocityGrid& grid, const LkslOptions& options = {});

} // namespace gsi
