/// @file
/// @brief Boundary conditions at the outer edge of a flat surface layer.
#pragma once

#include "gsi/discrete_kernel.hpp"
#include "gsi/lksl.hpp"
#include "gsi/parallel.hpp"
#include "gsi/phonon.hpp"

#include <memory>
#include <span>
#include <vector>

namespace gsi {

/// Which limit of the surface-layer dynamics the boundary condition represents.
///
/// The choice encodes the ratio of the layer crossing time to the phonon collision
/// time (negligible, dominant, comparable) and, for the numerical albedo, keeps the
/// full layer problem instead of its first-order closure. The scaling parameters that
/// select a regime in an asymptotic analysis are not modelled at run time.
enum class Regime { specular, perfect_accommodation, maxwell_like, numerical_albedo };

[[nodiscard]] std::string to_string(Regime r);

/// 1 - exp(-2 tau_z / tau_bar).
[[nodiscard]] double accommodation_from_times(double crossing_time, double mean_collision_time) noexcept;
/// 1 / (1 + tau_bar / (2 tau_z)).
[[nodiscard]] double pade_from_times(double crossing_time, double mean_collision_time) noexcept;

struct AccommodationSample {
    double tau_z = 0.0;
    double tau_ms_bar = 0.0;
    double a = 0.0;
    double a_pade = 0.0;
};

/// Diffuse re-emission fraction for a molecule reaching the layer with velocity v (v_z != 0).
[[nodiscard]] AccommodationSample accommodation_sample(const CollisionKernelModel& model, const FlatWallPotential& p,
                                                       Velocity v, const numerics::QuadratureSpec& spec);
[[nodiscard]] double accommodation_fraction(const CollisionKernelModel& model, const FlatWallPotential& p, Velocity v,
                                            const numerics::QuadratureSpec& spec);
[[nodiscard]] double pade_accommodation(const CollisionKernelModel& model, const FlatWallPotential& p, Velocity v,
                                        const numerics::QuadratureSpec& spec);
/// Samples for every cell of the grid; transit integrals are shared along each normal node.
[[nodiscard]] std::vector<AccommodationSample> accommodation_table(const CollisionKernelModel& model,
                                                                   const FlatWallPotential& p,
                                                                   const VelocityGrid& grid,
                                                                   const numerics::QuadratureSpec& spec,
                                                                   Parallelism parallelism = {});

struct PadeRow {
    double ratio = 0.0; ///< 2 tau_z / tau_bar
    double a = 0.0;
    double a_pade = 0.0;
    double difference = 0.0;
};
[[nodiscard]] std::vector<PadeRow> pade_table(std::span<const double> ratios);
/// Least-squares slope of log |a - a_pade| against log ratio.
[[nodiscard]] double pade_difference_exponent(std::span<const PadeRow> rows);

/// sum v_z f_in / sum v_z M over the incoming half-grid.
[[nodiscard]] double diffuse_kappa(std::span<const double> f_in, const VelocityGrid& grid);
/// sum v_z a f_in / sum v_z a M; throws PreconditionError for a vanishing denominator.
[[nodiscard]] double beta1(std::span<const double> f_in, std::span<const double> accommodation,
                           const VelocityGrid& grid);

class FlatBoundary {
public:
    static FlatBoundary specular(VelocityGrid grid);
    static FlatBoundary perfect_accommodation(VelocityGrid grid);
    /// Maxwell-like condition with a prescribed accommodation per cell.
    static FlatBoundary maxwell_like(VelocityGrid grid, std::vector<double> accommodation);
    static FlatBoundary maxwell_like(const CollisionKernelModel& model, const FlatWallPotential& p, VelocityGrid grid,
                                     const numerics::QuadratureSpec& spec, Parallelism parallelism = {});
    static FlatBoundary numerical_albedo(std::shared_ptr<const LkslSolver> solver);

    [[nodiscard]] Regime regime() const noexcept { return regime_; }
    [[nodiscard]] const VelocityGrid& grid() const noexcept { return grid_; }
    /// Per-cell a(v); empty except for the Maxwell-like regime.
    [[nodiscard]] std::span<const double> accommodation() const noexcept { return accommodation_; }

    /// Outgoing half-grid values from incoming half-grid values.
    [[nodiscard]] std::vector<double> apply(std::span<const double> f_in) const;
    /// Assembled kernel; for the numerical albedo one layer solve per column.
    [[nodiscard]] DiscreteKernel kernel(Parallelism parallelism = {}) const;

private:
    FlatBoundary(Regime regime, VelocityGrid grid) : regime_(regime), grid_(std::move(grid)) {}
    Regime regime_;
    VelocityGrid grid_;
    std::vector<double> accommodation_;
    std::shared_ptr<const LkslSolver> solver_;
};

enum class Moment { tangential, normal, energy };
[[nodiscard]] std::string to_string(Moment m);

/// (F+ - F-) / (F+ - J0 F_M) with F the half-space fluxes of |v_z| weight(v) f. The
/// normal-momentum weight is |v_z| so that a constant accommodation yields that constant.
[[nodiscard]] double moment_accommodation(std::span<const double> f_in, std::span<const double> f_out,
                                          std::span<const double> accommodation, const VelocityGrid& grid,
                                          Moment moment);

} // namespace gsi
