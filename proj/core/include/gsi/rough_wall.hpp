/// @file
/// @brief Scattering by a periodically rough wall: collisionless trajectories through one
/// period of the surface layer and the kernels assembled from their exit states.
#pragma once

#include "gsi/discrete_kernel.hpp"
#include "gsi/parallel.hpp"
#include "gsi/phonon.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gsi {

/// One trajectory from the layer entrance z = 0 back to it.
struct ExitRecord {
    double entry_y = 0.0;
    Velocity entry_velocity;
    double exit_y = 0.0; ///< reduced to [0, 1)
    Velocity exit_velocity;
    double flight_time = 0.0;
    double optical_depth = 0.0; ///< integral of the free-space loss rate along the path
    double energy_drift = 0.0;  ///< relative change of |v|^2 / 2 + V / 2
    long steps = 0;
};

/// Traces from (y, z = 0) with entry velocity v (v.z > 0). Throws numerics::OdeError
/// when the trajectory does not leave within the step budget.
[[nodiscard]] ExitRecord trace_particle(const PeriodicWallPotential& pot, const CollisionKernelModel& model,
                                        double entry_y, Velocity entry_velocity, const numerics::OdeSpec& spec);

/// Point i of the additive recurrence with the plastic-number generalisation of the golden
/// ratio in three dimensions; components in [0, 1).
[[nodiscard]] std::array<double, 3> quasi_random_point(std::uint64_t i) noexcept;

struct EntryState {
    double y = 0.0;
    Velocity v;
};

/// Entry i of a quasi-random cover of the inflow flux |v_z| dy dv over the half disc of
/// radius speed_max (speed^3 and the direction cosine uniform).
[[nodiscard]] EntryState flux_entry(std::uint64_t i, double speed_max) noexcept;

struct RoughKernelOptions {
    int samples_per_cell = 200;
    /// Incoming samples with v_z below this are not traced.
    double normal_cutoff = 0.02;
    /// Largest tolerated fraction of failed traces in one column.
    double max_discarded_fraction = 0.01;
    numerics::OdeSpec ode{};
    Parallelism parallelism{};
};

/// Everything one tracing pass yields.
///
/// `specular` is k, `survival` is k1 (each sample weighted by exp(-r)), `psi` is one minus
/// the flux-weighted survival per incoming cell, and `accommodation` is a# on outgoing cells.
struct RoughKernelSet {
    DiscreteKernel specular;
    DiscreteKernel survival;
    std::vector<double> psi;
    std::vector<double> accommodation;
    /// Flux fraction per column whose exit fell outside the grid and was attached to the
    /// nearest boundary cell.
    double clamped_flux_fraction = 0.0;
};

[[nodiscard]] RoughKernelSet build_rough_kernels(const PeriodicWallPotential& pot, const CollisionKernelModel& model,
                                                 const VelocityGrid& grid, const RoughKernelOptions& options);
/// k alone; the collision model only enters the optical depths, which are discarded.
[[nodiscard]] DiscreteKernel build_specular_kernel(const PeriodicWallPotential& pot, const VelocityGrid& grid,
                                                   const RoughKernelOptions& options);

/// sum v'_z psi f_in dv' / sum v_z a# M dv. Throws PreconditionError for a vanishing denominator.
[[nodiscard]] double diffuse_amplitude(const RoughKernelSet& set, std::span<const double> f_in);

enum class RoughMode { specular, maxwell_like };

[[nodiscard]] std::vector<double> apply_rough_bc(const RoughKernelSet& set, std::span<const double> f_in,
                                                 RoughMode mode);

struct RoughKernelReport {
    BoundaryReport specular;        ///< axioms of k
    double density_normalization = 0.0; ///< worst |sum_c k(r, c) dv_c - 1| over outgoing cells
    double survival_reciprocity = 0.0;  ///< k1, relative to its largest entry
    double survival_excess = 0.0;       ///< largest positive k1 - k (never positive by construction)
    double thermalized_reciprocity = 0.0; ///< closed-form k2 = psi(-v) psi(v') |v'_z| M(v) / C
    double accommodation_range = 0.0;   ///< distance of a# from [0, 1]
    /// Reciprocity of k relative to its largest entry.
    double specular_reciprocity_relative = 0.0;
};

[[nodiscard]] RoughKernelReport verify_rough_kernel(const RoughKernelSet& set);

/// Density form of the thermalised kernel k2 on the set's grid.
[[nodiscard]] DiscreteKernel thermalized_kernel(const RoughKernelSet& set);

/// Largest |lhs - rhs| / max entry of the reciprocity relation.
[[nodiscard]] double relative_reciprocity_defect(const DiscreteKernel& k);

struct MeasureReport {
    long samples = 0;
    long discarded = 0;
    std::vector<double> inflow;  ///< per (speed ring, angle sector)
    std::vector<double> outflow; ///< same bins, mirrored exit velocities
    double worst_relative_defect = 0.0;
};

/// Entry states drawn from the inflow flux on the half disc of radius speed_max, binned by entry and by
/// exit velocity in polar cells of equal flux mass (uniform in speed^3 and in the direction cosine).
[[nodiscard]] MeasureReport measure_preservation(const PeriodicWallPotential& pot, long samples, int rings,
                                                 int sectors, double speed_max, const numerics::OdeSpec& spec,
                                                 Parallelism parallelism = {});

struct ReversibilityReport {
    long samples = 0;
    long discarded = 0;
    long within_tolerance = 0;
    double worst_round_trip = 0.0;
    double worst_energy_drift = 0.0;
    double worst_speed_defect = 0.0;   ///< ||v| - |v'|| / |v'| over both legs
    double worst_depth_mismatch = 0.0; ///< |r(forward) - r(reversed)| / r(forward)
};

/// Traces flux-distributed entries forward, restarts from (exit_y, -exit_velocity) and compares
/// with (entry_y, -entry_velocity).
[[nodiscard]] ReversibilityReport reversibility_check(const PeriodicWallPotential& pot,
                                                      const CollisionKernelModel& model, long samples,
                                                      double speed_max, double tolerance,
                                                      const numerics::OdeSpec& spec, Parallelism parallelism = {});

} // namespace gsi
