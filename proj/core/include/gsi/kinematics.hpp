/// @file
/// @brief Equivalent-velocity geometry of the flat surface layer and velocity grids.
#pragma once

#include "gsi/numerics.hpp"
#include "gsi/potential.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace gsi {

/// Physical velocity (tangential, normal). Positive normal points into the wall.
struct Velocity {
    double x = 0.0;
    double z = 0.0;
};

/// State in equivalent-velocity coordinates: tangential velocity and signed e_z.
struct EnergyState {
    double vx = 0.0;
    double ez = 0.0;
};

/// One tensor-grid direction: sorted nodes with positive weights and the cell edges
/// that bracket them (edges.size() == nodes.size() + 1).
struct GridAxis {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> edges;

    /// Midpoint nodes of n equal cells on [lo, hi].
    static GridAxis uniform(int n, double lo, double hi);
    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
    /// Index of the cell containing x, or npos when x is outside [edges.front(), edges.back()).
    [[nodiscard]] std::size_t locate(double x) const noexcept;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Half-space tensor grid: a tangential axis times a positive normal-speed axis.
///
/// Cell c = ix * nz + jz stands for the incoming velocity (v_x, +|v_z|) and, mirrored,
/// for the outgoing velocity (v_x, -|v_z|). With a symmetric grid the tangential axis
/// is closed under v_x -> -v_x so that point reflection v -> -v maps cells to cells.
class VelocityGrid {
public:
    VelocityGrid(GridAxis tangential, GridAxis normal);
    static VelocityGrid half_space(int nx, int nz, double vx_max, double vz_max);

    [[nodiscard]] const GridAxis& tangential() const noexcept { return tangential_; }
    [[nodiscard]] const GridAxis& normal() const noexcept { return normal_; }
    [[nodiscard]] bool symmetric() const noexcept { return symmetric_; }

    [[nodiscard]] std::size_t nx() const noexcept { return tangential_.size(); }
    [[nodiscard]] std::size_t nz() const noexcept { return normal_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return nx() * nz(); }
    [[nodiscard]] std::size_t index(std::size_t ix, std::size_t jz) const noexcept { return ix * nz() + jz; }
    [[nodiscard]] std::size_t ix_of(std::size_t c) const noexcept { return c / nz(); }
    [[nodiscard]] std::size_t jz_of(std::size_t c) const noexcept { return c % nz(); }

    [[nodiscard]] Velocity incoming(std::size_t c) const noexcept;
    [[nodiscard]] Velocity outgoing(std::size_t c) const noexcept;
    /// Normal speed |v_z| of cell c.
    [[nodiscard]] double speed_z(std::size_t c) const noexcept { return normal_.nodes[jz_of(c)]; }
    [[nodiscard]] double measure(std::size_t c) const noexcept;
    /// The cell whose incoming velocity is minus the outgoing velocity of c.
    [[nodiscard]] std::size_t reversed(std::size_t c) const;

private:
    GridAxis tangential_;
    GridAxis normal_;
    bool symmetric_;
};

/// Turning points bracketing the motion at equivalent normal velocity e_z.
struct TurningPair {
    double z_plus = 0.0;
    double z_minus = 0.0;
    bool trapped = false;
};

/// sign(v_z) sqrt(v_z^2 + W(z)), with sign(0) = +1.
[[nodiscard]] double equivalent_velocity(const FlatWallPotential& p, double z, double v_z);
/// sign(e_z) sqrt(e_z^2 - W(z)); throws DomainError on inadmissible states.
[[nodiscard]] double physical_velocity(const FlatWallPotential& p, double z, double e_z);
[[nodiscard]] TurningPair turning_points(const FlatWallPotential& p, double e_z);
/// (e_z^2 - W(z))^{-1/2}; throws DomainError at or beyond a turning point.
[[nodiscard]] double inverse_speed(const FlatWallPotential& p, double z, double e_z);
/// Same expression without the admissibility check (returns +inf at a turning point);
/// intended for integrands evaluated strictly inside [z_+, z_-].
[[nodiscard]] double inverse_speed_inside(const FlatWallPotential& p, double z, double e_z) noexcept;
/// Time to travel once between the turning points of e_z.
[[nodiscard]] double crossing_time(const FlatWallPotential& p, double e_z, const numerics::QuadratureSpec& spec);
/// Quadrature flags for an integral in z over [lo, hi] along e_z whose ends coincide with
/// the given turning points.
[[nodiscard]] numerics::QuadratureSpec turning_flags(const FlatWallPotential& p, double e_z, double lo, double hi,
                                                     const TurningPair& tp, const numerics::QuadratureSpec& spec);

/// Integral of psi(v_x, e_z) |e_z| sigma(z, e_z) over the admissible states at height z
/// (equal to the plain velocity integral of psi composed with e_z(z, .)).
/// Velocities are truncated at |v| <= velocity_cutoff.
[[nodiscard]] double change_of_variables_integral(const FlatWallPotential& p, double z,
                                                  const std::function<double(EnergyState)>& psi,
                                                  const numerics::QuadratureSpec& spec,
                                                  double velocity_cutoff = 12.0);

} // namespace gsi
