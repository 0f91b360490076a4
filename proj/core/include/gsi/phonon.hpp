/// @file
/// @brief Molecule-phonon collision operator on the surface layer and its relaxation times.
#pragma once

#include "gsi/kinematics.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gsi {

enum class KernelKind { constant, gaussian_smooth };

[[nodiscard]] std::string to_string(KernelKind k);

/// Transition rate K(e, e') = nu0 + (nu1 - nu0) exp(-|e - e'|^2 / width^2).
///
/// The bump factorises into a tangential and a normal factor, which the
/// collision sums exploit. The constant kernel is the case nu1 = nu0.
class CollisionKernelModel {
public:
    static CollisionKernelModel constant(double rate);
    static CollisionKernelModel gaussian_smooth(double floor_rate, double peak_rate, double width);

    [[nodiscard]] KernelKind kind() const noexcept { return kind_; }
    [[nodiscard]] double floor_rate() const noexcept { return floor_; }
    [[nodiscard]] double peak_rate() const noexcept { return peak_; }
    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] double bump() const noexcept { return peak_ - floor_; }
    [[nodiscard]] CollisionKernelModel scaled(double factor) const;

    [[nodiscard]] double operator()(EnergyState a, EnergyState b) const noexcept;
    /// exp(-(a - b)^2 / width^2); identically 1 for the constant kernel.
    [[nodiscard]] double factor(double a, double b) const noexcept;
    /// Integral over u of factor(a, u) exp(-u^2 / 2).
    [[nodiscard]] double smoothed_factor(double a) const noexcept;
    /// Integral of K(v, v') M(v') over the whole velocity plane.
    [[nodiscard]] double free_space_rate(Velocity v) const noexcept;

private:
    CollisionKernelModel(KernelKind kind, double floor_rate, double peak_rate, double width);
    KernelKind kind_;
    double floor_;
    double peak_;
    double width_;
};

/// exp(-(v_x^2 + e_z^2) / 2).
[[nodiscard]] double maxwellian_G(double v_x, double e_z) noexcept;
[[nodiscard]] inline double maxwellian_G(EnergyState e) noexcept { return maxwellian_G(e.vx, e.ez); }
/// exp(-|v|^2 / 2).
[[nodiscard]] double maxwellian_M(Velocity v) noexcept;

/// Loss rate 1 / tau_ms(z, e) by exact reduction to a one-dimensional integral.
[[nodiscard]] double loss_rate(const CollisionKernelModel& model, const FlatWallPotential& p, double z,
                               EnergyState e, const numerics::QuadratureSpec& spec);
[[nodiscard]] double tau_ms(const CollisionKernelModel& model, const FlatWallPotential& p, double z, EnergyState e,
                            const numerics::QuadratureSpec& spec);

/// Integrals along one pass between heights lo and hi at fixed e_z.
///
/// With lambda = exp(-W/2) (2 pi nu0 + (nu1 - nu0) S(v_x) N(z, e_z)) the optical depth
/// of the pass is 2 pi nu0 * isotropic + (nu1 - nu0) S(v_x) * anisotropic.
struct TransitIntegrals {
    double time = 0.0;        ///< integral of sigma
    double isotropic = 0.0;   ///< integral of sigma exp(-W/2)
    double anisotropic = 0.0; ///< integral of sigma exp(-W/2) N(z, e_z)
};

[[nodiscard]] TransitIntegrals transit_integrals(const CollisionKernelModel& model, const FlatWallPotential& p,
                                                 double e_z, double lo, double hi, const TurningPair& tp,
                                                 const numerics::QuadratureSpec& spec);
/// Whole pass between the turning points of e_z.
[[nodiscard]] TransitIntegrals transit_integrals(const CollisionKernelModel& model, const FlatWallPotential& p,
                                                 double e_z, const numerics::QuadratureSpec& spec);
[[nodiscard]] double optical_depth(const CollisionKernelModel& model, const TransitIntegrals& t, double v_x) noexcept;

/// Harmonic mean of tau_ms along the pass, weighted by sigma. For trapped states
/// the pass runs between z_+ and z_-.
[[nodiscard]] double mean_tau_ms(const CollisionKernelModel& model, const FlatWallPotential& p, EnergyState e,
                                 const numerics::QuadratureSpec& spec);

/// Quadrature over the admissible states at one height: nodes with weights for the
/// measure J(z, e_z) de_z dv_x.
struct SliceQuadrature {
    double height = 0.0;
    std::vector<EnergyState> nodes;
    std::vector<double> weights;

    /// Tensor nodes from midpoint cells in (v_x, v_z) mapped to e_z at height z.
    static SliceQuadrature at_height(const FlatWallPotential& p, double z, const GridAxis& tangential, int n_normal,
                                     double normal_max);
    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

/// Q[phi] at the quadrature nodes: sum_j K_ij (G_i phi_j - G_j phi_i) w_j.
[[nodiscard]] std::vector<double> apply_Q(const CollisionKernelModel& model, const SliceQuadrature& q,
                                          std::span<const double> phi);
/// Discrete n[phi] = sum_j phi_j w_j.
[[nodiscard]] double density(const SliceQuadrature& q, std::span<const double> phi);
/// Discrete loss rates sum_j K_ij G_j w_j at every node.
[[nodiscard]] std::vector<double> node_loss_rates(const CollisionKernelModel& model, const SliceQuadrature& q);

struct Proposition1Report {
    int trials = 0;
    double mass_residual = 0.0;        ///< worst |int Q J| relative to the collision scale
    double equilibrium_residual = 0.0; ///< worst |Q[cG]| relative to the collision scale
    double symmetry_residual = 0.0;    ///< worst relative asymmetry of the bilinear form
    double h_theorem_margin = 0.0;     ///< smallest relative slack of the entropy bound
    int h_theorem_violations = 0;
    double coercivity_ratio = 0.0;     ///< smallest -<Q phi, phi> / (nu0 gamma |w|^2); >= 1 when the bound holds
    double bgk_residual = 0.0;         ///< constant kernels only; 0 otherwise
    [[nodiscard]] bool pass(double tol) const noexcept {
        return mass_residual < tol && equilibrium_residual < tol && symmetry_residual < tol &&
               h_theorem_violations == 0 && bgk_residual < tol;
    }
};

/// Randomised checks of mass conservation, equilibrium, the entropy bound and symmetry.
[[nodiscard]] Proposition1Report check_proposition1(const CollisionKernelModel& model, const SliceQuadrature& q,
                                                    int trials, std::uint64_t seed);

/// Values of a distribution inside the layer on a (z, v_x, e_z) tensor grid.
/// Entries outside the admissible set are NaN with mask 0.
struct SurfaceField {
    std::vector<double> heights;
    std::vector<double> tangential;
    std::vector<double> ordinates; ///< signed e_z
    std::vector<double> values;
    std::vector<std::uint8_t> admissible;

    SurfaceField() = default;
    SurfaceField(std::vector<double> z, std::vector<double> vx, std::vector<double> ez);
    [[nodiscard]] std::size_t index(std::size_t iz, std::size_t ix, std::size_t je) const noexcept {
        return (iz * tangential.size() + ix) * ordinates.size() + je;
    }
    [[nodiscard]] double at(std::size_t iz, std::size_t ix, std::size_t je) const noexcept {
        return values[index(iz, ix, je)];
    }
    void set(std::size_t iz, std::size_t ix, std::size_t je, double v) noexcept {
        values[index(iz, ix, je)] = v;
        admissible[index(iz, ix, je)] = 1;
    }
};

} // namespace gsi
