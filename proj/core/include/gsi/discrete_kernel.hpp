/// @file
/// @brief Matrix form of a scattering kernel on a half-space velocity grid.
#pragma once

#include "gsi/kinematics.hpp"

#include <span>
#include <string>
#include <vector>

namespace gsi {

struct KernelMetadata {
    std::string kind;
    long samples_per_column = 0;
    double ode_tolerance = 0.0;
    long discarded_samples = 0;
    /// Largest fraction of a column's inflow flux ignored by the grazing cutoff.
    double cutoff_flux_fraction = 0.0;
    double normal_cutoff = 0.0;
};

/// Density-form kernel: f_out(v) = sum over incoming cells v' of k(v' -> v) f_in(v') dv'.
///
/// Columns are incoming cells, rows outgoing cells, both indexed like the grid. The
/// specular part is held separately as the fraction of each column's flux sent to its
/// mirror cell (row == column), so it never suffers cancellation against the dense part.
class DiscreteKernel {
public:
    explicit DiscreteKernel(VelocityGrid grid);

    [[nodiscard]] const VelocityGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return grid_.size(); }

    [[nodiscard]] double dense(std::size_t row, std::size_t col) const noexcept { return dense_[row * size() + col]; }
    void set_dense(std::size_t row, std::size_t col, double value) noexcept { dense_[row * size() + col] = value; }
    void add_dense(std::size_t row, std::size_t col, double value) noexcept { dense_[row * size() + col] += value; }

    [[nodiscard]] double mirror_mass(std::size_t col) const noexcept { return mirror_[col]; }
    void set_mirror_mass(std::size_t col, double mass) noexcept { mirror_[col] = mass; }
    [[nodiscard]] bool has_mirror_part() const noexcept;

    /// Total density-form entry k(v' -> v), mirror part included.
    [[nodiscard]] double density_entry(std::size_t row, std::size_t col) const noexcept;
    /// Flux-form entry R = k |v_z| / |v'_z|, so that sum_v R dv = 1 for a conservative column.
    [[nodiscard]] double flux_entry(std::size_t row, std::size_t col) const noexcept;

    [[nodiscard]] std::vector<double> apply(std::span<const double> f_in) const;

    [[nodiscard]] KernelMetadata& metadata() noexcept { return meta_; }
    [[nodiscard]] const KernelMetadata& metadata() const noexcept { return meta_; }

private:
    VelocityGrid grid_;
    std::vector<double> dense_;
    std::vector<double> mirror_;
    KernelMetadata meta_;
};

/// Residuals of the kernel axioms. All entries are non-negative.
struct BoundaryReport {
    double nonnegativity = 0.0; ///< magnitude of the most negative entry
    double normalization = 0.0; ///< worst |sum_v R dv - 1| over columns
    double mass_flux = 0.0;     ///< relative flux imbalance on a probe inflow
    double reciprocity = 0.0;   ///< worst ||v'_z| M(v') R(v'->v) - |v_z| M(v) R(-v->-v')|
};

/// Probe inflow used for flux checks: M (1 + 0.3 v_x + 0.2 (|v|^2 - 2)) clipped at zero.
[[nodiscard]] std::vector<double> flux_probe(const VelocityGrid& grid);

[[nodiscard]] BoundaryReport verify_kernel_axioms(const DiscreteKernel& k);
/// Worst density-form reciprocity defect of an arbitrary density matrix on a symmetric grid.
[[nodiscard]] double reciprocity_defect(const DiscreteKernel& k);

/// Smallest fraction, over columns, of a column's flux landing in its own mirror cell.
[[nodiscard]] double mirror_cell_fraction(const DiscreteKernel& k);

/// Discrete fluxes sum |v_z| f dv over the half-grid.
[[nodiscard]] double normal_flux(const VelocityGrid& grid, std::span<const double> f);
/// M at the grid nodes (the same on both half-spaces).
[[nodiscard]] std::vector<double> maxwellian_on(const VelocityGrid& grid);
/// Relative flux imbalance |out - in| / in.
[[nodiscard]] double flux_imbalance(const VelocityGrid& grid, std::span<const double> f_in,
                                    std::span<const double> f_out);

} // namespace gsi
