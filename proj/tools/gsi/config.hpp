#pragma once

#include "gsi/flat_bc.hpp"
#include "gsi/rough_wall.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gsi::cli {

/// Rejected configuration. `field` is the dotted key path, `line` is 1-based or 0 if unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string field, int line)
        : std::runtime_error(message), field_(std::move(field)), line_(line) {}
    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    std::string field_;
    int line_;
};

enum class PotentialKind { flat, rough };

struct PotentialConfig {
    PotentialKind kind = PotentialKind::flat;
    double W_m = 1.0;
    double L = 1.0;
    double z_m = 0.5;
    double beta = 1.0;
    double s0 = 0.8;
    double s1 = 0.1;

    [[nodiscard]] FlatWallPotential flat() const { return {W_m, L, z_m}; }
    [[nodiscard]] PeriodicWallPotential rough() const { return {flat(), beta, s0, s1}; }
};

struct CollisionConfig {
    KernelKind kind = KernelKind::constant;
    double nu0 = 0.5;
    double nu1 = 0.5; ///< defaults to nu0 when absent
    double width = 1.0;

    [[nodiscard]] CollisionKernelModel model() const;
};

struct GridConfig {
    int nx = 32;
    int nz = 32;
    double vx_max = 5.0;
    double vz_max = 5.0;
    double v_min = 0.02; ///< grazing cutoff for rough-wall tracing

    [[nodiscard]] VelocityGrid grid() const { return VelocityGrid::half_space(nx, nz, vx_max, vz_max); }
};

/// Boundary model used by flat-kernel, apply-bc and verify.
enum class BoundaryChoice { specular, perfect_accommodation, maxwell_like, numerical_albedo, rough_specular, rough_maxwell_like };

[[nodiscard]] std::string to_string(BoundaryChoice b);
[[nodiscard]] bool is_rough(BoundaryChoice b) noexcept;

struct SolverConfig {
    BoundaryChoice regime = BoundaryChoice::maxwell_like;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 1000;
    int z_points = 64;
    int trapped_ordinates = 16;
    double iteration_tol = 1e-13;
    int max_iterations = 20000;
    int samples_per_cell = 200;
    double ode_tol = 1e-12;
    long max_steps = 200000;
    double event_tol = 1e-14;
    long trace_samples = 1000;
    double trace_speed_max = 4.0;
    int hypothesis_samples = 1000;
    int proposition1_trials = 100;
    std::uint64_t seed = 20240917;
    /// Pass threshold for quadrature-limited checks.
    double check_tol = 1e-8;
    /// Pass threshold for checks limited by binned sampling.
    double binned_tol = 1e-2;

    [[nodiscard]] numerics::QuadratureSpec quadrature() const;
    [[nodiscard]] numerics::OdeSpec ode() const;
    [[nodiscard]] LkslOptions lksl() const;
};

struct OutputConfig {
    std::filesystem::path directory = "out";
    bool csv = true;
    bool json = true;
};

enum class InflowKind { maxwellian, perturbed };

/// maxwellian: density T^-1 exp(-|v - u|^2 / (2T)); perturbed: density M (1 + slope . v) clipped at 0.
struct InflowConfig {
    InflowKind kind = InflowKind::maxwellian;
    double density = 1.0;
    double drift_x = 0.0;
    double drift_z = 0.0;
    double temperature = 1.0;
    double slope_x = 0.0;
    double slope_z = 0.0;

    /// Values on the incoming half of the grid.
    [[nodiscard]] std::vector<double> on(const VelocityGrid& grid) const;
};

struct RunConfig {
    PotentialConfig potential;
    CollisionConfig collision;
    GridConfig grid;
    SolverConfig solver;
    OutputConfig output;
    InflowConfig inflow;
    /// SHA-256 of the source text, lower-case hex.
    std::string source_hash;
};

/// Parses and validates a YAML document. Unknown keys are rejected with a suggestion.
[[nodiscard]] RunConfig parse_config(std::string_view text);
/// Reads the file and parses it.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Edit distance between two keys, used for suggestions.
[[nodiscard]] std::size_t edit_distance(std::string_view a, std::string_view b);

} // namespace gsi::cli
