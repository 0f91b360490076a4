#pragma once

#include "config.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace gsi::cli {

inline constexpr std::string_view command_names[] = {"validate-potential", "accommodation", "flat-kernel", "lksl",
                                                     "rough-trace",        "rough-kernel",  "apply-bc",    "verify"};

enum class ExitCode : int { pass = 0, invariant_failure = 1, usage = 2, numerical = 3 };

struct RunOptions {
    std::filesystem::path out;
    Parallelism parallelism{};
};

/// Runs one subcommand and writes its artifacts into options.out. Returns pass or
/// invariant_failure; configuration and numerical problems propagate as exceptions.
[[nodiscard]] ExitCode run_command(std::string_view command, const RunConfig& config, const RunOptions& options);

/// Relative L1 distance weighted by the normal flux, sum |v_z| |f - g| dv / sum |v_z| |g| dv.
[[nodiscard]] double relative_flux_l1(const VelocityGrid& grid, std::span<const double> f, std::span<const double> g);

} // namespace gsi::cli
