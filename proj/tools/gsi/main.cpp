#include "artifacts.hpp"
#include "commands.hpp"
#include "config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using gsi::cli::ExitCode;
using nlohmann::json;

void report_error(const std::optional<std::filesystem::path>& out, json error) {
    const json doc{{"error", std::move(error)}};
    std::cerr << doc.dump(2) << '\n';
    if (!out) return;
    try {
        std::filesystem::create_directories(*out);
        gsi::cli::write_json(*out / "error.json", doc);
    } catch (const std::exception&) {
        // stderr already has it
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gas-surface interaction kernels for a thin adsorbed layer"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    for (std::string_view name : gsi::cli::command_names) {
        CLI::App* sub = app.add_subcommand(std::string(name));
        sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "artifact directory (overrides output.directory)");
        sub->add_option("--threads", threads, "worker threads, 0 picks the hardware count")->check(CLI::NonNegativeNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }
    const std::string command = app.get_subcommands().front()->get_name();

    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    try {
        const gsi::cli::RunConfig cfg = gsi::cli::load_config(config_path);
        if (!out) out = cfg.output.directory;
        const ExitCode code = gsi::cli::run_command(command, cfg, {*out, gsi::Parallelism{threads}});
        if (code != ExitCode::pass) std::cerr << command << ": invariant check failed, see report.json\n";
        return static_cast<int>(code);
    } catch (const gsi::cli::ConfigError& e) {
        report_error(out, {{"kind", "config"}, {"message", e.what()}, {"field", e.field()}, {"line", e.line()}});
        return static_cast<int>(ExitCode::usage);
    } catch (const gsi::PreconditionError& e) {
        report_error(out, {{"kind", "precondition"}, {"message", e.what()}});
        return static_cast<int>(ExitCode::usage);
    } catch (const std::exception& e) {
        report_error(out, {{"kind", "numerical"}, {"message", e.what()}});
        return static_cast<int>(ExitCode::numerical);
    }
}
