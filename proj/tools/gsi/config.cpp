#include "config.hpp"

#include "artifacts.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace gsi::cli {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

std::string suggestion(std::string_view key, std::span<const std::string_view> allowed) {
    std::string_view best;
    std::size_t best_distance = std::numeric_limits<std::size_t>::max();
    for (std::string_view a : allowed) {
        const std::size_t d = edit_distance(key, a);
        if (d < best_distance) {
            best_distance = d;
            best = a;
        }
    }
    if (best.empty() || best_distance > std::max<std::size_t>(2, key.size() / 3)) return {};
    return " (did you mean '" + std::string(best) + "'?)";
}

// One mapping of the document, read key by key; remembers the dotted prefix for messages.
class Section {
public:
    Section(YAML::Node node, std::string path, std::span<const std::string_view> allowed)
        : node_(std::move(node)), path_(std::move(path)) {
        if (!node_ || node_.IsNull()) return;
        if (!node_.IsMap()) throw ConfigError(path_ + ": expected a mapping", path_, line_of(node_));
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                const std::string field = path_.empty() ? key : path_ + "." + key;
                throw ConfigError("unknown key '" + field + "'" + suggestion(key, allowed), field, line_of(kv.first));
            }
        }
    }

    [[nodiscard]] bool present() const { return node_ && node_.IsMap(); }
    [[nodiscard]] YAML::Node child(std::string_view key) const {
        return present() ? node_[std::string(key)] : YAML::Node(YAML::NodeType::Undefined);
    }
    [[nodiscard]] std::string field(std::string_view key) const { return path_ + "." + std::string(key); }

    template <class T>
    bool read(std::string_view key, T& out, const char* expected) const {
        const YAML::Node v = child(key);
        if (!v) return false;
        try {
            out = v.as<T>();
        } catch (const YAML::BadConversion&) {
            throw ConfigError(field(key) + ": expected " + expected, field(key), line_of(v));
        }
        return true;
    }
    bool read(std::string_view key, double& out) const {
        if (!read<double>(key, out, "a number")) return false;
        if (!std::isfinite(out)) fail(key, "must be finite");
        return true;
    }
    bool read(std::string_view key, int& out) const { return read<int>(key, out, "an integer"); }
    bool read(std::string_view key, long& out) const { return read<long>(key, out, "an integer"); }
    bool read(std::string_view key, std::uint64_t& out) const {
        return read<std::uint64_t>(key, out, "a non-negative integer");
    }
    bool read(std::string_view key, std::string& out) const { return read<std::string>(key, out, "a string"); }

    template <class E>
    void choose(std::string_view key, E& out, const std::map<std::string, E>& names) const {
        std::string text;
        if (!read(key, text)) return;
        const auto it = names.find(text);
        if (it == names.end()) {
            std::string list;
            for (const auto& [name, value] : names) list += (list.empty() ? "" : ", ") + name;
            fail(key, "must be one of " + list);
        }
        out = it->second;
    }

    [[noreturn]] void fail(std::string_view key, const std::string& why) const {
        const YAML::Node v = child(key);
        throw ConfigError(field(key) + " " + why, field(key), v ? line_of(v) : line_of(node_));
    }
    template <class T>
    void positive(std::string_view key, T value) const {
        if (!(value > T{0})) fail(key, "must be positive");
    }

private:
    YAML::Node node_;
    std::string path_;
};

constexpr std::string_view top_keys[] = {"potential", "collision", "grid", "solver", "output", "inflow"};
constexpr std::string_view potential_keys[] = {"kind", "W_m", "L", "z_m", "beta", "s0", "s1"};
constexpr std::string_view collision_keys[] = {"kind", "nu0", "nu1", "width"};
constexpr std::string_view grid_keys[] = {"nx", "nz", "vx_max", "vz_max", "v_min"};
constexpr std::string_view solver_keys[] = {
    "regime",        "abs_tol",         "rel_tol",    "max_subdivisions",  "z_points",
    "trapped_ordinates", "iteration_tol", "max_iterations", "samples_per_cell", "ode_tol",
    "max_steps",     "event_tol",       "trace_samples", "trace_speed_max", "hypothesis_samples",
    "proposition1_trials", "seed",      "check_tol",  "binned_tol"};
constexpr std::string_view output_keys[] = {"directory", "formats"};
constexpr std::string_view inflow_keys[] = {"kind", "density", "drift_x", "drift_z", "temperature", "slope_x", "slope_z"};

void parse_potential(const Section& s, PotentialConfig& p) {
    s.choose("kind", p.kind, std::map<std::string, PotentialKind>{{"flat", PotentialKind::flat}, {"rough", PotentialKind::rough}});
    s.read("W_m", p.W_m);
    s.read("L", p.L);
    s.read("z_m", p.z_m);
    s.read("beta", p.beta);
    s.read("s0", p.s0);
    s.read("s1", p.s1);
    s.positive("W_m", p.W_m);
    s.positive("L", p.L);
    s.positive("beta", p.beta);
    if (p.kind == PotentialKind::rough && !(p.s0 > std::abs(p.s1))) s.fail("s1", "must satisfy |s1| < s0");
    // z_m, s0 and s1 are vetted by validate-potential so that violations can be reported
}

void parse_collision(const Section& s, CollisionConfig& c) {
    s.choose("kind", c.kind,
             std::map<std::string, KernelKind>{{"constant", KernelKind::constant},
                                               {"gaussian-smooth", KernelKind::gaussian_smooth}});
    s.read("nu0", c.nu0);
    s.positive("nu0", c.nu0);
    c.nu1 = c.nu0;
    s.read("nu1", c.nu1);
    s.read("width", c.width);
    if (c.kind == KernelKind::constant && c.nu1 != c.nu0) s.fail("nu1", "must equal nu0 for the constant kernel");
    if (c.nu1 < c.nu0) s.fail("nu1", "must be at least nu0");
    s.positive("width", c.width);
}

void parse_grid(const Section& s, GridConfig& g) {
    s.read("nx", g.nx);
    s.read("nz", g.nz);
    s.read("vx_max", g.vx_max);
    s.read("vz_max", g.vz_max);
    s.read("v_min", g.v_min);
    s.positive("nx", g.nx);
    s.positive("nz", g.nz);
    s.positive("vx_max", g.vx_max);
    s.positive("vz_max", g.vz_max);
    if (g.nx % 2 != 0) s.fail("nx", "must be even so that the tangential axis is symmetric without a node at 0");
    if (!(g.v_min >= 0.0 && g.v_min < g.vz_max)) s.fail("v_min", "must lie in [0, vz_max)");
}

void parse_solver(const Section& s, SolverConfig& c) {
    s.choose("regime", c.regime,
             std::map<std::string, BoundaryChoice>{{"specular", BoundaryChoice::specular},
                                                   {"perfect-accommodation", BoundaryChoice::perfect_accommodation},
                                                   {"maxwell-like", BoundaryChoice::maxwell_like},
                                                   {"numerical-albedo", BoundaryChoice::numerical_albedo},
                                                   {"rough-specular", BoundaryChoice::rough_specular},
                                                   {"rough-maxwell-like", BoundaryChoice::rough_maxwell_like}});
    s.read("abs_tol", c.abs_tol);
    s.read("rel_tol", c.rel_tol);
    s.read("max_subdivisions", c.max_subdivisions);
    s.read("z_points", c.z_points);
    s.read("trapped_ordinates", c.trapped_ordinates);
    s.read("iteration_tol", c.iteration_tol);
    s.read("max_iterations", c.max_iterations);
    s.read("samples_per_cell", c.samples_per_cell);
    s.read("ode_tol", c.ode_tol);
    s.read("max_steps", c.max_steps);
    s.read("event_tol", c.event_tol);
    s.read("trace_samples", c.trace_samples);
    s.read("trace_speed_max", c.trace_speed_max);
    s.read("hypothesis_samples", c.hypothesis_samples);
    s.read("proposition1_trials", c.proposition1_trials);
    s.read("seed", c.seed);
    s.read("check_tol", c.check_tol);
    s.read("binned_tol", c.binned_tol);
    s.positive("abs_tol", c.abs_tol);
    s.positive("rel_tol", c.rel_tol);
    s.positive("max_subdivisions", c.max_subdivisions);
    if (c.z_points < 2) s.fail("z_points", "must be at least 2");
    s.positive("trapped_ordinates", c.trapped_ordinates);
    s.positive("iteration_tol", c.iteration_tol);
    s.positive("max_iterations", c.max_iterations);
    s.positive("samples_per_cell", c.samples_per_cell);
    s.positive("ode_tol", c.ode_tol);
    s.positive("max_steps", c.max_steps);
    s.positive("event_tol", c.event_tol);
    s.positive("trace_samples", c.trace_samples);
    s.positive("trace_speed_max", c.trace_speed_max);
    if (c.hypothesis_samples < 10) s.fail("hypothesis_samples", "must be at least 10");
    s.positive("proposition1_trials", c.proposition1_trials);
    s.positive("check_tol", c.check_tol);
    s.positive("binned_tol", c.binned_tol);
}

void parse_output(const Section& s, OutputConfig& o) {
    std::string dir;
    if (s.read("directory", dir)) {
        if (dir.empty()) s.fail("directory", "must not be empty");
        o.directory = dir;
    }
    const YAML::Node formats = s.child("formats");
    if (!formats) return;
    if (!formats.IsSequence()) s.fail("formats", "must be a list drawn from [csv, json]");
    o.csv = o.json = false;
    for (const auto& f : formats) {
        const auto name = f.as<std::string>();
        if (name == "csv") {
            o.csv = true;
        } else if (name == "json") {
            o.json = true;
        } else {
            throw ConfigError("output.formats: unknown format '" + name + "'", "output.formats", line_of(f));
        }
    }
}

void parse_inflow(const Section& s, InflowConfig& f) {
    s.choose("kind", f.kind,
             std::map<std::string, InflowKind>{{"maxwellian", InflowKind::maxwellian}, {"perturbed", InflowKind::perturbed}});
    s.read("density", f.density);
    s.read("drift_x", f.drift_x);
    s.read("drift_z", f.drift_z);
    s.read("temperature", f.temperature);
    s.read("slope_x", f.slope_x);
    s.read("slope_z", f.slope_z);
    if (f.density < 0.0) s.fail("density", "must be non-negative");
    s.positive("temperature", f.temperature);
}

} // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string to_string(BoundaryChoice b) {
    switch (b) {
    case BoundaryChoice::specular: return "specular";
    case BoundaryChoice::perfect_accommodation: return "perfect-accommodation";
    case BoundaryChoice::maxwell_like: return "maxwell-like";
    case BoundaryChoice::numerical_albedo: return "numerical-albedo";
    case BoundaryChoice::rough_specular: return "rough-specular";
    case BoundaryChoice::rough_maxwell_like: return "rough-maxwell-like";
    }
    return "unknown";
}

bool is_rough(BoundaryChoice b) noexcept {
    return b == BoundaryChoice::rough_specular || b == BoundaryChoice::rough_maxwell_like;
}

CollisionKernelModel CollisionConfig::model() const {
    if (kind == KernelKind::constant) return CollisionKernelModel::constant(nu0);
    return CollisionKernelModel::gaussian_smooth(nu0, nu1, width);
}

numerics::QuadratureSpec SolverConfig::quadrature() const {
    numerics::QuadratureSpec q;
    q.abs_tol = abs_tol;
    q.rel_tol = rel_tol;
    q.max_subdivisions = max_subdivisions;
    return q;
}

numerics::OdeSpec SolverConfig::ode() const {
    numerics::OdeSpec o;
    o.step_tol = ode_tol;
    o.max_steps = max_steps;
    o.event_tol = event_tol;
    return o;
}

LkslOptions SolverConfig::lksl() const {
    LkslOptions o;
    o.z_points = z_points;
    o.trapped_ordinates = trapped_ordinates;
    o.tolerance = iteration_tol;
    o.max_iterations = max_iterations;
    o.quadrature = quadrature();
    return o;
}

std::vector<double> InflowConfig::on(const VelocityGrid& grid) const {
    std::vector<double> f(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const Velocity v = grid.incoming(c);
        if (kind == InflowKind::maxwellian) {
            const double dx = v.x - drift_x, dz = v.z - drift_z;
            f[c] = density / temperature * std::exp(-(dx * dx + dz * dz) / (2.0 * temperature));
        } else {
            f[c] = density * maxwellian_M(v) * std::max(0.0, 1.0 + slope_x * v.x + slope_z * v.z);
        }
    }
    return f;
}

RunConfig parse_config(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError("syntax error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg, "",
                          e.mark.line + 1);
    }
    if (!root || root.IsNull()) throw ConfigError("empty configuration document", "", 0);
    const Section top(root, "", top_keys);

    RunConfig cfg;
    cfg.source_hash = sha256_hex(text);
    if (!top.child("potential")) throw ConfigError("missing section 'potential'", "potential", 0);
    parse_potential(Section(top.child("potential"), "potential", potential_keys), cfg.potential);
    parse_collision(Section(top.child("collision"), "collision", collision_keys), cfg.collision);
    parse_grid(Section(top.child("grid"), "grid", grid_keys), cfg.grid);
    const Section solver(top.child("solver"), "solver", solver_keys);
    if (cfg.potential.kind == PotentialKind::rough) cfg.solver.regime = BoundaryChoice::rough_maxwell_like;
    parse_solver(solver, cfg.solver);
    parse_output(Section(top.child("output"), "output", output_keys), cfg.output);
    parse_inflow(Section(top.child("inflow"), "inflow", inflow_keys), cfg.inflow);

    if (is_rough(cfg.solver.regime) != (cfg.potential.kind == PotentialKind::rough)) {
        solver.fail("regime", "'" + to_string(cfg.solver.regime) + "' does not apply to a " +
                                  (cfg.potential.kind == PotentialKind::rough ? "rough" : "flat") + " potential");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read configuration file " + path.string(), "", 0);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

} // namespace gsi::cli
