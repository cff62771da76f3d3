#include "bsdelab/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bsdelab/cli/csv.hpp"

namespace bsdelab::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"run", {"seed", "workers", "output", "svg"}},
        {"grid", {"horizon", "steps"}},
        {"paths", {"count", "dims"}},
        {"generator", {"name", "coef", "v_profile", "v_scale"}},
        {"terminal", {"name", "value", "slope", "shift", "strike"}},
        {"solver", {"degree", "picard_iters"}},
        {"ratio", {"p_list", "allow_nonzero_start", "max_p"}},
        {"counterexample", {"n_list", "p"}},
        {"verify", {"samples", "y_radius", "z_radius", "k_list"}},
    };
    return s;
}

std::string trim(std::string s) {
    const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

double to_real(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) {
        throw ConfigError(key + ": expected a finite real, got '" + raw + "'");
    }
    return x;
}

std::uint64_t to_count(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError(key + ": expected a nonnegative integer, got '" + raw + "'");
    }
    return x;
}

bool to_flag(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(to_real(key, item));
    }
    if (out.empty()) {
        throw ConfigError(key + ": expected a comma-separated list of reals");
    }
    return out;
}

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

void validate(const ExperimentConfig& c) {
    require(c.schema_version == kSchemaVersion,
            "schema_version: unsupported version " + std::to_string(c.schema_version));
    require(c.workers <= 1024, "run.workers: at most 1024");
    require(!c.output_dir.empty(), "run.output: must not be empty");
    require(c.horizon > 0.0 && c.horizon <= 1e6, "grid.horizon: must lie in (0, 1e6]");
    require(c.steps >= 1 && c.steps <= 1000000, "grid.steps: must lie in [1, 1e6]");
    require(c.paths >= 1 && c.paths <= 100000000, "paths.count: must lie in [1, 1e8]");
    require(c.dims >= 1 && c.dims <= 16, "paths.dims: must lie in [1, 16]");
    require(c.degree <= 10, "solver.degree: at most 10");
    require(c.picard_iters >= 1 && c.picard_iters <= 100, "solver.picard_iters: must lie in [1, 100]");
    require(c.max_p >= 1.0 && c.max_p <= 64.0, "ratio.max_p: must lie in [1, 64]");
    for (double p : c.p_list) {
        require(p >= 1.0 && p <= c.max_p, "ratio.p_list: entries must lie in [1, max_p]");
    }
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
        require(c.n_list[i] > 0.0 && (i == 0 || c.n_list[i] > c.n_list[i - 1]),
                "counterexample.n_list: entries must be positive and increasing");
    }
    require(c.counterexample_p >= 1.0 && c.counterexample_p <= c.max_p,
            "counterexample.p: must lie in [1, max_p]");
    require(c.verify_samples >= 1 && c.verify_samples <= 10000000,
            "verify.samples: must lie in [1, 1e7]");
    require(c.y_radius > 0.0 && c.z_radius > 0.0, "verify: radii must be positive");
    for (double k : c.k_list) {
        require(k > 0.0 && k < 1.0, "verify.k_list: entries must lie in (0, 1)");
    }
    static const std::set<std::string> generators{"zero", "linear_z", "time_scaled", "quadratic",
                                                  "broken_h2"};
    require(generators.count(c.generator.name) == 1,
            "generator.name: unknown generator '" + c.generator.name + "'");
    static const std::set<std::string> profiles{"constant", "linear", "sine"};
    require(profiles.count(c.generator.v_profile) == 1,
            "generator.v_profile: unknown profile '" + c.generator.v_profile + "'");
    require(c.generator.v_scale >= 0.0, "generator.v_scale: must be nonnegative");
    static const std::set<std::string> terminals{"constant", "linear", "call"};
    require(terminals.count(c.terminal.name) == 1,
            "terminal.name: unknown terminal '" + c.terminal.name + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                          std::to_string(e.line()) + ")");
    }

    ExperimentConfig c;
    bool saw_version = false;
    for (const auto& [section, node] : tree) {
        if (node.empty() && section != "schema_version" && schema().count(section) == 1) {
            continue;  // empty section
        }
        if (node.empty()) {
            if (section != "schema_version") {
                throw ConfigError("unknown top-level key '" + section + "'");
            }
            c.schema_version = static_cast<int>(to_count(section, node.data()));
            saw_version = true;
            continue;
        }
        const auto it = schema().find(section);
        if (it == schema().end()) {
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, value] : node) {
            if (it->second.count(key) == 0) {
                throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
            }
            const std::string full = section + "." + key;
            const std::string raw = value.data();
            if (section == "run") {
                if (key == "seed") c.seed = to_count(full, raw);
                else if (key == "workers") c.workers = static_cast<unsigned>(to_count(full, raw));
                else if (key == "output") c.output_dir = trim(raw);
                else if (key == "svg") c.svg = to_flag(full, raw);
            } else if (section == "grid") {
                if (key == "horizon") c.horizon = to_real(full, raw);
                else if (key == "steps") c.steps = to_count(full, raw);
            } else if (section == "paths") {
                if (key == "count") c.paths = to_count(full, raw);
                else if (key == "dims") c.dims = to_count(full, raw);
            } else if (section == "generator") {
                if (key == "name") c.generator.name = trim(raw);
                else if (key == "coef") c.generator.coef = to_real(full, raw);
                else if (key == "v_profile") c.generator.v_profile = trim(raw);
                else if (key == "v_scale") c.generator.v_scale = to_real(full, raw);
            } else if (section == "terminal") {
                if (key == "name") c.terminal.name = trim(raw);
                else if (key == "value") c.terminal.value = to_real(full, raw);
                else if (key == "slope") c.terminal.slope = to_real(full, raw);
                else if (key == "shift") c.terminal.shift = to_real(full, raw);
                else if (key == "strike") c.terminal.strike = to_real(full, raw);
            } else if (section == "solver") {
                if (key == "degree") c.degree = to_count(full, raw);
                else if (key == "picard_iters") c.picard_iters = to_count(full, raw);
            } else if (section == "ratio") {
                if (key == "p_list") c.p_list = to_list(full, raw);
                else if (key == "allow_nonzero_start") c.allow_nonzero_start = to_flag(full, raw);
                else if (key == "max_p") c.max_p = to_real(full, raw);
            } else if (section == "counterexample") {
                if (key == "n_list") c.n_list = to_list(full, raw);
                else if (key == "p") c.counterexample_p = to_real(full, raw);
            } else if (section == "verify") {
                if (key == "samples") c.verify_samples = to_count(full, raw);
                else if (key == "y_radius") c.y_radius = to_real(full, raw);
                else if (key == "z_radius") c.z_radius = to_real(full, raw);
                else if (key == "k_list") c.k_list = to_list(full, raw);
            }
        }
    }
    if (!saw_version) {
        throw ConfigError("missing schema_version");
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& c) {
    const auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? "," : "") + format_real(v[i]);
        }
        return s;
    };
    const auto count = [](std::uint64_t v) { return std::to_string(v); };
    return {
        {"schema_version", std::to_string(c.schema_version)},
        {"run.seed", count(c.seed)},
        {"run.svg", c.svg ? "true" : "false"},
        {"grid.horizon", format_real(c.horizon)},
        {"grid.steps", count(c.steps)},
        {"paths.count", count(c.paths)},
        {"paths.dims", count(c.dims)},
        {"generator.name", c.generator.name},
        {"generator.coef", format_real(c.generator.coef)},
        {"generator.v_profile", c.generator.v_profile},
        {"generator.v_scale", format_real(c.generator.v_scale)},
        {"terminal.name", c.terminal.name},
        {"terminal.value", format_real(c.terminal.value)},
        {"terminal.slope", format_real(c.terminal.slope)},
        {"terminal.shift", format_real(c.terminal.shift)},
        {"terminal.strike", format_real(c.terminal.strike)},
        {"solver.degree", count(c.degree)},
        {"solver.picard_iters", count(c.picard_iters)},
        {"ratio.p_list", list(c.p_list)},
        {"ratio.allow_nonzero_start", c.allow_nonzero_start ? "true" : "false"},
        {"ratio.max_p", format_real(c.max_p)},
        {"counterexample.n_list", list(c.n_list)},
        {"counterexample.p", format_real(c.counterexample_p)},
        {"verify.samples", count(c.verify_samples)},
        {"verify.y_radius", format_real(c.y_radius)},
        {"verify.z_radius", format_real(c.z_radius)},
        {"verify.k_list", list(c.k_list)},
    };
}

GeneratorSpec make_generator(const GeneratorConfig& cfg, std::size_t dims) {
    if (cfg.name == "zero") return builtin_generator(drivers::Zero{}, dims);
    if (cfg.name == "linear_z") return builtin_generator(drivers::LinearZ{cfg.coef}, dims);
    if (cfg.name == "quadratic") return builtin_generator(drivers::Quadratic{}, dims);
    if (cfg.name == "broken_h2") return builtin_generator(drivers::BrokenH2{}, dims);
    if (cfg.name == "time_scaled") {
        VProfile profile = VProfile::constant;
        if (cfg.v_profile == "linear") profile = VProfile::linear;
        else if (cfg.v_profile == "sine") profile = VProfile::sine;
        else if (cfg.v_profile != "constant") {
            throw ConfigError("generator.v_profile: unknown profile '" + cfg.v_profile + "'");
        }
        return builtin_generator(drivers::TimeScaled{VShape{profile, cfg.v_scale}}, dims);
    }
    throw ConfigError("generator.name: unknown generator '" + cfg.name + "'");
}

TerminalSpec make_terminal(const TerminalConfig& cfg) {
    if (cfg.name == "constant") return TerminalSpec::constant(cfg.value);
    if (cfg.name == "linear") return TerminalSpec::linear(cfg.slope, cfg.shift);
    if (cfg.name == "call") {
        const double k = cfg.strike;
        return TerminalSpec::markovian(
            [k](std::span<const double> b) { return std::max(b[0] - k, 0.0); });
    }
    throw ConfigError("terminal.name: unknown terminal '" + cfg.name + "'");
}

}  // namespace bsdelab::cli
