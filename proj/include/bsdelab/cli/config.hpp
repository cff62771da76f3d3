#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsdelab/bsde_solver.hpp"
#include "bsdelab/generator.hpp"

namespace bsdelab::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct GeneratorConfig {
    std::string name = "zero";  // zero | linear_z | time_scaled | quadratic | broken_h2
    double coef = 0.0;
    std::string v_profile = "constant";  // constant | linear | sine
    double v_scale = 1.0;
};

struct TerminalConfig {
    std::string name = "linear";  // constant | linear | call
    double value = 0.0;
    double slope = 1.0;
    double shift = 0.0;
    double strike = 0.0;
};

/**
 * Experiment configuration, read from an INI-style file:
 *
 *   schema_version = 1
 *   [run]            seed, workers, output, svg
 *   [grid]           horizon, steps
 *   [paths]          count, dims
 *   [generator]      name, coef, v_profile, v_scale
 *   [terminal]       name, value, slope, shift, strike
 *   [solver]         degree, picard_iters
 *   [ratio]          p_list, allow_nonzero_start, max_p
 *   [counterexample] n_list, p
 *   [verify]         samples, y_radius, z_radius, k_list
 *
 * Every key is optional; unknown sections or keys are rejected.
 */
struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string output_dir = "bsdelab-out";
    bool svg = true;

    double horizon = 1.0;
    std::size_t steps = 50;
    std::size_t paths = 10000;
    std::size_t dims = 1;

    GeneratorConfig generator;
    TerminalConfig terminal;

    std::size_t degree = 3;
    std::size_t picard_iters = 3;

    std::vector<double> p_list{1.0, 2.0};
    bool allow_nonzero_start = true;
    double max_p = 8.0;

    std::vector<double> n_list{1.0, 2.0, 4.0, 8.0, 16.0};
    double counterexample_p = 1.0;

    std::size_t verify_samples = 10000;
    double y_radius = 10.0;
    double z_radius = 10.0;
    std::vector<double> k_list{0.25, 0.5, 0.75};
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical "section.key = value" lines of every setting that affects results
// (worker count and output location excluded).
std::vector<std::pair<std::string, std::string>> resolved_settings(const ExperimentConfig& cfg);

GeneratorSpec make_generator(const GeneratorConfig& cfg, std::size_t dims);
TerminalSpec make_terminal(const TerminalConfig& cfg);

}  // namespace bsdelab::cli
