#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "bsdelab/brownian.hpp"
#include "bsdelab/generator.hpp"
#include "bsdelab/regression.hpp"
#include "bsdelab/time_grid.hpp"

namespace bsdelab {

// Terminal condition xi of the backward equation.
struct TerminalSpec {
    enum class Kind { markovian, explicit_paths };

    Kind kind = Kind::markovian;
    // xi = phi(B_T); receives the d coordinates of B_T.
    std::function<double(std::span<const double>)> phi;
    std::vector<double> values;
    bool square_integrable = true;

    static TerminalSpec markovian(std::function<double(std::span<const double>)> phi);
    static TerminalSpec explicit_paths(std::vector<double> values);
    static TerminalSpec constant(double c);
    // a * (first coordinate of B_T) + b
    static TerminalSpec linear(double a = 1.0, double b = 0.0);
};

struct StepDiagnostics {
    // RMS of Y_{i+1} - E[Y_{i+1} | B_{t_i}] over paths.
    double regression_residual = 0.0;
    // RMS change of Y_i in each Picard sweep.
    std::vector<double> picard_updates;
};

/**
 * Discrete (Y, Z) on a grid: Y is [path][node] with N+1 nodes, Z is
 * [path][step][dim] with N steps. Diagnostics are indexed by step and are
 * empty for closed-form solutions.
 */
struct BSDESolution {
    TimeGrid grid;
    std::size_t paths = 0;
    std::size_t dims = 1;
    std::vector<double> Y;
    std::vector<double> Z;
    std::vector<StepDiagnostics> diagnostics;

    BSDESolution(TimeGrid g, std::size_t m, std::size_t d);

    std::size_t steps() const noexcept { return grid.steps(); }
    double& y(std::size_t path, std::size_t node) { return Y[path * (steps() + 1) + node]; }
    double y(std::size_t path, std::size_t node) const { return Y[path * (steps() + 1) + node]; }
    double& z(std::size_t path, std::size_t step, std::size_t dim) {
        return Z[(path * steps() + step) * dims + dim];
    }
    double z(std::size_t path, std::size_t step, std::size_t dim) const {
        return Z[(path * steps() + step) * dims + dim];
    }
    std::span<const double> y_path(std::size_t path) const {
        return std::span<const double>(Y).subspan(path * (steps() + 1), steps() + 1);
    }
    std::span<const double> z_at(std::size_t path, std::size_t step) const {
        return std::span<const double>(Z).subspan((path * steps() + step) * dims, dims);
    }
    std::vector<double> node_values(std::size_t node) const;
};

struct SolverOptions {
    RegressionBasis basis{};
    std::size_t picard_iters = 3;
    unsigned workers = 1;
};

/**
 * Backward Euler scheme, implicit in Y, with least-squares conditional
 * expectations on B_{t_i}:
 *
 *   Z_i = E[(Y_{i+1} - E[Y_{i+1} | B_{t_i}]) dB_i | B_{t_i}] / dt_i
 *   Y_i = E[Y_{i+1} | B_{t_i}] + g(t_i, Y_i, Z_i) dt_i     (Picard sweeps)
 *
 * Requires a generator claiming (H1) and (H2) and a markovian terminal.
 * Throws RankDeficient naming the step when a regression has no unique fit.
 */
BSDESolution solve_backward(const BrownianBatch& batch, const GeneratorSpec& g,
                            const TerminalSpec& xi, const SolverOptions& options = {});

// Runs the same scheme from `terminal_node` (values given per path) back to
// `target_node` and returns Y at target_node per path.
std::vector<double> solve_between(const BrownianBatch& batch, const GeneratorSpec& g,
                                  std::span<const double> terminal_values,
                                  std::size_t terminal_node, std::size_t target_node,
                                  const SolverOptions& options = {});

struct AnalyticFamily {
    enum class Kind { constant, classical_martingale, linear_z_drift, quadratic_family };
    Kind kind = Kind::constant;
    // c for constant, the drift coefficient for linear_z_drift, n for quadratic_family.
    double param = 0.0;
};

// Closed-form Y at time t given the first Brownian coordinate b, and the
// closed-form Z component `dim`. Shared by every route that evaluates a family.
double analytic_y(const AnalyticFamily& family, double b, double t, double horizon);
double analytic_z(const AnalyticFamily& family, std::size_t dim);

// Throws InvalidArgument for an unknown name.
AnalyticFamily analytic_family(std::string_view name, double param = 0.0);

/**
 * Closed-form solutions on the batch's paths:
 *   constant(c):          Y = c, Z = 0                      (any g with (H2))
 *   classical_martingale: Y = B^1, Z = e_1                  (g = 0, xi = B^1_T)
 *   linear_z_drift(c):    Y = B^1 + c(T - t), Z = e_1       (g = c sum z, xi = B^1_T)
 *   quadratic_family(n):  Y = nB - n^2 t, Z = n             (g = -z^2, d = 1)
 */
BSDESolution analytic_solution(const AnalyticFamily& family, const BrownianBatch& batch);
BSDESolution analytic_solution(std::string_view name, const BrownianBatch& batch, double param);

// Per path, max over steps of |Y_{i+1} - Y_i + g(t_i, Y_i, Z_i) dt_i - Z_i . dB_i|.
std::vector<double> solution_residual(const BSDESolution& sol, const BrownianBatch& batch,
                                      const GeneratorSpec& g);

}  // namespace bsdelab
