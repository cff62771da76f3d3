#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bsdelab/bsde_solver.hpp"

namespace bsdelab {

struct GExpectationResult {
    double value = 0.0;
    std::vector<double> per_path_Y0;
    // Standard error of the pathwise representation xi + sum g(t_i, Y_i, Z_i) dt_i.
    double std_error = 0.0;
};

// E_g[xi] = Y_0 of the backward equation with terminal xi.
GExpectationResult g_expect(const BrownianBatch& batch, const GeneratorSpec& g,
                            const TerminalSpec& xi, const SolverOptions& options = {});

// Same as g_expect but from an existing solver output.
GExpectationResult g_expect_from(const BSDESolution& sol, const GeneratorSpec& g);

// E_g[xi | F_{t_node}] per path.
std::vector<double> conditional_g_expect(const BrownianBatch& batch, const GeneratorSpec& g,
                                         const TerminalSpec& xi, std::size_t node,
                                         const SolverOptions& options = {});

enum class MartingaleVerdict { martingale, supermartingale, submartingale, inconclusive, not_checkable };

std::string to_string(MartingaleVerdict v);

struct MartingaleReport {
    MartingaleVerdict verdict = MartingaleVerdict::inconclusive;
    std::size_t s_node = 0;
    std::size_t t_node = 0;
    // RMS over paths of E_g[X_t | F_s] - X_s.
    double rmse = 0.0;
    double mean_deviation = 0.0;
    double std_error = 0.0;
    // Fraction of the variance of X_t left unexplained by the regression basis at t.
    double screen_residual = 0.0;
};

struct MartingaleTestOptions {
    double tol = 0.03;
    // X_t is treated as a function of B_t when its relative residual
    // variance after projection is at most this.
    double screen_tol = 0.1;
};

/**
 * Numerical test of E_g[X_t | F_s] = X_s on one pair of nodes.
 *
 * `process` is [path][node] with N+1 nodes. Mean deviation >= tol reports a
 * submartingale, <= -tol a supermartingale; otherwise RMSE < tol reports a
 * martingale. X_t failing the measurability screen yields not_checkable.
 */
MartingaleReport is_g_martingale(const BrownianBatch& batch, const GeneratorSpec& g,
                                 std::span<const double> process, std::size_t s_node,
                                 std::size_t t_node, const MartingaleTestOptions& test = {},
                                 const SolverOptions& options = {});

}  // namespace bsdelab
