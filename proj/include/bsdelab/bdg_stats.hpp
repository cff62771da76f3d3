#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bsdelab/brownian.hpp"
#include "bsdelab/bsde_solver.hpp"

namespace bsdelab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

inline constexpr double kNormal95 = 1.959963984540054;

/**
 * Pathwise quantities compared by the BDG inequality.
 *
 * sup_abs[m] = max over grid nodes of |Y|; qv_total[m] = sum |Z_i|^2 dt_i,
 * the Z-energy standing in for the bracket <Y>_T. qv_curve is [path][node]
 * (running sums, N+1 entries per path) and may be left empty.
 */
struct PathFunctionals {
    std::size_t paths = 0;
    std::size_t nodes = 0;
    std::vector<double> sup_abs;
    std::vector<double> qv_total;
    std::vector<double> qv_curve;
    // max over paths of |Y_0|
    double start_abs = 0.0;
};

PathFunctionals path_functionals(const BSDESolution& sol, bool with_curve = true,
                                 unsigned workers = 1);

// Same functionals for a closed-form family, computed path by path without
// materializing the batch, so fine grids fit in memory. Agrees bitwise with
// path_functionals(analytic_solution(family, simulate_brownian(...))).
PathFunctionals analytic_path_functionals(const AnalyticFamily& family, const TimeGrid& grid,
                                          std::size_t dims, std::size_t paths, SeedSpec seed,
                                          unsigned workers = 1);

struct MomentEstimate {
    double p = 1.0;
    double mean = 0.0;
    double std_error = 0.0;
    Interval ci95;
};

// Sample mean of |v|^p with a normal-approximation 95% interval. Requires p >= 1.
MomentEstimate moment(std::span<const double> values, double p, unsigned workers = 1);

struct RatioReport {
    double p = 1.0;
    MomentEstimate lhs;  // E[<Y>_T^{p/2}]
    MomentEstimate rhs;  // E[(Y*)^p]
    double ratio_upper = 0.0;  // rhs / lhs
    double ratio_lower = 0.0;  // lhs / rhs
    Interval ratio_upper_ci;
    Interval ratio_lower_ci;
    double start_abs = 0.0;
};

struct RatioOptions {
    // Skip the "vanishing at zero" precondition (|Y_0| <= 1e-9 on every path).
    bool allow_nonzero_start = false;
    unsigned workers = 1;
};

inline constexpr double kVanishingTolerance = 1e-9;

RatioReport bdg_ratio(const PathFunctionals& f, double p, const RatioOptions& options = {});
RatioReport bdg_ratio(const BSDESolution& sol, double p, const RatioOptions& options = {});

struct LenglartReport {
    double k = 0.5;
    double constant = 0.0;  // (2 - k) / (1 - k)
    bool dominated = false;
    // Largest (E X_i - E A_i) / combined standard error over nodes.
    double worst_screen_excess = 0.0;
    MomentEstimate sup_moment;  // E[(sup X)^k]
    MomentEstimate bound_moment;  // E[A_T^k]
    double bound = 0.0;  // constant * bound_moment.mean
    // (bound - sup_moment.mean) in units of the combined standard error.
    double margin_se = 0.0;
    bool pass = false;
};

/**
 * Lenglart domination inequality E[(sup X)^k] <= (2-k)/(1-k) E[A_T^k].
 *
 * X and A are [path][node] with the same shape, X >= 0 and A nondecreasing
 * per path. Domination E[X_i] <= E[A_i] + 3 se is screened at every node;
 * when it fails the report carries dominated = false and no verdict.
 */
LenglartReport lenglart_check(std::span<const double> X, std::span<const double> A,
                              std::size_t nodes, double k, unsigned workers = 1);

}  // namespace bsdelab
