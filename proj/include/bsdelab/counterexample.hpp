#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bsdelab/bdg_stats.hpp"
#include "bsdelab/bsde_solver.hpp"

namespace bsdelab {

// Y^n_t = n B_t - n^2 t with Z = n, which solves dY = -Z^2 dt + Z dB.
struct QuadraticFamily {
    double n = 0.0;
    TimeGrid grid;
};

BSDESolution quadratic_solution(const QuadraticFamily& family, const BrownianBatch& batch);

/**
 * Per path, max over steps of |Y_{i+1} - Y_i - g(Z_i) dt_i - Z_i dB_i| with
 * g(z) = -z^2, i.e. the discrete form of dY = -Z^2 dt + Z dB.
 *
 * Note the sign: in the backward form Y_t = xi + int g ds - int Z dB the same
 * process solves the equation with driver +z^2, so solution_residual with the
 * quadratic builtin reports 2 n^2 dt rather than zero.
 */
std::vector<double> quadratic_identity_residual(const BSDESolution& sol,
                                                const BrownianBatch& batch);

struct DivergenceRow {
    double n = 0.0;
    double lhs_root_exact = 0.0;  // E[<Y^n>_T^{p/2}] = (n sqrt(T))^p
    MomentEstimate sup_mc;        // E[(sup |Y^n|)^p]
    double sup_lower_bound_analytic = 0.0;
    double ratio = 0.0;
    double ratio_over_n = 0.0;
    // max over paths and steps of quadratic_identity_residual
    double max_residual = 0.0;
};

struct DivergenceReport {
    double p = 1.0;
    std::vector<DivergenceRow> rows;
    // Least-squares slope of log ratio against log n.
    double loglog_slope = 0.0;
    bool ratio_strictly_increasing = false;
    // E[<Y^n>^{1/2}] <= E[sup |Y^n|] wherever n sqrt(T) >= 1 (p = 1 only).
    bool lower_side_holds = false;
    std::string failing_hypothesis;
    std::string martingale_claim;
};

/**
 * Shows the upper BDG constant cannot exist for g(z) = -z^2: the ratio
 * E[(sup|Y^n|)^p] / E[<Y^n>_T^{p/2}] grows with n. The sup side is bounded
 * below analytically through sup|Y^n| >= |Y^n_T| and E|B_T| = sqrt(2T/pi).
 */
DivergenceReport divergence_report(const std::vector<double>& ns, const BrownianBatch& batch,
                                   double p = 1.0, unsigned workers = 1);

}  // namespace bsdelab
