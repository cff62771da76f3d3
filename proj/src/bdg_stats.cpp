#include "bsdelab/bdg_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bsdelab/error.hpp"
#include "bsdelab/parallel.hpp"
#include "bsdelab/regression.hpp"

namespace bsdelab {
namespace {

struct PathAccumulator {
    double sup = 0.0;
    double qv = 0.0;
};

// Mean and unbiased variance of f(m) over [0, n) with the block-fixed order.
template <class F>
std::pair<double, double> mean_var(std::size_t n, unsigned workers, F&& f) {
    const double mean = deterministic_sum(n, workers, f) / static_cast<double>(n);
    if (n < 2) {
        return {mean, 0.0};
    }
    const double ss = deterministic_sum(n, workers, [&](std::size_t m) {
        const double d = f(m) - mean;
        return d * d;
    });
    return {mean, ss / static_cast<double>(n - 1)};
}

MomentEstimate powered_mean(std::span<const double> values, double exponent, unsigned workers) {
    if (values.empty()) {
        throw InvalidArgument("moment: empty input");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("moment: values must be finite");
        }
    }
    const auto term = [&](std::size_t m) { return std::pow(std::abs(values[m]), exponent); };
    MomentEstimate e;
    e.p = exponent;
    if (is_constant(values)) {
        e.mean = term(0);
    } else {
        const auto [mean, var] = mean_var(values.size(), workers, term);
        e.mean = mean;
        e.std_error = std::sqrt(var / static_cast<double>(values.size()));
    }
    e.ci95 = {e.mean - kNormal95 * e.std_error, e.mean + kNormal95 * e.std_error};
    return e;
}

}  // namespace

PathFunctionals path_functionals(const BSDESolution& sol, bool with_curve, unsigned workers) {
    const std::size_t M = sol.paths;
    const std::size_t N = sol.steps();
    PathFunctionals f;
    f.paths = M;
    f.nodes = N + 1;
    f.sup_abs.assign(M, 0.0);
    f.qv_total.assign(M, 0.0);
    if (with_curve) {
        f.qv_curve.assign(M * (N + 1), 0.0);
    }
    parallel_for(M, workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t m = b; m < e; ++m) {
            double sup = 0.0;
            double qv = 0.0;
            for (std::size_t i = 0; i <= N; ++i) {
                sup = std::max(sup, std::abs(sol.y(m, i)));
                if (with_curve) {
                    f.qv_curve[m * (N + 1) + i] = qv;
                }
                if (i < N) {
                    double zz = 0.0;
                    for (double zj : sol.z_at(m, i)) {
                        zz += zj * zj;
                    }
                    qv += zz * sol.grid.dt(i);
                }
            }
            f.sup_abs[m] = sup;
            f.qv_total[m] = qv;
        }
    });
    for (std::size_t m = 0; m < M; ++m) {
        f.start_abs = std::max(f.start_abs, std::abs(sol.y(m, 0)));
    }
    return f;
}

PathFunctionals analytic_path_functionals(const AnalyticFamily& family, const TimeGrid& grid,
                                          std::size_t dims, std::size_t paths, SeedSpec seed,
                                          unsigned workers) {
    if (dims == 0 || paths == 0) {
        throw InvalidArgument("analytic_path_functionals: dims and paths must be at least 1");
    }
    if (family.kind == AnalyticFamily::Kind::quadratic_family && dims != 1) {
        throw InvalidArgument("analytic_path_functionals: quadratic_family requires d = 1");
    }
    const std::size_t N = grid.steps();
    const double T = grid.horizon();
    PathFunctionals f;
    f.paths = paths;
    f.nodes = N + 1;
    f.sup_abs.assign(paths, 0.0);
    f.qv_total.assign(paths, 0.0);
    std::vector<double> start(paths, 0.0);
    parallel_for(paths, workers, [&](std::size_t b, std::size_t e) {
        std::vector<double> inc(N * dims);
        for (std::size_t m = b; m < e; ++m) {
            generate_path_increments(grid, dims, seed, m, inc);
            double level = 0.0;
            double sup = 0.0;
            double qv = 0.0;
            for (std::size_t i = 0; i <= N; ++i) {
                if (i > 0) {
                    level += inc[(i - 1) * dims];
                }
                const double y = analytic_y(family, level, grid.node(i), T);
                if (i == 0) {
                    start[m] = y;
                }
                sup = std::max(sup, std::abs(y));
                if (i < N) {
                    double zz = 0.0;
                    for (std::size_t j = 0; j < dims; ++j) {
                        const double zj = analytic_z(family, j);
                        zz += zj * zj;
                    }
                    qv += zz * grid.dt(i);
                }
            }
            f.sup_abs[m] = sup;
            f.qv_total[m] = qv;
        }
    });
    for (double y0 : start) {
        f.start_abs = std::max(f.start_abs, std::abs(y0));
    }
    return f;
}

MomentEstimate moment(std::span<const double> values, double p, unsigned workers) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw InvalidArgument("moment: exponent must satisfy 1 <= p < inf, got " + std::to_string(p));
    }
    return powered_mean(values, p, workers);
}

RatioReport bdg_ratio(const PathFunctionals& f, double p, const RatioOptions& options) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw InvalidArgument("bdg_ratio: exponent must satisfy 1 <= p < inf");
    }
    if (!options.allow_nonzero_start && f.start_abs > kVanishingTolerance) {
        throw ContractViolation("bdg_ratio: process does not vanish at zero (max |Y_0| = " +
                                std::to_string(f.start_abs) + "); set allow_nonzero_start");
    }
    const unsigned w = options.workers;
    RatioReport r;
    r.p = p;
    r.start_abs = f.start_abs;
    r.lhs = powered_mean(f.qv_total, p / 2.0, w);
    r.lhs.p = p;
    r.rhs = powered_mean(f.sup_abs, p, w);
    if (!(r.lhs.mean > 0.0) || !(r.rhs.mean > 0.0)) {
        throw DegenerateRatio("bdg_ratio: degenerate moments (lhs " + std::to_string(r.lhs.mean) +
                              ", rhs " + std::to_string(r.rhs.mean) + ")");
    }
    r.ratio_upper = r.rhs.mean / r.lhs.mean;
    r.ratio_lower = r.lhs.mean / r.rhs.mean;

    // Delta method for a ratio of two correlated sample means.
    const std::size_t M = f.paths;
    double cov = 0.0;
    if (M > 1 && !is_constant(f.qv_total) && !is_constant(f.sup_abs)) {
        const double lm = r.lhs.mean;
        const double rm = r.rhs.mean;
        cov = deterministic_sum(M, w, [&](std::size_t m) {
                  return (std::pow(f.qv_total[m], p / 2.0) - lm) *
                         (std::pow(std::abs(f.sup_abs[m]), p) - rm);
              }) /
              static_cast<double>(M - 1) / static_cast<double>(M);
    }
    const double vl = r.lhs.std_error * r.lhs.std_error;
    const double vr = r.rhs.std_error * r.rhs.std_error;
    const auto ratio_se = [&](double den, double vnum, double vden, double ratio) {
        const double v = (vnum - 2.0 * ratio * cov + ratio * ratio * vden) / (den * den);
        return std::sqrt(std::max(0.0, v));
    };
    const double se_up = ratio_se(r.lhs.mean, vr, vl, r.ratio_upper);
    const double se_lo = ratio_se(r.rhs.mean, vl, vr, r.ratio_lower);
    r.ratio_upper_ci = {r.ratio_upper - kNormal95 * se_up, r.ratio_upper + kNormal95 * se_up};
    r.ratio_lower_ci = {r.ratio_lower - kNormal95 * se_lo, r.ratio_lower + kNormal95 * se_lo};
    return r;
}

RatioReport bdg_ratio(const BSDESolution& sol, double p, const RatioOptions& options) {
    return bdg_ratio(path_functionals(sol, false, options.workers), p, options);
}

LenglartReport lenglart_check(std::span<const double> X, std::span<const double> A,
                              std::size_t nodes, double k, unsigned workers) {
    if (!(k > 0.0 && k < 1.0)) {
        throw InvalidArgument("lenglart_check: k must lie in (0, 1), got " + std::to_string(k));
    }
    if (nodes == 0 || X.size() != A.size() || X.size() % nodes != 0 || X.empty()) {
        throw InvalidArgument("lenglart_check: X and A must both be [paths][nodes]");
    }
    const std::size_t M = X.size() / nodes;
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t i = 0; i < nodes; ++i) {
            const double x = X[m * nodes + i];
            const double a = A[m * nodes + i];
            if (!(x >= 0.0) || !std::isfinite(x) || !std::isfinite(a)) {
                throw InvalidArgument("lenglart_check: X must be finite and nonnegative");
            }
            if (i > 0 && a < A[m * nodes + i - 1]) {
                throw InvalidArgument("lenglart_check: A must be nondecreasing on every path");
            }
        }
    }

    LenglartReport rep;
    rep.k = k;
    rep.constant = (2.0 - k) / (1.0 - k);

    rep.worst_screen_excess = -std::numeric_limits<double>::infinity();
    rep.dominated = true;
    for (std::size_t i = 0; i < nodes; ++i) {
        const auto diff = [&](std::size_t m) { return X[m * nodes + i] - A[m * nodes + i]; };
        const auto [mean, var] = mean_var(M, workers, diff);
        const double se = std::sqrt(var / static_cast<double>(M));
        double excess = 0.0;
        if (se > 0.0) {
            excess = mean / se;
        } else if (mean > 0.0) {
            excess = std::numeric_limits<double>::infinity();
        }
        rep.worst_screen_excess = std::max(rep.worst_screen_excess, excess);
        if (excess > 3.0) {
            rep.dominated = false;
        }
    }
    if (!rep.dominated) {
        return rep;
    }

    std::vector<double> sup_x(M), a_end(M);
    for (std::size_t m = 0; m < M; ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes; ++i) {
            s = std::max(s, X[m * nodes + i]);
        }
        sup_x[m] = s;
        a_end[m] = A[m * nodes + nodes - 1];
    }
    rep.sup_moment = powered_mean(sup_x, k, workers);
    rep.bound_moment = powered_mean(a_end, k, workers);
    rep.bound = rep.constant * rep.bound_moment.mean;
    const double se = std::hypot(rep.sup_moment.std_error, rep.constant * rep.bound_moment.std_error);
    const double gap = rep.bound - rep.sup_moment.mean;
    rep.margin_se = se > 0.0 ? gap / se : (gap >= 0.0 ? std::numeric_limits<double>::infinity()
                                                      : -std::numeric_limits<double>::infinity());
    rep.pass = rep.sup_moment.mean <= rep.bound + 3.0 * se;
    return rep;
}

}  // namespace bsdelab
