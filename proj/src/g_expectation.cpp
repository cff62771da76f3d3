#include "bsdelab/g_expectation.hpp"

#include <cmath>

#include "bsdelab/error.hpp"
#include "bsdelab/parallel.hpp"

namespace bsdelab {

GExpectationResult g_expect_from(const BSDESolution& sol, const GeneratorSpec& g) {
    const std::size_t M = sol.paths;
    const std::size_t N = sol.steps();
    GExpectationResult r;
    r.per_path_Y0 = sol.node_values(0);
    r.value = r.per_path_Y0.front();

    std::vector<double> pathwise(M);
    for (std::size_t m = 0; m < M; ++m) {
        double acc = sol.y(m, N);
        for (std::size_t i = 0; i < N; ++i) {
            acc += g(sol.grid.node(i), sol.y(m, i), sol.z_at(m, i)) * sol.grid.dt(i);
        }
        pathwise[m] = acc;
    }
    if (M > 1 && !is_constant(pathwise)) {
        const double mean = deterministic_sum(M, 1, [&](std::size_t m) { return pathwise[m]; }) /
                            static_cast<double>(M);
        const double ss = deterministic_sum(M, 1, [&](std::size_t m) {
            const double dlt = pathwise[m] - mean;
            return dlt * dlt;
        });
        r.std_error = std::sqrt(ss / static_cast<double>(M - 1) / static_cast<double>(M));
    }
    return r;
}

GExpectationResult g_expect(const BrownianBatch& batch, const GeneratorSpec& g,
                            const TerminalSpec& xi, const SolverOptions& options) {
    return g_expect_from(solve_backward(batch, g, xi, options), g);
}

std::vector<double> conditional_g_expect(const BrownianBatch& batch, const GeneratorSpec& g,
                                         const TerminalSpec& xi, std::size_t node,
                                         const SolverOptions& options) {
    if (node > batch.steps()) {
        throw InvalidArgument("conditional_g_expect: node " + std::to_string(node) +
                              " out of range (N = " + std::to_string(batch.steps()) + ")");
    }
    return solve_backward(batch, g, xi, options).node_values(node);
}

std::string to_string(MartingaleVerdict v) {
    switch (v) {
        case MartingaleVerdict::martingale: return "martingale";
        case MartingaleVerdict::supermartingale: return "supermartingale";
        case MartingaleVerdict::submartingale: return "submartingale";
        case MartingaleVerdict::inconclusive: return "inconclusive";
        case MartingaleVerdict::not_checkable: return "not_checkable";
    }
    return "unknown";
}

namespace {

double screen_projection(const BrownianBatch& batch, std::span<const double> x_t,
                         std::size_t node, const SolverOptions& options) {
    const std::size_t M = batch.paths();
    const std::size_t d = batch.dims();
    const double t = batch.grid().node(node);
    if (is_constant(x_t)) {
        return 0.0;
    }
    if (t == 0.0) {
        return 1.0;
    }
    const auto levels = brownian_levels(batch, options.workers);
    const std::size_t stride = (batch.steps() + 1) * d;
    std::vector<double> states(M * d);
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t j = 0; j < d; ++j) {
            states[m * d + j] = levels[m * stride + node * d + j];
        }
    }
    const DesignMatrix design = build_design(options.basis, states, d, std::sqrt(t), options.workers);
    const Projector proj(design, options.workers);
    if (!proj.full_rank()) {
        return 1.0;
    }
    const auto fitted = proj.project(x_t);
    const double mean =
        deterministic_sum(M, options.workers, [&](std::size_t m) { return x_t[m]; }) /
        static_cast<double>(M);
    const double total = deterministic_sum(M, options.workers, [&](std::size_t m) {
        const double v = x_t[m] - mean;
        return v * v;
    });
    const double resid = deterministic_sum(M, options.workers, [&](std::size_t m) {
        const double v = x_t[m] - fitted[m];
        return v * v;
    });
    return total > 0.0 ? resid / total : 0.0;
}

}  // namespace

MartingaleReport is_g_martingale(const BrownianBatch& batch, const GeneratorSpec& g,
                                 std::span<const double> process, std::size_t s_node,
                                 std::size_t t_node, const MartingaleTestOptions& test,
                                 const SolverOptions& options) {
    const std::size_t M = batch.paths();
    const std::size_t nodes = batch.steps() + 1;
    if (process.size() != M * nodes) {
        throw InvalidArgument("is_g_martingale: process must be [paths][N+1]");
    }
    if (!(s_node < t_node) || t_node > batch.steps()) {
        throw InvalidArgument("is_g_martingale: need s_node < t_node <= N");
    }
    for (double v : process) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("is_g_martingale: process values must be finite");
        }
    }
    MartingaleReport rep;
    rep.s_node = s_node;
    rep.t_node = t_node;

    std::vector<double> x_t(M), x_s(M);
    for (std::size_t m = 0; m < M; ++m) {
        x_t[m] = process[m * nodes + t_node];
        x_s[m] = process[m * nodes + s_node];
    }
    rep.screen_residual = screen_projection(batch, x_t, t_node, options);
    if (rep.screen_residual > test.screen_tol) {
        rep.verdict = MartingaleVerdict::not_checkable;
        return rep;
    }

    const auto recovered = solve_between(batch, g, x_t, t_node, s_node, options);
    std::vector<double> dev(M);
    for (std::size_t m = 0; m < M; ++m) {
        dev[m] = recovered[m] - x_s[m];
    }
    const unsigned w = options.workers;
    rep.mean_deviation = deterministic_sum(M, w, [&](std::size_t m) { return dev[m]; }) /
                         static_cast<double>(M);
    const double ss = deterministic_sum(M, w, [&](std::size_t m) { return dev[m] * dev[m]; });
    rep.rmse = std::sqrt(ss / static_cast<double>(M));
    if (M > 1) {
        const double var = std::max(0.0, (ss - static_cast<double>(M) * rep.mean_deviation *
                                                   rep.mean_deviation) /
                                              static_cast<double>(M - 1));
        rep.std_error = std::sqrt(var / static_cast<double>(M));
    }

    if (rep.mean_deviation >= test.tol) {
        rep.verdict = MartingaleVerdict::submartingale;
    } else if (rep.mean_deviation <= -test.tol) {
        rep.verdict = MartingaleVerdict::supermartingale;
    } else if (rep.rmse < test.tol) {
        rep.verdict = MartingaleVerdict::martingale;
    } else {
        rep.verdict = MartingaleVerdict::inconclusive;
    }
    return rep;
}

}  // namespace bsdelab
