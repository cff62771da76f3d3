#include "bsdelab/bsde_solver.hpp"

#include <cmath>
#include <string>

#include "bsdelab/error.hpp"
#include "bsdelab/parallel.hpp"

namespace bsdelab {

TerminalSpec TerminalSpec::markovian(std::function<double(std::span<const double>)> phi) {
    TerminalSpec t;
    t.kind = Kind::markovian;
    t.phi = std::move(phi);
    return t;
}

TerminalSpec TerminalSpec::explicit_paths(std::vector<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("explicit terminal values must be finite");
        }
    }
    TerminalSpec t;
    t.kind = Kind::explicit_paths;
    t.values = std::move(values);
    return t;
}

TerminalSpec TerminalSpec::constant(double c) {
    return markovian([c](std::span<const double>) { return c; });
}

TerminalSpec TerminalSpec::linear(double a, double b) {
    return markovian([a, b](std::span<const double> x) { return a * x[0] + b; });
}

BSDESolution::BSDESolution(TimeGrid g, std::size_t m, std::size_t d)
    : grid(std::move(g)),
      paths(m),
      dims(d),
      Y(m * (grid.steps() + 1), 0.0),
      Z(m * grid.steps() * d, 0.0) {}

std::vector<double> BSDESolution::node_values(std::size_t node) const {
    if (node > steps()) {
        throw InvalidArgument("node index " + std::to_string(node) + " out of range");
    }
    std::vector<double> out(paths);
    for (std::size_t m = 0; m < paths; ++m) {
        out[m] = y(m, node);
    }
    return out;
}

namespace {

double rms(const std::vector<double>& a, const std::vector<double>& b, unsigned workers) {
    const double s = deterministic_sum(a.size(), workers, [&](std::size_t m) {
        const double d = a[m] - b[m];
        return d * d;
    });
    return std::sqrt(s / static_cast<double>(a.size()));
}

void check_basis_size(const RegressionBasis& basis, std::size_t dims, std::size_t paths) {
    const std::size_t features = basis.feature_count(dims);
    if (features * 10 >= paths) {
        throw InvalidArgument("regression basis has " + std::to_string(features) +
                              " features; need fewer than paths/10 = " +
                              std::to_string(paths / 10));
    }
}

void check_generator(const GeneratorSpec& g, const BrownianBatch& batch) {
    if (!g.lipschitz_class()) {
        throw ContractViolation("generator '" + g.name +
                                "' is not in the (H1)-(H2) class; the regression scheme "
                                "requires a generalized Lipschitz driver");
    }
    if (g.dims != batch.dims()) {
        throw InvalidArgument("generator dimension does not match the Brownian batch");
    }
}

// Backward induction from terminal_node to target_node. When `out` is set,
// Y, Z and diagnostics for the visited steps are written into it.
std::vector<double> backward_pass(const BrownianBatch& batch, const std::vector<double>& levels,
                                  const GeneratorSpec& g, std::vector<double> y_next,
                                  std::size_t terminal_node, std::size_t target_node,
                                  const SolverOptions& opt, BSDESolution* out) {
    const std::size_t M = batch.paths();
    const std::size_t d = batch.dims();
    const std::size_t stride = (batch.steps() + 1) * d;
    const TimeGrid& grid = batch.grid();
    const unsigned workers = opt.workers;

    std::vector<double> states(M * d);
    std::vector<double> target(M);
    std::vector<double> zi(M * d);
    std::vector<double> y_cur(M);
    std::vector<double> y_new(M);

    for (std::size_t i = terminal_node; i-- > target_node;) {
        const double t = grid.node(i);
        const double dt = grid.dt(i);
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t j = 0; j < d; ++j) {
                states[m * d + j] = levels[m * stride + i * d + j];
            }
        }
        // F_0 is trivial: at t = 0 only the constant feature is used.
        const RegressionBasis basis = t > 0.0 ? opt.basis : RegressionBasis{0};
        const DesignMatrix design =
            build_design(basis, states, d, t > 0.0 ? std::sqrt(t) : 1.0, workers);
        const Projector proj(design, workers);
        const auto project = [&](std::span<const double> v) {
            if (!proj.full_rank() && !is_constant(v)) {
                throw RankDeficient(i, proj.rank(), proj.features());
            }
            return proj.project(v);
        };

        const std::vector<double> ey = project(y_next);
        for (std::size_t j = 0; j < d; ++j) {
            parallel_for(M, workers, [&](std::size_t b, std::size_t e) {
                for (std::size_t m = b; m < e; ++m) {
                    target[m] = (y_next[m] - ey[m]) * batch.increment(m, i, j);
                }
            });
            const std::vector<double> zj = project(target);
            for (std::size_t m = 0; m < M; ++m) {
                zi[m * d + j] = zj[m] / dt;
            }
        }

        StepDiagnostics diag;
        diag.regression_residual = rms(y_next, ey, workers);
        y_cur = ey;
        for (std::size_t k = 0; k < opt.picard_iters; ++k) {
            parallel_for(M, workers, [&](std::size_t b, std::size_t e) {
                for (std::size_t m = b; m < e; ++m) {
                    const std::span<const double> z(zi.data() + m * d, d);
                    y_new[m] = ey[m] + g(t, y_cur[m], z) * dt;
                }
            });
            diag.picard_updates.push_back(rms(y_new, y_cur, workers));
            std::swap(y_cur, y_new);
        }
        for (std::size_t m = 0; m < M; ++m) {
            if (!std::isfinite(y_cur[m])) {
                throw NumericalFailure("non-finite Y at step " + std::to_string(i));
            }
        }

        if (out != nullptr) {
            for (std::size_t m = 0; m < M; ++m) {
                out->y(m, i) = y_cur[m];
                for (std::size_t j = 0; j < d; ++j) {
                    out->z(m, i, j) = zi[m * d + j];
                }
            }
            out->diagnostics[i] = std::move(diag);
        }
        std::swap(y_next, y_cur);
    }
    return y_next;
}

}  // namespace

BSDESolution solve_backward(const BrownianBatch& batch, const GeneratorSpec& g,
                            const TerminalSpec& xi, const SolverOptions& options) {
    check_generator(g, batch);
    if (xi.kind != TerminalSpec::Kind::markovian || !xi.phi) {
        throw ContractViolation(
            "solve_backward: terminal must be markovian (a function of B_T); explicit paths are "
            "only supported through analytic solutions");
    }
    if (options.picard_iters == 0) {
        throw InvalidArgument("solve_backward: picard_iters must be at least 1");
    }
    check_basis_size(options.basis, batch.dims(), batch.paths());

    const std::size_t M = batch.paths();
    const std::size_t d = batch.dims();
    const std::size_t N = batch.steps();
    const auto levels = brownian_levels(batch, options.workers);

    BSDESolution sol(batch.grid(), M, d);
    sol.diagnostics.resize(N);
    std::vector<double> terminal(M);
    for (std::size_t m = 0; m < M; ++m) {
        terminal[m] = xi.phi(std::span<const double>(levels.data() + (m * (N + 1) + N) * d, d));
        if (!std::isfinite(terminal[m])) {
            throw InvalidArgument("solve_backward: terminal value is not finite on path " +
                                  std::to_string(m));
        }
        sol.y(m, N) = terminal[m];
    }
    backward_pass(batch, levels, g, std::move(terminal), N, 0, options, &sol);
    return sol;
}

std::vector<double> solve_between(const BrownianBatch& batch, const GeneratorSpec& g,
                                  std::span<const double> terminal_values,
                                  std::size_t terminal_node, std::size_t target_node,
                                  const SolverOptions& options) {
    check_generator(g, batch);
    if (terminal_node > batch.steps() || target_node > terminal_node) {
        throw InvalidArgument("solve_between: need target_node <= terminal_node <= N");
    }
    if (terminal_values.size() != batch.paths()) {
        throw InvalidArgument("solve_between: one terminal value per path required");
    }
    if (options.picard_iters == 0) {
        throw InvalidArgument("solve_between: picard_iters must be at least 1");
    }
    check_basis_size(options.basis, batch.dims(), batch.paths());
    const auto levels = brownian_levels(batch, options.workers);
    return backward_pass(batch, levels, g,
                         std::vector<double>(terminal_values.begin(), terminal_values.end()),
                         terminal_node, target_node, options, nullptr);
}

AnalyticFamily analytic_family(std::string_view name, double param) {
    using K = AnalyticFamily::Kind;
    if (name == "constant") return {K::constant, param};
    if (name == "classical_martingale") return {K::classical_martingale, param};
    if (name == "linear_z_drift") return {K::linear_z_drift, param};
    if (name == "quadratic_family") return {K::quadratic_family, param};
    throw InvalidArgument("unknown analytic solution '" + std::string(name) + "'");
}

double analytic_y(const AnalyticFamily& family, double b, double t, double horizon) {
    using K = AnalyticFamily::Kind;
    const double c = family.param;
    switch (family.kind) {
        case K::constant: return c;
        case K::classical_martingale: return b;
        case K::linear_z_drift: return b + c * (horizon - t);
        case K::quadratic_family: return c * b - c * c * t;
    }
    return 0.0;
}

double analytic_z(const AnalyticFamily& family, std::size_t dim) {
    using K = AnalyticFamily::Kind;
    switch (family.kind) {
        case K::constant: return 0.0;
        case K::classical_martingale:
        case K::linear_z_drift: return dim == 0 ? 1.0 : 0.0;
        case K::quadratic_family: return family.param;
    }
    return 0.0;
}

BSDESolution analytic_solution(const AnalyticFamily& family, const BrownianBatch& batch) {
    using K = AnalyticFamily::Kind;
    if (!std::isfinite(family.param)) {
        throw InvalidArgument("analytic_solution: parameter must be finite");
    }
    const std::size_t d = batch.dims();
    if (family.kind == K::quadratic_family && d != 1) {
        throw InvalidArgument("analytic_solution: quadratic_family requires d = 1");
    }
    const std::size_t M = batch.paths();
    const std::size_t N = batch.steps();
    const TimeGrid& grid = batch.grid();
    const double T = grid.horizon();
    BSDESolution sol(grid, M, d);
    for (std::size_t m = 0; m < M; ++m) {
        const auto inc = batch.path_increments(m);
        double b = 0.0;  // first coordinate of B
        for (std::size_t i = 0; i <= N; ++i) {
            if (i > 0) {
                b += inc[(i - 1) * d];
            }
            sol.y(m, i) = analytic_y(family, b, grid.node(i), T);
            if (i < N) {
                for (std::size_t j = 0; j < d; ++j) {
                    sol.z(m, i, j) = analytic_z(family, j);
                }
            }
        }
    }
    return sol;
}

BSDESolution analytic_solution(std::string_view name, const BrownianBatch& batch, double param) {
    return analytic_solution(analytic_family(name, param), batch);
}

std::vector<double> solution_residual(const BSDESolution& sol, const BrownianBatch& batch,
                                      const GeneratorSpec& g) {
    if (sol.paths != batch.paths() || sol.dims != batch.dims() || !(sol.grid == batch.grid()) ||
        sol.Y.size() != sol.paths * (sol.steps() + 1) ||
        sol.Z.size() != sol.paths * sol.steps() * sol.dims || g.dims != sol.dims) {
        throw InvalidArgument("solution_residual: solution, batch and generator shapes differ");
    }
    const std::size_t d = sol.dims;
    std::vector<double> out(sol.paths, 0.0);
    for (std::size_t m = 0; m < sol.paths; ++m) {
        double worst = 0.0;
        for (std::size_t i = 0; i < sol.steps(); ++i) {
            const auto z = sol.z_at(m, i);
            double mart = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                mart += z[j] * batch.increment(m, i, j);
            }
            const double r = sol.y(m, i + 1) - sol.y(m, i) +
                             g(sol.grid.node(i), sol.y(m, i), z) * sol.grid.dt(i) - mart;
            worst = std::max(worst, std::abs(r));
        }
        out[m] = worst;
    }
    return out;
}

}  // namespace bsdelab
