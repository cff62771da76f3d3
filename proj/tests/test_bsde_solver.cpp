#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bsdelab/bsde_solver.hpp"
#include "bsdelab/error.hpp"
#include "bsdelab/philox.hpp"

namespace bsdelab {
namespace {

double max_node_rmse(const BSDESolution& sol, const BSDESolution& exact) {
    double worst = 0.0;
    for (std::size_t i = 0; i <= sol.steps(); ++i) {
        double s = 0.0;
        for (std::size_t m = 0; m < sol.paths; ++m) {
            const double d = sol.y(m, i) - exact.y(m, i);
            s += d * d;
        }
        worst = std::max(worst, std::sqrt(s / sol.paths));
    }
    return worst;
}

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

TEST(Solver, ConstantTerminalIsExact) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 10), 2, 1000, SeedSpec{1});
    for (const auto& g : {builtin_generator(drivers::Zero{}, 2),
                          builtin_generator(drivers::LinearZ{0.5}, 2),
                          builtin_generator(drivers::TimeScaled{{VProfile::sine, 3.0}}, 2)}) {
        const auto sol = solve_backward(batch, g, TerminalSpec::constant(-1.75));
        for (double y : sol.Y) ASSERT_EQ(y, -1.75);
        for (double z : sol.Z) ASSERT_EQ(z, 0.0);
    }
}

TEST(Solver, TerminalExactBitwise) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 8), 1, 2000, SeedSpec{2});
    const auto xi = TerminalSpec::markovian([](std::span<const double> b) { return std::exp(b[0]); });
    const auto sol = solve_backward(batch, builtin_generator(drivers::LinearZ{0.3}), xi);
    for (std::size_t m = 0; m < batch.paths(); ++m) {
        const auto v = path_values(batch, m);
        ASSERT_EQ(sol.y(m, 8), std::exp(v.back()));
    }
    for (double y : sol.Y) ASSERT_TRUE(std::isfinite(y));
}

TEST(Solver, ClassicalMartingale) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 50), 1, 100000, SeedSpec{3});
    const auto sol = solve_backward(batch, builtin_generator(drivers::Zero{}), TerminalSpec::linear());
    const auto exact = analytic_solution("classical_martingale", batch, 0.0);
    EXPECT_LT(max_node_rmse(sol, exact), 0.02);
    EXPECT_NEAR(mean(sol.Z), 1.0, 0.01);
}

TEST(Solver, LinearDriftClosedForm) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 50), 1, 100000, SeedSpec{4});
    const auto g = builtin_generator(drivers::LinearZ{0.5});
    const auto sol = solve_backward(batch, g, TerminalSpec::linear());
    const auto exact = analytic_solution("linear_z_drift", batch, 0.5);
    EXPECT_LT(max_node_rmse(sol, exact), 0.02);
    EXPECT_NEAR(sol.y(0, 0), 0.5, 0.01);

    // discrete residual of the solver output stays below ten regression residual norms
    const auto res = solution_residual(sol, batch, g);
    double reg = 0.0;
    for (const auto& d : sol.diagnostics) reg = std::max(reg, d.regression_residual);
    double res_rms = 0.0;
    for (double r : res) res_rms += r * r;
    res_rms = std::sqrt(res_rms / res.size());
    EXPECT_LT(res_rms, 10.0 * reg);
}

TEST(Solver, Diagnostics) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 5), 1, 1000, SeedSpec{5});
    SolverOptions opt;
    opt.picard_iters = 4;
    const auto sol = solve_backward(batch, builtin_generator(drivers::LinearZ{1.0}),
                                    TerminalSpec::linear(), opt);
    ASSERT_EQ(sol.diagnostics.size(), 5u);
    for (const auto& d : sol.diagnostics) {
        EXPECT_EQ(d.picard_updates.size(), 4u);
        EXPECT_GT(d.regression_residual, 0.0);
    }
}

// g = sin(y) tanh(z): Lipschitz in y with u = 1, so each sweep contracts by dt.
TEST(Solver, PicardContraction) {
    GeneratorSpec g = builtin_generator(drivers::LinearZ{1.0});
    g.name = "sin_tanh";
    g.eval = [](double, double y, std::span<const double> z) { return std::sin(y) * std::tanh(z[0]); };
    g.u_env = make_envelope({VProfile::constant, 1.0});
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 10), 1, 5000, SeedSpec{6});
    SolverOptions opt;
    opt.picard_iters = 5;
    const auto sol = solve_backward(
        batch, g, TerminalSpec::markovian([](std::span<const double> b) { return 1.0 + b[0]; }), opt);
    for (std::size_t i = 0; i < sol.steps(); ++i) {
        const auto& up = sol.diagnostics[i].picard_updates;
        const double dt = sol.grid.dt(i);
        for (std::size_t k = 1; k < up.size(); ++k) {
            EXPECT_LE(up[k], dt * up[k - 1] + 1e-15) << "step " << i << " sweep " << k;
            if (up[k - 1] > 1e-14) {
                EXPECT_LT(up[k], up[k - 1]);
            }
        }
    }
}

// The scheme carries no time-discretization error for this driver, so the
// RMSE after refinement is noise-dominated; compare on shared paths.
TEST(Solver, RefinementDoesNotDegrade) {
    constexpr std::size_t M = 100000;
    const auto fine = simulate_brownian(make_uniform_grid(1.0, 100), 1, M, SeedSpec{1});
    std::vector<double> coarse_inc(M * 50);
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t i = 0; i < 50; ++i) {
            coarse_inc[m * 50 + i] = fine.increment(m, 2 * i, 0) + fine.increment(m, 2 * i + 1, 0);
        }
    }
    const auto coarse =
        BrownianBatch::from_increments(make_uniform_grid(1.0, 50), 1, M, std::move(coarse_inc));
    const auto g = builtin_generator(drivers::LinearZ{0.5});
    const double e50 = max_node_rmse(solve_backward(coarse, g, TerminalSpec::linear()),
                                     analytic_solution("linear_z_drift", coarse, 0.5));
    const double e100 = max_node_rmse(solve_backward(fine, g, TerminalSpec::linear()),
                                      analytic_solution("linear_z_drift", fine, 0.5));
    EXPECT_LE(e100, 1.05 * e50) << "N=50 " << e50 << " N=100 " << e100;
}

TEST(Solver, ComparisonOfTerminals) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 20), 1, 20000, SeedSpec{7});
    const auto g = builtin_generator(drivers::TimeScaled{{VProfile::constant, 1.0}});
    const auto lo = solve_backward(batch, g, TerminalSpec::linear(1.0, 0.0));
    const auto hi = solve_backward(batch, g, TerminalSpec::linear(1.0, 0.1));
    EXPECT_GE(hi.y(0, 0), lo.y(0, 0));
}

TEST(Solver, WorkerCountInvariance) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 12), 2, 8000, SeedSpec{8});
    const auto g = builtin_generator(drivers::TimeScaled{{VProfile::linear, 1.0}}, 2);
    const auto xi = TerminalSpec::markovian([](std::span<const double> b) { return b[0] * b[1]; });
    SolverOptions one, many;
    many.workers = 5;
    const auto a = solve_backward(batch, g, xi, one);
    const auto b = solve_backward(batch, g, xi, many);
    EXPECT_EQ(a.Y, b.Y);
    EXPECT_EQ(a.Z, b.Z);
}

TEST(Solver, Errors) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 4), 1, 1000, SeedSpec{9});
    EXPECT_THROW(solve_backward(batch, builtin_generator(drivers::Quadratic{}), TerminalSpec::linear()),
                 ContractViolation);
    EXPECT_THROW(solve_backward(batch, builtin_generator(drivers::Zero{}),
                                TerminalSpec::explicit_paths(std::vector<double>(1000, 0.0))),
                 ContractViolation);
    SolverOptions zero_picard;
    zero_picard.picard_iters = 0;
    EXPECT_THROW(solve_backward(batch, builtin_generator(drivers::Zero{}), TerminalSpec::linear(),
                                zero_picard),
                 InvalidArgument);
    SolverOptions huge;
    huge.basis.degree = 100;  // 101 features, not below 1000 / 10
    EXPECT_THROW(solve_backward(batch, builtin_generator(drivers::Zero{}), TerminalSpec::linear(), huge),
                 InvalidArgument);
    EXPECT_THROW(solve_backward(batch, builtin_generator(drivers::Zero{}, 2), TerminalSpec::linear()),
                 InvalidArgument);
    EXPECT_THROW(TerminalSpec::explicit_paths({1.0, std::nan("")}), InvalidArgument);
}

TEST(Solver, RankDeficientStepIsNamed) {
    constexpr std::size_t M = 400;
    const TimeGrid grid = make_uniform_grid(1.0, 3);
    CounterStream s(10, 0);
    std::vector<double> inc(M * 3);
    for (std::size_t m = 0; m < M; ++m) {
        inc[m * 3] = (m % 2 == 0) ? 1.0 : -1.0;  // B at node 1 takes two values
        inc[m * 3 + 1] = s.next_normal();
        inc[m * 3 + 2] = s.next_normal();
    }
    const auto batch = BrownianBatch::from_increments(grid, 1, M, std::move(inc));
    try {
        solve_backward(batch, builtin_generator(drivers::Zero{}), TerminalSpec::linear());
        FAIL() << "expected RankDeficient";
    } catch (const RankDeficient& e) {
        EXPECT_EQ(e.step(), 1u);
    }
}

TEST(Solver, SolveBetweenMatchesFullSolve) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 10), 1, 5000, SeedSpec{11});
    const auto g = builtin_generator(drivers::LinearZ{0.4});
    const auto xi = TerminalSpec::markovian([](std::span<const double> b) { return std::cos(b[0]); });
    const auto sol = solve_backward(batch, g, xi);
    const auto y3 = solve_between(batch, g, sol.node_values(10), 10, 3);
    EXPECT_EQ(y3, sol.node_values(3));
    const auto same = solve_between(batch, g, sol.node_values(6), 6, 6);
    EXPECT_EQ(same, sol.node_values(6));
    EXPECT_THROW(solve_between(batch, g, sol.node_values(6), 6, 7), InvalidArgument);
}

TEST(Analytic, Families) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 10), 1, 200, SeedSpec{12});
    const auto zero = analytic_solution("quadratic_family", batch, 0.0);
    for (double y : zero.Y) EXPECT_EQ(y, 0.0);
    for (double z : zero.Z) EXPECT_EQ(z, 0.0);

    const auto q3 = analytic_solution("quadratic_family", batch, 3.0);
    for (std::size_t m = 0; m < batch.paths(); ++m) {
        EXPECT_NEAR(q3.y(m, 10), 3.0 * path_values(batch, m).back() - 9.0, 1e-12);
    }
    for (double z : q3.Z) EXPECT_EQ(z, 3.0);

    const auto lin = analytic_solution("linear_z_drift", batch, 0.5);
    for (std::size_t m = 0; m < batch.paths(); ++m) EXPECT_EQ(lin.y(m, 0), 0.5);
    EXPECT_TRUE(lin.diagnostics.empty());

    EXPECT_THROW(analytic_solution("heat_kernel", batch, 0.0), InvalidArgument);
    const auto batch2 = simulate_brownian(make_uniform_grid(1.0, 4), 2, 10, SeedSpec{1});
    EXPECT_THROW(analytic_solution("quadratic_family", batch2, 1.0), InvalidArgument);
}

TEST(Analytic, ResidualsVanish) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 20), 1, 500, SeedSpec{13});
    const auto check = [&](const BSDESolution& sol, const GeneratorSpec& g, double tol) {
        for (double r : solution_residual(sol, batch, g)) EXPECT_LE(r, tol);
    };
    check(analytic_solution("constant", batch, 4.0), builtin_generator(drivers::Zero{}), 0.0);
    check(analytic_solution("classical_martingale", batch, 0.0), builtin_generator(drivers::Zero{}), 1e-14);
    check(analytic_solution("linear_z_drift", batch, 0.5), builtin_generator(drivers::LinearZ{0.5}), 1e-14);

    // In the backward form the quadratic family solves the equation with driver
    // +z^2; the -z^2 builtin leaves exactly 2 n^2 dt per step.
    GeneratorSpec plus_sq = builtin_generator(drivers::Quadratic{});
    plus_sq.eval = [](double, double, std::span<const double> z) { return z[0] * z[0]; };
    const auto q3 = analytic_solution("quadratic_family", batch, 3.0);
    check(q3, plus_sq, 1e-10);
    for (double r : solution_residual(q3, batch, builtin_generator(drivers::Quadratic{}))) {
        EXPECT_NEAR(r, 2.0 * 9.0 * 0.05, 1e-10);
    }

    const auto other = simulate_brownian(make_uniform_grid(1.0, 21), 1, 500, SeedSpec{13});
    EXPECT_THROW(solution_residual(analytic_solution("constant", other, 1.0), batch,
                                   builtin_generator(drivers::Zero{})),
                 InvalidArgument);
}

}  // namespace
}  // namespace bsdelab
