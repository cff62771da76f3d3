#include <gtest/gtest.h>

#include <cmath>

#include "bsdelab/counterexample.hpp"
#include "bsdelab/error.hpp"

namespace bsdelab {
namespace {

TEST(Counterexample, QuadraticSolutionExamples) {
    const TimeGrid grid = make_uniform_grid(1.0, 25);
    const auto batch = simulate_brownian(grid, 1, 300, SeedSpec{1});
    const auto zero = quadratic_solution({0.0, grid}, batch);
    for (double y : zero.Y) EXPECT_EQ(y, 0.0);
    for (double z : zero.Z) EXPECT_EQ(z, 0.0);

    const auto three = quadratic_solution({3.0, grid}, batch);
    for (std::size_t m = 0; m < batch.paths(); ++m) {
        EXPECT_NEAR(three.y(m, 25), 3.0 * path_values(batch, m).back() - 9.0, 1e-12);
        EXPECT_EQ(three.y(m, 0), 0.0);
    }
    const auto batch2 = simulate_brownian(grid, 2, 10, SeedSpec{1});
    EXPECT_THROW(quadratic_solution({1.0, grid}, batch2), InvalidArgument);
    EXPECT_THROW(quadratic_solution({1.0, make_uniform_grid(1.0, 24)}, batch), InvalidArgument);
}

TEST(Counterexample, IdentityHoldsToRounding) {
    const TimeGrid grid = make_uniform_grid(1.0, 50);
    const auto batch = simulate_brownian(grid, 1, 2000, SeedSpec{2});
    for (double n : {1.0, 3.0, 10.0}) {
        const auto sol = quadratic_solution({n, grid}, batch);
        for (double r : quadratic_identity_residual(sol, batch)) {
            EXPECT_LE(r, 1e-10) << "n = " << n;
        }
    }
}

TEST(Counterexample, TerminalMeanIdentity) {
    constexpr std::size_t M = 100000;
    const TimeGrid grid = make_uniform_grid(2.0, 10);
    const auto batch = simulate_brownian(grid, 1, M, SeedSpec{3});
    for (double n : {1.0, 4.0}) {
        const auto sol = quadratic_solution({n, grid}, batch);
        double s = 0.0;
        for (std::size_t m = 0; m < M; ++m) s += sol.y(m, 10);
        EXPECT_LT(std::abs(s / M + n * n * 2.0), 3.0 * n * std::sqrt(2.0) / std::sqrt(double(M)));
    }
}

TEST(Counterexample, ReportShape) {
    const TimeGrid grid = make_uniform_grid(1.0, 50);
    const auto batch = simulate_brownian(grid, 1, 20000, SeedSpec{4});
    const auto rep = divergence_report({1.0, 2.0, 4.0, 8.0}, batch, 1.0, 2);
    ASSERT_EQ(rep.rows.size(), 4u);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.lhs_root_exact, r.n);
        // r(n) >= n sqrt(T) - sqrt(2/pi), through sup|Y| >= |Y_T| and Jensen
        EXPECT_GE(r.ratio + 3.0 * r.sup_mc.std_error / r.n, r.n - std::sqrt(2.0 / M_PI));
        EXPECT_GE(r.sup_mc.mean + 3.0 * r.sup_mc.std_error, r.sup_lower_bound_analytic);
        EXPECT_DOUBLE_EQ(r.ratio_over_n, r.ratio / r.n);
        EXPECT_LE(r.max_residual, 1e-10);
    }
    EXPECT_TRUE(rep.ratio_strictly_increasing);
    EXPECT_TRUE(rep.lower_side_holds);
    EXPECT_NE(rep.failing_hypothesis.find("(H1)"), std::string::npos);
    EXPECT_GT(rep.loglog_slope, 0.0);

    const auto serial = divergence_report({1.0, 2.0, 4.0, 8.0}, batch, 1.0, 1);
    EXPECT_EQ(serial.loglog_slope, rep.loglog_slope);
    EXPECT_EQ(serial.rows[3].sup_mc.mean, rep.rows[3].sup_mc.mean);

    const auto p2 = divergence_report({2.0}, batch, 2.0);
    EXPECT_EQ(p2.rows[0].lhs_root_exact, 4.0);

    EXPECT_THROW(divergence_report({}, batch), InvalidArgument);
    EXPECT_THROW(divergence_report({2.0, 1.0}, batch), InvalidArgument);
    EXPECT_THROW(divergence_report({0.0, 1.0}, batch), InvalidArgument);
}

}  // namespace
}  // namespace bsdelab
