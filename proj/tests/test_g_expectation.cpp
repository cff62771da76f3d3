#include <gtest/gtest.h>

#include <cmath>

#include "bsdelab/error.hpp"
#include "bsdelab/g_expectation.hpp"
#include "bsdelab/philox.hpp"

namespace bsdelab {
namespace {

std::vector<GeneratorSpec> builtins() {
    return {builtin_generator(drivers::Zero{}), builtin_generator(drivers::LinearZ{0.5}),
            builtin_generator(drivers::LinearZ{-2.0}),
            builtin_generator(drivers::TimeScaled{{VProfile::constant, 1.0}}),
            builtin_generator(drivers::TimeScaled{{VProfile::linear, 1.0}}),
            builtin_generator(drivers::TimeScaled{{VProfile::sine, 2.0}})};
}

// [path][node] process built from the Brownian levels.
template <class F>
std::vector<double> process_from(const BrownianBatch& batch, F f) {
    const std::size_t nodes = batch.steps() + 1;
    std::vector<double> out(batch.paths() * nodes);
    for (std::size_t m = 0; m < batch.paths(); ++m) {
        const auto b = path_values(batch, m);
        for (std::size_t i = 0; i < nodes; ++i) {
            out[m * nodes + i] = f(b[i], batch.grid().node(i));
        }
    }
    return out;
}

TEST(GExpectation, PreservesConstantsExactly) {
    const auto batch = simulate_brownian(make_uniform_grid(0.7, 9), 1, 1000, SeedSpec{1});
    for (const auto& g : builtins()) {
        for (double c : {-1.0, 0.0, 2.5}) {
            const auto r = g_expect(batch, g, TerminalSpec::constant(c));
            EXPECT_EQ(r.value, c) << g.name;
            EXPECT_EQ(r.std_error, 0.0);
            for (double y : r.per_path_Y0) EXPECT_EQ(y, c);
        }
    }
}

class GExpectationLarge : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        batch_ = new BrownianBatch(
            simulate_brownian(make_uniform_grid(1.0, 50), 1, 100000, SeedSpec{2}));
    }
    static void TearDownTestSuite() {
        delete batch_;
        batch_ = nullptr;
    }
    static BrownianBatch* batch_;
};
BrownianBatch* GExpectationLarge::batch_ = nullptr;

TEST_F(GExpectationLarge, ClassicalExpectationOfBT) {
    const auto r = g_expect(*batch_, builtin_generator(drivers::Zero{}), TerminalSpec::linear());
    EXPECT_GT(r.std_error, 0.0);
    EXPECT_LT(std::abs(r.value), 3.0 * r.std_error);
}

TEST_F(GExpectationLarge, LinearDriftValue) {
    const auto r = g_expect(*batch_, builtin_generator(drivers::LinearZ{0.5}), TerminalSpec::linear());
    EXPECT_LT(std::abs(r.value - 0.5), 3.0 * r.std_error);
}

TEST_F(GExpectationLarge, ConditionalClassical) {
    const auto g = builtin_generator(drivers::Zero{});
    const auto y20 = conditional_g_expect(*batch_, g, TerminalSpec::linear(), 20);
    double s = 0.0;
    for (std::size_t m = 0; m < batch_->paths(); ++m) {
        const double d = y20[m] - path_values(*batch_, m)[20];
        s += d * d;
    }
    EXPECT_LT(std::sqrt(s / batch_->paths()), 0.02);
}

TEST_F(GExpectationLarge, SelfConsistentSolverOutputIsMartingale) {
    const auto g = builtin_generator(drivers::LinearZ{0.5});
    const auto sol = solve_backward(*batch_, g, TerminalSpec::linear());
    const auto rep = is_g_martingale(*batch_, g, sol.Y, 0, 50);
    EXPECT_EQ(rep.verdict, MartingaleVerdict::martingale) << to_string(rep.verdict);
    EXPECT_LT(rep.rmse, 0.03);
    const auto mid = is_g_martingale(*batch_, g, sol.Y, 10, 40);
    EXPECT_EQ(mid.verdict, MartingaleVerdict::martingale);
}

TEST_F(GExpectationLarge, Verdicts) {
    const auto g = builtin_generator(drivers::Zero{});
    const auto b = process_from(*batch_, [](double x, double) { return x; });
    EXPECT_EQ(is_g_martingale(*batch_, g, b, 10, 50).verdict, MartingaleVerdict::martingale);

    const auto up = process_from(*batch_, [](double x, double t) { return x + t; });
    const auto rs = is_g_martingale(*batch_, g, up, 10, 50);
    EXPECT_EQ(rs.verdict, MartingaleVerdict::submartingale);
    // E[B_50 + 1 | F_10] - (B_10 + 0.2) = 0.8, up to regression bias
    EXPECT_NEAR(rs.mean_deviation, 0.8, 0.005);

    const auto down = process_from(*batch_, [](double x, double t) { return x - t; });
    EXPECT_EQ(is_g_martingale(*batch_, g, down, 0, 25).verdict, MartingaleVerdict::supermartingale);

    // values at t unrelated to B_t fail the measurability screen
    std::vector<double> noise(b.size());
    CounterStream s(3, 0);
    for (auto& v : noise) v = s.next_normal();
    const auto nc = is_g_martingale(*batch_, g, noise, 10, 50);
    EXPECT_EQ(nc.verdict, MartingaleVerdict::not_checkable);
    EXPECT_GT(nc.screen_residual, 0.9);
}

TEST_F(GExpectationLarge, MonotoneInTerminal) {
    for (const auto& g : builtins()) {
        const auto lo = g_expect(*batch_, g, TerminalSpec::linear(1.0, 0.0));
        const auto hi = g_expect(*batch_, g, TerminalSpec::linear(1.0, 0.1));
        const double se = std::hypot(lo.std_error, hi.std_error);
        EXPECT_GE(hi.value, lo.value - 3.0 * se) << g.name;
    }
}

TEST(GExpectation, ConditionalEndpoints) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 10), 1, 3000, SeedSpec{4});
    const auto g = builtin_generator(drivers::TimeScaled{{VProfile::constant, 0.8}});
    const auto xi = TerminalSpec::markovian([](std::span<const double> b) { return std::max(b[0], 0.0); });
    const auto top = conditional_g_expect(batch, g, xi, 10);
    for (std::size_t m = 0; m < batch.paths(); ++m) {
        EXPECT_EQ(top[m], std::max(path_values(batch, m).back(), 0.0));
    }
    const auto node0 = conditional_g_expect(batch, g, xi, 0);
    const auto value = g_expect(batch, g, xi).value;
    for (double y : node0) EXPECT_EQ(y, value);
    EXPECT_THROW(conditional_g_expect(batch, g, xi, 11), InvalidArgument);
}

TEST(GExpectation, MartingaleArgumentChecks) {
    const auto batch = simulate_brownian(make_uniform_grid(1.0, 4), 1, 500, SeedSpec{5});
    const auto g = builtin_generator(drivers::Zero{});
    std::vector<double> x(500 * 5, 0.0);
    EXPECT_THROW(is_g_martingale(batch, g, x, 2, 2), InvalidArgument);
    EXPECT_THROW(is_g_martingale(batch, g, x, 1, 5), InvalidArgument);
    EXPECT_THROW(is_g_martingale(batch, g, std::vector<double>(10, 0.0), 0, 1), InvalidArgument);
    EXPECT_EQ(is_g_martingale(batch, g, x, 0, 4).verdict, MartingaleVerdict::martingale);
    EXPECT_EQ(to_string(MartingaleVerdict::not_checkable), "not_checkable");
}

}  // namespace
}  // namespace bsdelab
