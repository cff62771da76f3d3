#include <gtest/gtest.h>

#include <fstream>

#include "bsdelab/cli/config.hpp"
#include "bsdelab/cli/csv.hpp"
#include "bsdelab/error.hpp"

namespace bsdelab::cli {
namespace {

TEST(Config, DefaultsFromMinimalFile) {
    const auto c = parse_config("schema_version = 1\n");
    EXPECT_EQ(c.seed, 1u);
    EXPECT_EQ(c.steps, 50u);
    EXPECT_EQ(c.generator.name, "zero");
    EXPECT_EQ(c.p_list, (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(parse_config("schema_version = 1\n[solver]\n").degree, 3u);
}

TEST(Config, FullFile) {
    const auto c = parse_config(R"(schema_version = 1
[run]
seed = 42
workers = 4
output = results
svg = false
[grid]
horizon = 2.5
steps = 20
[paths]
count = 5000
dims = 2
[generator]
name = time_scaled
v_profile = sine
v_scale = 0.5
[terminal]
name = call
strike = 0.25
[solver]
degree = 2
picard_iters = 5
[ratio]
p_list = 1, 2, 4
allow_nonzero_start = false
[counterexample]
n_list = 1,3,9
p = 2
[verify]
samples = 100
k_list = 0.5
)");
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.workers, 4u);
    EXPECT_EQ(c.output_dir, "results");
    EXPECT_FALSE(c.svg);
    EXPECT_EQ(c.horizon, 2.5);
    EXPECT_EQ(c.dims, 2u);
    EXPECT_EQ(c.generator.v_profile, "sine");
    EXPECT_EQ(c.terminal.strike, 0.25);
    EXPECT_EQ(c.p_list, (std::vector<double>{1.0, 2.0, 4.0}));
    EXPECT_FALSE(c.allow_nonzero_start);
    EXPECT_EQ(c.n_list, (std::vector<double>{1.0, 3.0, 9.0}));
    EXPECT_EQ(c.counterexample_p, 2.0);
    EXPECT_EQ(c.k_list, (std::vector<double>{0.5}));

    const auto g = make_generator(c.generator, c.dims);
    EXPECT_EQ(g.name, "time_scaled");
    const auto xi = make_terminal(c.terminal);
    const std::vector<double> b{1.0, 0.0};
    EXPECT_EQ(xi.phi(b), 0.75);
}

TEST(Config, Rejections) {
    const auto bad = [](const std::string& body) {
        EXPECT_THROW(parse_config("schema_version = 1\n" + body), ConfigError) << body;
    };
    bad("[grid]\nsteps = 0\n");
    bad("[grid]\nhorizon = -1\n");
    bad("[grid]\nhorizon = nan\n");
    bad("[grid]\nstep = 5\n");
    bad("[mystery]\nx = 1\n");
    bad("[paths]\ncount = -3\n");
    bad("[paths]\ncount = 12abc\n");
    bad("[generator]\nname = cubic\n");
    bad("[generator]\nname = time_scaled\nv_profile = cosine\n");
    bad("[terminal]\nname = digital\n");
    bad("[solver]\npicard_iters = 0\n");
    bad("[ratio]\np_list = 0.5, 2\n");
    bad("[ratio]\np_list = 2, 16\n");
    bad("[counterexample]\nn_list = 4, 2\n");
    bad("[verify]\nk_list = 1\n");
    bad("[run]\nsvg = maybe\n");
    bad("stray = 1\n");
    bad("[grid]\nsteps = 4\n[grid]\nhorizon = 2\n");
    EXPECT_THROW(parse_config("[grid]\nsteps = 4\n"), ConfigError);
    EXPECT_THROW(parse_config("schema_version = 2\n"), ConfigError);
    EXPECT_THROW(parse_config("schema_version = 1\n[grid\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/path.ini"), ConfigError);
}

TEST(Config, ResolvedSettingsExcludeWorkersAndOutput) {
    auto a = parse_config("schema_version = 1\n[run]\nworkers = 1\noutput = a\n");
    auto b = parse_config("schema_version = 1\n[run]\nworkers = 8\noutput = b\n");
    EXPECT_EQ(resolved_settings(a), resolved_settings(b));
    for (const auto& [k, v] : resolved_settings(a)) {
        EXPECT_EQ(k.find("workers"), std::string::npos);
        EXPECT_EQ(k.find("output"), std::string::npos);
    }
}

TEST(Csv, FormattingAndValidation) {
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(-0.0), "0");
    EXPECT_EQ(format_real(2.0), "2");
    CsvTable t({"a", "b"});
    t.add_row({1.5, std::string("x")});
    EXPECT_EQ(t.str(), "a,b\n1.5,x\n");
    EXPECT_THROW(t.add_row({std::nan(""), 1.0}), NumericalFailure);
    EXPECT_THROW(t.add_row({1.0}), InvalidArgument);
}

}  // namespace
}  // namespace bsdelab::cli
