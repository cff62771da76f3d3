#include "bsdelab/cli/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "bsdelab/bdg_stats.hpp"
#include "bsdelab/brownian.hpp"
#include "bsdelab/bsde_solver.hpp"
#include "bsdelab/cli/config.hpp"
#include "bsdelab/cli/csv.hpp"
#include "bsdelab/cli/svg.hpp"
#include "bsdelab/counterexample.hpp"
#include "bsdelab/error.hpp"
#include "bsdelab/g_expectation.hpp"
#include "bsdelab/generator.hpp"

namespace bsdelab::cli {
namespace {

namespace fs = std::filesystem;

struct Context {
    ExperimentConfig cfg;
    fs::path out;
    unsigned workers = 1;
    std::vector<std::pair<std::string, std::string>> notes;

    std::string file(const std::string& name) const { return (out / name).string(); }
};

BrownianBatch make_batch(const Context& ctx, std::size_t dims) {
    const TimeGrid grid = make_uniform_grid(ctx.cfg.horizon, ctx.cfg.steps);
    return simulate_brownian(grid, dims, ctx.cfg.paths, SeedSpec{ctx.cfg.seed}, ctx.workers);
}

SolverOptions solver_options(const Context& ctx) {
    return SolverOptions{RegressionBasis{ctx.cfg.degree}, ctx.cfg.picard_iters, ctx.workers};
}

double column_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

int cmd_simulate(Context& ctx) {
    const BrownianBatch batch = make_batch(ctx, ctx.cfg.dims);
    const auto levels = brownian_levels(batch, ctx.workers);
    const std::size_t M = batch.paths();
    const std::size_t d = batch.dims();
    const std::size_t N = batch.steps();
    CsvTable table({"node", "t", "mean", "variance", "expected_variance"});
    for (std::size_t i = 0; i <= N; ++i) {
        double mean = 0.0;
        double var = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t m = 0; m < M; ++m) s += levels[(m * (N + 1) + i) * d + j];
            const double mj = s / static_cast<double>(M);
            double ss = 0.0;
            for (std::size_t m = 0; m < M; ++m) {
                const double dv = levels[(m * (N + 1) + i) * d + j] - mj;
                ss += dv * dv;
            }
            mean += mj / static_cast<double>(d);
            var += (M > 1 ? ss / static_cast<double>(M - 1) : 0.0) / static_cast<double>(d);
        }
        table.add_row({static_cast<double>(i), batch.grid().node(i), mean, var, batch.grid().node(i)});
    }
    table.write(ctx.file("simulate.csv"));
    return kExitOk;
}

BSDESolution run_solver(const Context& ctx, const BrownianBatch& batch, const GeneratorSpec& g) {
    return solve_backward(batch, g, make_terminal(ctx.cfg.terminal), solver_options(ctx));
}

int cmd_solve(Context& ctx) {
    const GeneratorSpec g = make_generator(ctx.cfg.generator, ctx.cfg.dims);
    const BrownianBatch batch = make_batch(ctx, ctx.cfg.dims);
    const BSDESolution sol = run_solver(ctx, batch, g);
    const std::size_t N = sol.steps();
    const std::size_t M = sol.paths;

    CsvTable table({"node", "t", "y_mean", "y_sd", "z1_mean", "z_sq_mean", "regression_residual",
                    "picard_last_update"});
    for (std::size_t i = 0; i <= N; ++i) {
        const auto y = sol.node_values(i);
        const double ym = column_mean(y);
        double ss = 0.0;
        for (double v : y) ss += (v - ym) * (v - ym);
        double z1 = 0.0, zsq = 0.0, resid = 0.0, upd = 0.0;
        if (i < N) {
            for (std::size_t m = 0; m < M; ++m) {
                const auto z = sol.z_at(m, i);
                z1 += z[0];
                for (double zj : z) zsq += zj * zj;
            }
            z1 /= static_cast<double>(M);
            zsq /= static_cast<double>(M);
            resid = sol.diagnostics[i].regression_residual;
            if (!sol.diagnostics[i].picard_updates.empty()) {
                upd = sol.diagnostics[i].picard_updates.back();
            }
        }
        table.add_row({static_cast<double>(i), sol.grid.node(i), ym,
                       M > 1 ? std::sqrt(ss / static_cast<double>(M - 1)) : 0.0, z1, zsq, resid,
                       upd});
    }
    table.write(ctx.file("solve.csv"));

    const GExpectationResult ge = g_expect_from(sol, g);
    const GeneratorEnergy mu = energy_mu(g, batch.grid());
    CsvTable summary({"value", "std_error", "ci_lo", "ci_hi", "mu", "mu_error_bound"});
    summary.add_row({ge.value, ge.std_error, ge.value - kNormal95 * ge.std_error,
                     ge.value + kNormal95 * ge.std_error, mu.mu, mu.error_bound});
    summary.write(ctx.file("gexpect.csv"));
    return kExitOk;
}

int cmd_ratio(Context& ctx) {
    const GeneratorSpec g = make_generator(ctx.cfg.generator, ctx.cfg.dims);
    const BrownianBatch batch = make_batch(ctx, ctx.cfg.dims);
    const BSDESolution sol = run_solver(ctx, batch, g);
    const PathFunctionals f = path_functionals(sol, false, ctx.workers);
    const RatioOptions opts{ctx.cfg.allow_nonzero_start, ctx.workers};

    CsvTable table({"p", "lhs_mean", "lhs_std_error", "lhs_ci_lo", "lhs_ci_hi", "rhs_mean",
                    "rhs_std_error", "rhs_ci_lo", "rhs_ci_hi", "ratio_upper", "ratio_upper_ci_lo",
                    "ratio_upper_ci_hi", "ratio_lower", "ratio_lower_ci_lo", "ratio_lower_ci_hi",
                    "y0_abs"});
    Series upper{"E[(Y*)^p] / E[<Y>^(p/2)]", {}};
    for (double p : ctx.cfg.p_list) {
        const RatioReport r = bdg_ratio(f, p, opts);
        table.add_row({p, r.lhs.mean, r.lhs.std_error, r.lhs.ci95.lo, r.lhs.ci95.hi, r.rhs.mean,
                       r.rhs.std_error, r.rhs.ci95.lo, r.rhs.ci95.hi, r.ratio_upper,
                       r.ratio_upper_ci.lo, r.ratio_upper_ci.hi, r.ratio_lower,
                       r.ratio_lower_ci.lo, r.ratio_lower_ci.hi, r.start_abs});
        upper.points.emplace_back(p, r.ratio_upper);
    }
    table.write(ctx.file("ratio.csv"));
    if (ctx.cfg.svg) {
        write_svg(LineChart{"BDG ratio vs p (" + g.name + ")", "p", "ratio", {upper}},
                  ctx.file("ratio.svg"));
    }
    return kExitOk;
}

int cmd_counterexample(Context& ctx) {
    const BrownianBatch batch = make_batch(ctx, 1);
    const DivergenceReport rep =
        divergence_report(ctx.cfg.n_list, batch, ctx.cfg.counterexample_p, ctx.workers);
    CsvTable table({"n", "lhs_root_exact", "sup_mc_mean", "sup_mc_ci_lo", "sup_mc_ci_hi",
                    "sup_lower_bound_analytic", "ratio", "ratio_over_n"});
    Series ratio{"measured ratio r(n)", {}};
    Series bound{"analytic lower bound / lhs", {}};
    double worst_residual = 0.0;
    for (const auto& row : rep.rows) {
        table.add_row({row.n, row.lhs_root_exact, row.sup_mc.mean, row.sup_mc.ci95.lo,
                       row.sup_mc.ci95.hi, row.sup_lower_bound_analytic, row.ratio,
                       row.ratio_over_n});
        ratio.points.emplace_back(row.n, row.ratio);
        bound.points.emplace_back(row.n, row.sup_lower_bound_analytic / row.lhs_root_exact);
        worst_residual = std::max(worst_residual, row.max_residual);
    }
    table.write(ctx.file("counterexample.csv"));

    CsvTable summary({"p", "loglog_slope", "ratio_strictly_increasing", "lower_side_holds",
                      "max_bsde_residual"});
    summary.add_row({rep.p, rep.loglog_slope, rep.ratio_strictly_increasing ? 1.0 : 0.0,
                     rep.lower_side_holds ? 1.0 : 0.0, worst_residual});
    summary.write(ctx.file("counterexample_summary.csv"));
    ctx.notes.emplace_back("counterexample.failing_hypothesis", rep.failing_hypothesis);
    ctx.notes.emplace_back("counterexample.martingale_claim", rep.martingale_claim);
    if (ctx.cfg.svg) {
        write_svg(LineChart{"Quadratic driver: BDG ratio vs n", "n", "ratio", {ratio, bound}},
                  ctx.file("counterexample.svg"));
    }
    return kExitOk;
}

int cmd_verify(Context& ctx) {
    const std::size_t d = ctx.cfg.dims;
    std::vector<GeneratorSpec> gens{
        builtin_generator(drivers::Zero{}, d),
        builtin_generator(drivers::LinearZ{0.5}, d),
        builtin_generator(drivers::TimeScaled{VShape{VProfile::constant, 1.0}}, d),
        builtin_generator(drivers::TimeScaled{VShape{VProfile::linear, 1.0}}, d),
        builtin_generator(drivers::TimeScaled{VShape{VProfile::sine, 1.0}}, d),
        builtin_generator(drivers::Quadratic{}, d),
    };
    std::vector<std::string> labels{"zero", "linear_z(0.5)", "time_scaled(constant,1)",
                                    "time_scaled(linear,1)", "time_scaled(sine,1)", "quadratic"};
    gens.push_back(make_generator(ctx.cfg.generator, d));
    labels.push_back("configured:" + ctx.cfg.generator.name);

    const SampleBox box{ctx.cfg.horizon, ctx.cfg.y_radius, ctx.cfg.z_radius};
    const std::size_t n = ctx.cfg.verify_samples;
    const auto points = sample_points(d, box, n, ctx.cfg.seed);
    std::vector<double> ys, ts;
    const std::size_t side = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(n)));
    for (std::size_t k = 0; k < side; ++k) {
        ys.push_back(points[k].y);
        ts.push_back(points[k].t);
    }

    CsvTable table({"generator", "check", "statistic", "tolerance", "pass", "samples"});
    bool ok = true;
    const auto add = [&](const std::string& label, const CheckReport& r) {
        table.add_row({label, r.check, r.statistic, r.tolerance, r.pass ? 1.0 : 0.0,
                       static_cast<double>(r.samples)});
        ok = ok && r.pass;
    };
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto& g = gens[i];
        if (g.claims_h2) add(labels[i], check_h2(g, ys, ts));
        if (g.claims_h1) add(labels[i], check_lipschitz(g, box, n, ctx.cfg.seed + 1));
        if (g.lipschitz_class()) add(labels[i], check_remark_bound(g, points));
    }
    table.write(ctx.file("verify.csv"));

    const BrownianBatch batch = make_batch(ctx, 1);
    const auto levels = brownian_levels(batch, ctx.workers);
    const std::size_t nodes = batch.steps() + 1;
    std::vector<double> X(levels.size()), A(levels.size());
    for (std::size_t m = 0; m < batch.paths(); ++m) {
        for (std::size_t i = 0; i < nodes; ++i) {
            const double b = levels[m * nodes + i];
            X[m * nodes + i] = b * b;
            A[m * nodes + i] = batch.grid().node(i);
        }
    }
    CsvTable lenglart({"k", "constant", "dominated", "worst_screen_excess", "sup_moment_mean",
                       "sup_moment_std_error", "bound", "margin_se", "pass"});
    for (double k : ctx.cfg.k_list) {
        const LenglartReport r = lenglart_check(X, A, nodes, k, ctx.workers);
        const bool pass = r.dominated && r.pass;
        lenglart.add_row({k, r.constant, r.dominated ? 1.0 : 0.0, r.worst_screen_excess,
                          r.sup_moment.mean, r.sup_moment.std_error, r.bound,
                          std::isfinite(r.margin_se) ? r.margin_se : 0.0, pass ? 1.0 : 0.0});
        ok = ok && pass;
    }
    lenglart.write(ctx.file("lenglart.csv"));
    return ok ? kExitOk : kExitCheckFailed;
}

void write_manifest(const Context& ctx, const std::string& subcommand, int status) {
    std::ofstream f(ctx.file("manifest.txt"), std::ios::binary | std::ios::trunc);
    f << "artifact = " << kArtifactName << '\n';
    f << "version = " << kArtifactVersion << '\n';
    f << "subcommand = " << subcommand << '\n';
    f << "status = " << status << '\n';
    for (const auto& [k, v] : resolved_settings(ctx.cfg)) {
        f << k << " = " << v << '\n';
    }
    for (const auto& [k, v] : ctx.notes) {
        f << k << " = " << v << '\n';
    }
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += (c == '\n' ? ' ' : c);
    }
    return out + "\"";
}

void report(std::ostream& err, const char* kind, const std::string& message) {
    err << "bsdelab: error kind=" << kind << " message=" << quoted(message) << '\n';
}

}  // namespace

int run(const RunRequest& request, std::ostream& err) {
    static const std::set<std::string> commands{"simulate", "solve", "ratio", "counterexample",
                                                "verify"};
    if (commands.count(request.subcommand) == 0) {
        report(err, "usage", "unknown subcommand '" + request.subcommand + "'");
        return kExitConfigError;
    }
    Context ctx;
    try {
        ctx.cfg = load_config(request.config_path);
        ctx.workers = request.workers.value_or(ctx.cfg.workers);
        if (request.workers && *request.workers > 1024) {
            throw ConfigError("--workers: at most 1024");
        }
        std::string out = ctx.cfg.output_dir;
        if (const char* env = std::getenv(kOutputEnvVar); env != nullptr && *env != '\0') {
            out = env;
        }
        if (request.out_dir) {
            out = *request.out_dir;
        }
        ctx.out = out;
        fs::create_directories(ctx.out);
    } catch (const ConfigError& e) {
        report(err, "config", e.what());
        return kExitConfigError;
    } catch (const fs::filesystem_error& e) {
        report(err, "config", e.what());
        return kExitConfigError;
    }

    int status = kExitOk;
    try {
        if (request.subcommand == "simulate") status = cmd_simulate(ctx);
        else if (request.subcommand == "solve") status = cmd_solve(ctx);
        else if (request.subcommand == "ratio") status = cmd_ratio(ctx);
        else if (request.subcommand == "counterexample") status = cmd_counterexample(ctx);
        else status = cmd_verify(ctx);
    } catch (const ConfigError& e) {
        report(err, "config", e.what());
        return kExitConfigError;
    } catch (const ContractViolation& e) {
        report(err, "config", e.what());
        return kExitConfigError;
    } catch (const InvalidArgument& e) {
        report(err, "config", e.what());
        return kExitConfigError;
    } catch (const NumericalFailure& e) {
        report(err, "numerical", e.what());
        return kExitNumericalFailure;
    }
    if (status == kExitCheckFailed) {
        report(err, "check", "one or more verification checks failed; see verify.csv");
    }
    write_manifest(ctx, request.subcommand, status);
    return status;
}

}  // namespace bsdelab::cli
