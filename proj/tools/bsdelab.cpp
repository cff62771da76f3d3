#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bsdelab/cli/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo laboratory for BSDEs, g-expectations and BDG-type inequalities"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    for (const char* name : {"simulate", "solve", "ratio", "counterexample", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "experiment configuration file")->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--workers", workers, "worker threads");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "bsdelab: error kind=usage message=\"" << e.what() << "\"\n";
        return bsdelab::cli::kExitConfigError;
    }

    bsdelab::cli::RunRequest request;
    request.subcommand = app.get_subcommands().front()->get_name();
    request.config_path = config;
    request.out_dir = out;
    request.workers = workers;
    return bsdelab::cli::run(request, std::cerr);
}
