#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace bsdelab::cli {

inline constexpr const char* kArtifactName = "bsdelab";
inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kOutputEnvVar = "BSDELAB_OUTPUT_DIR";

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitConfigError = 2,
    kExitNumericalFailure = 3,
};

struct RunRequest {
    std::string subcommand;  // simulate | solve | ratio | counterexample | verify
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<unsigned> workers;
};

// Output directory precedence: --out, then the environment variable, then run.output.
int run(const RunRequest& request, std::ostream& err);

}  // namespace bsdelab::cli
