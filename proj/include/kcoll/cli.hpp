#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kcoll/report.hpp"

namespace kcoll::cli {

/// Usage or configuration problem; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Subcommand { interpolate, elliptic, heat_spde, converge };

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kIoError = 2, kNumericalError = 3 };

/// Effective run configuration. Defaults describe the heat-equation experiment.
struct RunConfig {
    Subcommand subcommand = Subcommand::heat_spde;
    int m = 3;
    double theta = 26.5;
    int n_interior = 30;
    double horizon = 1.0;
    int steps = 200;
    int noise = 1;  // 1 -> R1, 2 -> R2
    double sigma = 1.0;
    int paths = 1000;
    std::uint64_t seed = 0;
    int panels = 64;
    int nodes = 10;
    int workers = 1;
    double epsilon = 1e-3;
    int eval_points = 101;
    std::vector<std::pair<int, int>> levels{{9, 50}, {19, 100}, {39, 200}};
    std::string output = "-";
};

std::string to_string(Subcommand s);

/// Applies `key=value` lines ('#' starts a comment) on top of `config`.
/// Unknown keys and malformed values throw ConfigError. Returns the keys set.
std::vector<std::string> apply_config_text(RunConfig& config, const std::string& text);

/// Range checks; throws ConfigError naming the field.
void validate(const RunConfig& config);

/// Parses argv: subcommand, --config file, then flags (flags win over the file).
RunConfig parse_config(int argc, const char* const* argv);

/// Human-readable `key=value` dump of the effective configuration.
std::string describe(const RunConfig& config);

/// Runs one refinement level of the heat experiment.
ConvergenceLevel run_convergence_level(const RunConfig& config, int n_interior, int steps);

/// Executes the configured subcommand and writes its CSV.
void run(const RunConfig& config);

/// Full entry point: parse, run, map failures to exit codes.
int main(int argc, const char* const* argv, std::ostream& err);

}  // namespace kcoll::cli
