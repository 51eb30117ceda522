#pragma once

// Command-line front end: run configuration, estimator orchestration over
// parameter grids, CSV and manifest emission.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "natrans/models.hpp"
#include "natrans/oscillator.hpp"

namespace natrans::cli {

inline constexpr const char *kVersion = "1.0.0";

enum ExitCode : int { Ok = 0, ConfigInvalid = 2, NonConvergence = 3, IoFailure = 4 };

enum class Command { SpinFlip, Reflect, Oscillator, Sweep, Validate };
enum class Estimator { Exact, Oracle, Adiabatic, Transformed, Born, MaitraHeller, Fourier };
enum class Model { RosenZener, Inversion, Logistic, Tabulated };

const char *to_string(Command c);
const char *to_string(Estimator e);
const char *to_string(Model m);
Command parse_command(const std::string &s);
Estimator parse_estimator(const std::string &s);
Model parse_model(const std::string &s);

/// Rejected configuration; maps to exit code 2.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

/// "v" (single value), "a,b,c" (list) or "start:stop:step" (inclusive
/// range; the end point is kept when it lies within step * 1e-9).
std::vector<double> parse_grid(const std::string &spec);

/// Which physical problem a model poses.
enum class Problem { Spin, Barrier, Oscillator };

struct RunConfig {
    Command command = Command::SpinFlip;
    Model model = Model::RosenZener;
    /// Grid specification per parameter name, as given by the user.
    std::map<std::string, std::string> params;
    std::vector<Estimator> estimators;
    QuadratureSpec quadrature;
    QuadratureSpec stepper = default_oracle_control();
    StepperScheme scheme = StepperScheme::ExponentialMidpoint;
    double validity_threshold = 0.3;
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> sidecar;
    std::optional<std::filesystem::path> output;
    std::optional<std::filesystem::path> manifest;
    std::optional<std::filesystem::path> matrix_output;
    int n_max = 10;
    int threads = 0;

    /// The problem type implied by command, model and tabulated axis name.
    Problem problem() const;
    /// Parameter names of the model in declaration order.
    std::vector<std::string> parameter_names() const;
    /// Expanded grid per parameter, defaults filled in.
    std::vector<std::pair<std::string, std::vector<double>>> axes() const;
    /// Throws ConfigError when any invariant fails.
    void validate() const;
    nlohmann::json to_json() const;
};

/// Merges a JSON config object into `base` (used before command-line
/// flags are applied, so flags win).
RunConfig merge_json(RunConfig base, const nlohmann::json &j);

/// Parses argv (subcommand first). Throws ConfigError on bad usage; returns
/// std::nullopt after printing help.
std::optional<RunConfig> parse_command_line(int argc, const char *const *argv);

struct Cell {
    double probability = 0.0;
    double amplitude = 0.0;
    double error = 0.0;
    bool valid = true;
    /// "ok", "out-of-regime", "nonconverged" or "failed".
    std::string status = "ok";
};

struct SweepTable {
    std::vector<std::string> axis_names;
    std::vector<Estimator> estimators;
    /// One entry per grid point, first axis slowest.
    std::vector<std::vector<double>> points;
    std::vector<std::vector<Cell>> cells;

    std::size_t rows() const { return points.size(); }
    bool all_converged() const;
};

/// Evaluates every estimator at every grid point using `threads` workers
/// (0 = NATRANS_THREADS or the hardware concurrency). An empty estimator
/// list selects the defaults for the model. Failures become NaN
/// cells with a status; the sweep itself never throws for them.
SweepTable run_sweep(const RunConfig &config);

/// Worker count: NATRANS_THREADS when set, else `requested`, else the
/// hardware concurrency.
int resolve_threads(int requested);

/// CSV with axes then estimator columns, 17 significant digits, LF endings.
void emit_figure_data(const SweepTable &table, const std::filesystem::path &path);
std::string format_csv(const SweepTable &table);

/// {"version", "config", "wall_seconds"}.
void write_manifest(const RunConfig &config, double wall_seconds,
                    const std::filesystem::path &path);

/// W_mn as CSV with columns m,n,probability.
void write_matrix(const TransitionMatrixSlice &w, const std::filesystem::path &path);

/// Executes a validated config; returns the process exit code.
int run(const RunConfig &config);

/// Full entry point: parses, runs and maps exceptions to exit codes.
int main_entry(int argc, const char *const *argv);

} // namespace natrans::cli
