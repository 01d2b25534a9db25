#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stepmpc/mpc.hpp"

namespace stepmpc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full description of one synthetic intervention-window experiment.
/// The three presets (regular / low / high) differ only in `multiplier`.
struct ExperimentConfig {
    std::string scenario = "regular";
    double mu_window = 137.0;
    double sigma_window = 51.0;
    double multiplier = 1.0;

    std::string model_path;  // empty = built-in reference model
    DayType day_type = DayType::weekday;

    double goal = 6016.0;
    std::optional<std::string> history_path;  // daily totals CSV -> compute_goal
    double goal_increment = 500.0;
    int goal_sum_from = 0;

    int alpha = 6;
    std::optional<double> beta;  // empty = default_beta
    int spacing_steps = 2;
    double c_time_start = 1.0;
    double c_time_end = 0.2;
    std::vector<double> hourly_averages;  // empty = uniform pattern

    int n_scenarios = 100;
    std::uint64_t seed = 1;
    int window_steps = 40;
    int window_start_minutes = 9 * 60;  // 09:00
    bool decide_at_terminal = true;
    SolverKind solver = SolverKind::shared_gain_fast_path;

    std::string out_dir = "out";
    bool dump_scenarios = false;
};

/// Sets the preset fields: multiplier 1.0 / 0.3 / 1.5 for
/// regular / low / high; "custom" leaves the multiplier untouched.
void apply_preset(ExperimentConfig& config, const std::string& name);

/// Reads the JSON config file with blocks
/// {model, constraints, costs, mpc, experiment}; all blocks and fields are
/// optional and default as above. Throws ConfigError.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// i.i.d. Gaussian(multiplier * mu, sigma) draws clamped below at zero
/// (step counts are physical). Deterministic per seed.
std::vector<double> generate_measurements(double mu, double sigma, double multiplier,
                                          int steps, std::uint64_t seed);

/// Loads the model named by the config (built-in when no path is set).
/// Throws ModelError on missing/invalid files.
PwaModel load_experiment_model(const ExperimentConfig& config);

/// Assembles the controller configuration (costs, budget defaults, goal
/// from history when requested). Throws ConfigError on bad values.
MpcConfig build_mpc_config(const ExperimentConfig& config, const PwaModel& model);

/// Runs the window in-process without touching the filesystem.
RunLog simulate_experiment(const ExperimentConfig& config);

/// Runs and writes runlog.csv, prob_trace.csv, summary.json (and
/// scenarios.csv when dump_scenarios) under config.out_dir.
RunLog run_experiment(const ExperimentConfig& config);

/// One daily window total per row; a single leading non-numeric header
/// line is tolerated. Throws ConfigError.
std::vector<double> read_history_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering, used for every double written to
/// an artifact so replays are byte-identical.
std::string fmt_double(double v);

struct RunOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> scenario;
    std::optional<std::string> model_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> n_scenarios;
    std::optional<int> alpha;
    std::optional<double> beta;
    std::optional<double> goal;
    std::optional<std::string> out_dir;
    bool dump_scenarios = false;
};

/// CLI entry points. Errors go to stderr; exit codes: 0 ok, 2 config
/// error, 3 model validation failure, 4 runtime error.
int cmd_run(const RunOptions& options);
int cmd_validate(const std::string& model_path);
int cmd_goal(const std::string& history_path);

}  // namespace stepmpc
