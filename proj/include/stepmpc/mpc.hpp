#pragma once

#include <functional>
#include <optional>
#include <span>

#include "stepmpc/solver.hpp"

namespace stepmpc {

enum class SolverKind { shared_gain_fast_path, branch_and_bound };

/// Everything fixed over one intervention window.
struct MpcConfig {
    PwaModel model;
    int regime = 0;  // sub-model active for the day
    BurdenConstraints cons;
    CostProfile costs;
    double goal = 0.0;
    /// First window step whose realized measurement counts toward the goal
    /// sum. 0 sums the whole window; a positive value drops the warm-up
    /// steps. Predictions from k* onward always count.
    int goal_sum_from = 0;
    int n_scenarios = 100;
    std::uint64_t seed = 1;
    /// Whether a (one-step) decision problem is solved at the final window
    /// step; when false the last step applies no message.
    bool decide_at_terminal = true;
    SolverKind solver = SolverKind::shared_gain_fast_path;
    bool record_thetas = false;  // keep per-scenario thresholds in the log
};

/// Rolling controller state. Between calls, rows 0..k_star-1 of
/// `realized_u` and entries 0..k_star-1 of `realized_y` are filled.
struct MpcState {
    int k_star = 0;
    std::vector<double> realized_y;
    Schedule realized_u;  // window_len rows, future rows all zero

    Schedule realized_prefix() const;  // the first k_star rows
};

MpcState initial_state(const MpcConfig& config);

struct StepResult {
    int decision = 0;  // 0 = none, 1..m = message type applied at k*
    double prob_estimate = 0.0;
    double zero_plan_prob = 0.0;  // scenarios satisfied by the empty plan
    Schedule planned_tail;        // solved schedule over k*..T-1
    long node_count = 0;
    std::vector<double> thetas;  // filled when config.record_thetas
};

/// One iteration of the shrinking-horizon loop at step k*: sample N fresh
/// noise trajectories over k*..T-1 (seeded from (config.seed, k*)), reduce,
/// solve, and apply the first column of the optimal schedule. The solve
/// uses measurements through k*-1; `measurement` is the output realized at
/// k* itself and is ingested afterwards. When absent, the model's
/// conditional mean under the applied input stands in so the lag structure
/// stays aligned.
StepResult mpc_step(const MpcConfig& config, MpcState& state,
                    std::optional<double> measurement);

struct StepRecord {
    int step = 0;
    double measurement = 0.0;
    int message_type = 0;
    double prob_estimate = 0.0;
    double zero_plan_prob = 0.0;
    long node_count = 0;
    int messages_used = 0;   // cumulative through this step
    double cost_used = 0.0;  // cumulative through this step
    Schedule planned_tail;
    std::vector<double> thetas;
};

struct RunLog {
    std::vector<StepRecord> steps;
    double total_measured = 0.0;
    int total_messages = 0;
    std::vector<int> messages_by_type;
    double total_cost = 0.0;
    double final_prob_estimate = 0.0;
};

/// Mean of the daily window totals plus an increment (default 500 steps).
double compute_goal(std::span<const double> daily_window_totals,
                    double increment = 500.0);

using MeasurementSource = std::function<double(int step)>;

/// Runs the full window: one mpc_step per step, one measurement drawn per
/// step. The log has exactly window_len entries.
RunLog run_window(const MpcConfig& config, const MeasurementSource& measurements);

}  // namespace stepmpc
