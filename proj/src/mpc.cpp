#include "stepmpc/mpc.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stepmpc/kernels.hpp"
#include "stepmpc/rng.hpp"

namespace stepmpc {

namespace {

void validate_config(const MpcConfig& config) {
    const auto model_report = validate_model(config.model);
    if (!model_report.empty())
        throw std::invalid_argument("mpc: invalid model: " + model_report.front());
    if (config.regime < 0 ||
        config.regime >= static_cast<int>(config.model.submodels.size()))
        throw std::invalid_argument("mpc: regime out of range");
    if (config.n_scenarios < 1)
        throw std::invalid_argument("mpc: n_scenarios must be >= 1");
    if (!std::isfinite(config.goal)) throw std::invalid_argument("mpc: goal not finite");
    if (config.cons.window_len < 0)
        throw std::invalid_argument("mpc: negative window length");
    if (config.cons.alpha > config.cons.window_len)
        throw std::invalid_argument("mpc: alpha exceeds window length");
    if (config.cons.spacing_steps < 1)
        throw std::invalid_argument("mpc: spacing_steps must be >= 1");
    if (static_cast<int>(config.costs.c.size()) != config.cons.window_len)
        throw std::invalid_argument("mpc: cost profile does not cover the window");
    if (config.goal_sum_from < 0 || config.goal_sum_from > config.cons.window_len)
        throw std::invalid_argument("mpc: goal_sum_from outside the window");
}

/// Lag window ending just before k*: realized values where available,
/// zeros before the window start.
History history_at(const MpcConfig& config, const MpcState& state) {
    const int n = config.model.order;
    const int m = config.model.channels;
    History h = History::zeros(n, m);
    for (int i = 0; i < n; ++i) {
        const int k = state.k_star - 1 - i;
        if (k < 0) break;
        h.y_past[i] = state.realized_y[k];
        for (int j = 0; j < m; ++j) h.u_past[j][i] = state.realized_u.at(k, j);
    }
    return h;
}

}  // namespace

Schedule MpcState::realized_prefix() const {
    Schedule prefix(k_star, realized_u.channels);
    for (int k = 0; k < k_star; ++k)
        for (int j = 0; j < realized_u.channels; ++j)
            prefix.at(k, j) = realized_u.at(k, j);
    return prefix;
}

MpcState initial_state(const MpcConfig& config) {
    MpcState state;
    state.k_star = 0;
    state.realized_u = Schedule(config.cons.window_len, config.model.channels);
    state.realized_y.reserve(config.cons.window_len);
    return state;
}

double compute_goal(std::span<const double> daily_window_totals, double increment) {
    if (daily_window_totals.empty())
        throw std::invalid_argument("compute_goal: empty history");
    const double sum =
        std::accumulate(daily_window_totals.begin(), daily_window_totals.end(), 0.0);
    return sum / static_cast<double>(daily_window_totals.size()) + increment;
}

StepResult mpc_step(const MpcConfig& config, MpcState& state,
                    std::optional<double> measurement) {
    validate_config(config);
    const int T = config.cons.window_len;
    if (state.k_star >= T) throw std::invalid_argument("mpc_step: window exhausted");
    const int k_star = state.k_star;
    const int horizon = T - k_star;
    const int m = config.model.channels;

    const History hist = history_at(config, state);
    double past_sum = 0.0;
    for (int k = config.goal_sum_from; k < k_star; ++k)
        past_sum += state.realized_y[k];

    const auto noise =
        sample_noise(config.model.noise, horizon, config.n_scenarios,
                     derive_seed(config.seed, static_cast<std::uint64_t>(k_star)),
                     k_star);
    const ReducedProblem red = reduce(config.model, config.regime, hist, past_sum,
                                      noise, config.goal, k_star);

    StepResult res;
    res.zero_plan_prob =
        static_cast<double>(kernels::count_satisfied(red.thetas, 0.0)) /
        config.n_scenarios;
    if (config.record_thetas) res.thetas = red.thetas;

    const bool terminal = horizon == 1;
    if (terminal && !config.decide_at_terminal) {
        res.decision = 0;
        res.prob_estimate = res.zero_plan_prob;
        res.planned_tail = Schedule(horizon, m);
        res.node_count = 0;
    } else {
        const MilpProblem milp = formulate_big_m(red, config.cons, config.costs,
                                                 state.realized_prefix());
        const Solution sol = config.solver == SolverKind::shared_gain_fast_path
                                 ? solve_shared_gain_fast_path(milp)
                                 : solve_branch_and_bound(milp);
        res.decision = sol.schedule.row_message_type(0);
        res.prob_estimate = sol.objective;
        res.planned_tail = sol.schedule;
        res.node_count = sol.node_count;
    }

    // Apply the first input, then ingest the measurement realized at k*.
    std::vector<std::uint8_t> u_now(m, 0);
    if (res.decision > 0) {
        u_now[res.decision - 1] = 1;
        state.realized_u.at(k_star, res.decision - 1) = 1;
    }
    double y;
    if (measurement.has_value()) {
        y = *measurement;
    } else {
        const SubModel& sub = config.model.submodels[config.regime];
        y = simulate_step(sub, hist, u_now, config.model.noise.mu);
    }
    state.realized_y.push_back(y);
    state.k_star = k_star + 1;
    return res;
}

RunLog run_window(const MpcConfig& config, const MeasurementSource& measurements) {
    validate_config(config);
    const int T = config.cons.window_len;
    MpcState state = initial_state(config);

    RunLog log;
    log.messages_by_type.assign(config.model.channels, 0);
    int messages_used = 0;
    double cost_used = 0.0;
    for (int k = 0; k < T; ++k) {
        const StepResult res = mpc_step(config, state, measurements(k));

        StepRecord rec;
        rec.step = k;
        rec.measurement = state.realized_y.back();
        rec.message_type = res.decision;
        rec.prob_estimate = res.prob_estimate;
        rec.zero_plan_prob = res.zero_plan_prob;
        rec.node_count = res.node_count;
        if (res.decision > 0) {
            ++messages_used;
            cost_used += config.costs.c[k];
            ++log.messages_by_type[res.decision - 1];
        }
        rec.messages_used = messages_used;
        rec.cost_used = cost_used;
        rec.planned_tail = res.planned_tail;
        rec.thetas = res.thetas;
        log.steps.push_back(std::move(rec));

        log.total_measured += state.realized_y.back();
    }
    log.total_messages = messages_used;
    log.total_cost = cost_used;
    log.final_prob_estimate = log.steps.empty() ? 0.0 : log.steps.back().prob_estimate;
    return log;
}

}  // namespace stepmpc
