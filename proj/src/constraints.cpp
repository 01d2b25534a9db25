#include "stepmpc/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stepmpc {

CostProfile build_cost_profile(std::span<const double> hourly_step_averages,
                               int window_len, int steps_per_hour,
                               double ramp_start, double ramp_end) {
    if (window_len < 0 || steps_per_hour < 1)
        throw std::invalid_argument("build_cost_profile: bad window dimensions");
    if (static_cast<int>(hourly_step_averages.size()) * steps_per_hour != window_len)
        throw std::invalid_argument(
            "build_cost_profile: hourly averages do not cover the window");
    if (!(ramp_end > 0.0) || ramp_end > ramp_start || ramp_start > 1.0)
        throw std::invalid_argument("build_cost_profile: ramp must satisfy 0 < end <= start <= 1");
    for (double h : hourly_step_averages)
        if (!(h >= 0.0) || !std::isfinite(h))
            throw std::invalid_argument("build_cost_profile: hourly averages must be >= 0");

    CostProfile p;
    p.c_time.resize(window_len);
    p.c_step.resize(window_len);
    p.c.resize(window_len);

    double max_avg = 0.0;
    for (double h : hourly_step_averages) max_avg = std::max(max_avg, h);

    for (int k = 0; k < window_len; ++k) {
        p.c_time[k] = window_len == 1
                          ? ramp_start
                          : ramp_start - (ramp_start - ramp_end) *
                                             (static_cast<double>(k) / (window_len - 1));
        const double avg = hourly_step_averages[k / steps_per_hour];
        p.c_step[k] = max_avg > 0.0 ? avg / max_avg : 0.0;
        p.c[k] = p.c_time[k] * p.c_step[k];
    }
    return p;
}

std::vector<Violation> is_feasible(const Schedule& future, const Schedule& past,
                                   const BurdenConstraints& cons,
                                   const CostProfile& costs) {
    std::vector<Violation> out;
    if (past.steps + future.steps != cons.window_len ||
        static_cast<int>(costs.c.size()) != cons.window_len ||
        (past.steps > 0 && future.steps > 0 && past.channels != future.channels)) {
        out.push_back({"shape", -1, "past/future/costs do not partition the window"});
        return out;
    }
    const int T = cons.window_len;
    const int m = std::max(past.channels, future.channels);

    auto row_total = [&](int k) {
        int t = 0;
        for (int j = 0; j < m; ++j)
            t += k < past.steps ? past.at(k, j) : future.at(k - past.steps, j);
        return t;
    };

    // Spacing: no run of spacing_steps consecutive steps holds 2+ messages.
    // Equivalent to: consecutive messages at least spacing_steps apart.
    int last_msg = -cons.window_len - cons.spacing_steps;  // sentinel, far in the past
    for (int k = 0; k < T; ++k) {
        const int t = row_total(k);
        if (t > 1) {
            out.push_back({"spacing", k, "more than one message at a single step"});
        }
        if (t >= 1) {
            if (k - last_msg < cons.spacing_steps && last_msg >= 0)
                out.push_back({"spacing", k,
                               "message within " + std::to_string(cons.spacing_steps) +
                                   " steps of step " + std::to_string(last_msg)});
            last_msg = k;
        }
    }

    // Count: at most alpha messages in the window; reported once, at the
    // step where the limit is first crossed.
    int sent = 0;
    bool count_reported = false;
    for (int k = 0; k < T; ++k) {
        sent += row_total(k);
        if (!count_reported && sent > cons.alpha) {
            count_reported = true;
            out.push_back({"count", k, "message count exceeds alpha = " +
                                           std::to_string(cons.alpha)});
        }
    }

    // Budget: cumulative composite cost at most beta, accumulated in window
    // order (solvers accumulate in the same order, so both sides round
    // identically).
    double spent = 0.0;
    bool over = false;
    for (int k = 0; k < T; ++k) {
        if (row_total(k) >= 1) {
            spent += costs.c[k] * row_total(k);
            if (!over && spent > cons.beta) {
                over = true;
                out.push_back({"budget", k, "cumulative cost exceeds beta"});
            }
        }
    }
    return out;
}

PastConsumption past_consumption(const Schedule& past, const CostProfile& costs) {
    PastConsumption pc;
    for (int k = 0; k < past.steps; ++k) {
        int t = 0;
        for (int j = 0; j < past.channels; ++j) t += past.at(k, j);
        if (t >= 1) {
            pc.sent += t;
            pc.spent += costs.c[k] * t;
            pc.last_message_step = k;
        }
    }
    return pc;
}

RemainingBudget remaining_budget(const Schedule& past, const BurdenConstraints& cons,
                                 const CostProfile& costs) {
    Schedule rest(cons.window_len - past.steps, past.channels);
    if (!is_feasible(rest, past, cons, costs).empty())
        throw std::invalid_argument("remaining_budget: realized prefix is infeasible");

    const PastConsumption pc = past_consumption(past, costs);
    RemainingBudget rb;
    rb.messages_left = cons.alpha - pc.sent;
    rb.cost_left = cons.beta - pc.spent;
    rb.blocked_until = pc.last_message_step < 0
                           ? past.steps
                           : std::max(past.steps, pc.last_message_step + cons.spacing_steps);
    return rb;
}

double default_beta(int alpha, const CostProfile& costs) {
    double cmax = 0.0;
    for (double x : costs.c) cmax = std::max(cmax, x);
    return 0.6 * alpha * cmax;
}

}  // namespace stepmpc
