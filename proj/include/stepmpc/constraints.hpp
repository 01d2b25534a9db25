#pragma once

#include <span>
#include <string>
#include <vector>

#include "stepmpc/schedule.hpp"

namespace stepmpc {

/// Intervention burden limits over one window of `window_len` steps:
/// at most `alpha` messages in total, at most one message of any type in
/// every run of `spacing_steps` consecutive steps, and composite cost at
/// most `beta`.
struct BurdenConstraints {
    int alpha = 0;
    double beta = 0.0;
    int spacing_steps = 2;
    int window_len = 0;
};

/// Per-step composite message costs c = c_time * c_step. c_time is a
/// nonincreasing ramp (cheaper later in the day), c_step is the normalized
/// temporal activity pattern (expensive when the person is usually active).
struct CostProfile {
    std::vector<double> c_time;
    std::vector<double> c_step;
    std::vector<double> c;
};

/// Expands per-hour mean step counts to per-step resolution, normalizes by
/// the maximum (all-zero input stays all-zero), and multiplies by a linear
/// time-of-day ramp from `ramp_start` down to `ramp_end`.
/// Requires hourly.size() * steps_per_hour == window_len.
CostProfile build_cost_profile(std::span<const double> hourly_step_averages,
                               int window_len, int steps_per_hour,
                               double ramp_start = 1.0, double ramp_end = 0.2);

struct Violation {
    std::string rule;  // "spacing" | "count" | "budget" | "shape"
    int step = -1;     // 0-based window step where the rule first breaks
    std::string detail;
};

/// Checks the full window: `past` holds the realized rows 0..k*-1 and
/// `future` the planned rows k*..T-1; together they must have
/// cons.window_len rows. Returns an empty list iff spacing, count and
/// budget all hold.
std::vector<Violation> is_feasible(const Schedule& future, const Schedule& past,
                                   const BurdenConstraints& cons,
                                   const CostProfile& costs);

struct RemainingBudget {
    int messages_left = 0;
    double cost_left = 0.0;
    int blocked_until = 0;  // first step index at which a message is allowed
};

/// What the realized prefix leaves for the rest of the window. Throws if
/// the prefix itself is infeasible.
RemainingBudget remaining_budget(const Schedule& past, const BurdenConstraints& cons,
                                 const CostProfile& costs);

/// Raw consumption of a realized prefix, accumulated in window order so the
/// solver's running totals round exactly like is_feasible's.
struct PastConsumption {
    int sent = 0;
    double spent = 0.0;
    int last_message_step = -1;  // -1 when no message was sent
};
PastConsumption past_consumption(const Schedule& past, const CostProfile& costs);

/// Default budget when a config does not set beta: 0.6 * alpha * max_k c_k.
double default_beta(int alpha, const CostProfile& costs);

}  // namespace stepmpc
