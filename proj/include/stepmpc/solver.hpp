#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stepmpc/constraints.hpp"
#include "stepmpc/scenario.hpp"

namespace stepmpc {

/// The per-step stochastic mixed-integer program in reduced form, plus the
/// big-M constants that make the scenario indicators linear:
///   maximize (1/N) sum_s p_s
///   s.t.     total_gain(u) - thetas[s] >= big_m[s] * (p_s - 1)
///            u feasible under cons/costs given the realized prefix.
/// big_m[s] is large enough that p_s = 0 deactivates constraint s for
/// every feasible schedule.
struct MilpProblem {
    ReducedProblem reduced;
    BurdenConstraints cons;
    CostProfile costs;           // full window, cons.window_len entries
    int messages_used = 0;       // consumed by the realized prefix
    double cost_used = 0.0;
    int last_message_step = -1;  // absolute window step, -1 when none
    std::vector<double> big_m;
};

/// Computes big_m[s] = max(1, thetas[s] - L) where L is the box-relaxation
/// minimum of the total gain (sum of the negative gain entries). `past`
/// must hold the realized rows 0..k_star-1 and be feasible.
MilpProblem formulate_big_m(ReducedProblem reduced, const BurdenConstraints& cons,
                            CostProfile costs, const Schedule& past = Schedule{});

/// A solved schedule over the remaining horizon. message_count and
/// total_cost refer to the returned (future) schedule only.
struct Solution {
    Schedule schedule;
    int satisfied_count = 0;
    double objective = 0.0;  // satisfied_count / N
    int message_count = 0;
    double total_cost = 0.0;
    long node_count = 0;
};

/// True when `a` beats `b` under the tie-break order: more scenarios
/// satisfied, then fewer messages, then lower cost, then lexicographically
/// earlier schedule (row-major).
bool solution_better(const Solution& a, const Solution& b);

/// Exact depth-first branch-and-bound over the per-step choices
/// {none, type 1..m}. The bound counts a scenario as satisfiable iff its
/// threshold is within the current gain plus an optimistic completion
/// (top remaining positive gains under the count and spacing caps).
Solution solve_branch_and_bound(const MilpProblem& problem);

/// Exploits that the gains are shared across scenarios: the satisfied
/// count is nondecreasing in the schedule's total gain, so phase 1
/// maximizes the gain, phase 2 minimizes burden among schedules that reach
/// the resulting count. Returns the same schedule as
/// solve_branch_and_bound.
Solution solve_shared_gain_fast_path(const MilpProblem& problem);

/// Exhaustive enumeration with the same tie-breaking; testing oracle.
/// Refuses instances with (m+1)^horizon > 1e7.
Solution brute_force_oracle(const MilpProblem& problem);

}  // namespace stepmpc
