#include "stepmpc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stepmpc {

namespace {

void validate_problem(const MilpProblem& p) {
    const ReducedProblem& red = p.reduced;
    const int expected_window = red.k_star + red.horizon;
    if (red.horizon < 0 || red.k_star < 0)
        throw std::invalid_argument("solver: negative horizon or k_star");
    if (red.scenario_count() < 1)
        throw std::invalid_argument("solver: need at least one scenario");
    if (red.gains.size() != static_cast<std::size_t>(red.horizon) * red.channels)
        throw std::invalid_argument("solver: gains size mismatch");
    if (p.big_m.size() != red.thetas.size())
        throw std::invalid_argument("solver: big_m size mismatch");
    if (p.cons.window_len != expected_window)
        throw std::invalid_argument("solver: window length mismatch");
    if (static_cast<int>(p.costs.c.size()) != p.cons.window_len)
        throw std::invalid_argument("solver: cost profile length mismatch");
    if (p.cons.alpha < 0 || p.cons.spacing_steps < 1)
        throw std::invalid_argument("solver: bad burden constraints");
    for (double g : red.gains)
        if (!std::isfinite(g)) throw std::invalid_argument("solver: non-finite gain");
    for (double th : red.thetas)
        if (!std::isfinite(th)) throw std::invalid_argument("solver: non-finite theta");
}

/// Shared search scaffolding: feasibility bookkeeping and the optimistic
/// completion bound.
class Search {
public:
    explicit Search(const MilpProblem& p)
        : p_(p), horizon_(p.reduced.horizon), channels_(p.reduced.channels) {
        sorted_thetas_ = p.reduced.thetas;
        std::sort(sorted_thetas_.begin(), sorted_thetas_.end());

        // Best positive gain available at each relative step, plus prefix
        // sums of the descending-sorted suffixes: optimistic_gain() is then
        // a table lookup.
        best_pos_.resize(horizon_);
        for (int r = 0; r < horizon_; ++r) {
            double best = 0.0;
            for (int j = 0; j < channels_; ++j)
                best = std::max(best, p.reduced.gain_at(r, j));
            best_pos_[r] = best;
        }
        suffix_top_.resize(horizon_ + 1);
        for (int r = 0; r <= horizon_; ++r) {
            std::vector<double> tail(best_pos_.begin() + r, best_pos_.end());
            std::sort(tail.begin(), tail.end(), std::greater<>());
            std::vector<double> cum(tail.size() + 1, 0.0);
            for (std::size_t i = 0; i < tail.size(); ++i) cum[i + 1] = cum[i] + tail[i];
            suffix_top_[r] = std::move(cum);
        }
        // Spacing sentinel: no prior message behaves like one far enough back.
        initial_last_abs_ = p.last_message_step < 0 ? -p.cons.spacing_steps
                                                    : p.last_message_step;
    }

    int horizon() const { return horizon_; }
    int channels() const { return channels_; }
    int initial_last_abs() const { return initial_last_abs_; }

    /// |{s : theta_s <= gain}| via the sorted thresholds.
    int count(double gain) const {
        return static_cast<int>(std::upper_bound(sorted_thetas_.begin(),
                                                 sorted_thetas_.end(), gain) -
                                sorted_thetas_.begin());
    }
    double sorted_theta(int i) const { return sorted_thetas_[i]; }

    /// Upper bound on the gain still collectable from relative step r on:
    /// the largest remaining per-step positive gains, capped by the message
    /// count left and by how many steps spacing admits.
    double optimistic_gain(int r, int msgs_total, int last_abs) const {
        const int messages_left = p_.cons.alpha - msgs_total;
        if (messages_left <= 0 || r >= horizon_) return 0.0;
        const int blocked_rel = last_abs + p_.cons.spacing_steps - p_.reduced.k_star;
        const int r0 = std::max(r, blocked_rel);
        if (r0 >= horizon_) return 0.0;
        const int span = horizon_ - r0;
        const int capacity = (span + p_.cons.spacing_steps - 1) / p_.cons.spacing_steps;
        const int take = std::min(messages_left, capacity);
        return suffix_top_[r0][take];
    }

    bool can_place(int r, int msgs_total, double cost_total, int last_abs) const {
        if (msgs_total >= p_.cons.alpha) return false;
        const int abs = p_.reduced.k_star + r;
        if (abs - last_abs < p_.cons.spacing_steps) return false;
        return cost_total + p_.costs.c[abs] <= p_.cons.beta;
    }

    double step_cost(int r) const { return p_.costs.c[p_.reduced.k_star + r]; }

    /// Canonical evaluation of a complete schedule: linear threshold scan
    /// and row-major cost sum, independent of the search bookkeeping.
    Solution evaluate(const Schedule& schedule) const {
        Solution s;
        s.schedule = schedule;
        const double gain = p_.reduced.total_gain(schedule);
        int cnt = 0;
        for (double th : p_.reduced.thetas)
            if (th <= gain) ++cnt;
        s.satisfied_count = cnt;
        s.objective = static_cast<double>(cnt) / p_.reduced.scenario_count();
        s.message_count = schedule.message_count();
        double cost = 0.0;
        for (int k = 0; k < schedule.steps; ++k)
            for (int j = 0; j < channels_; ++j)
                if (schedule.at(k, j)) cost += step_cost(k);
        s.total_cost = cost;
        return s;
    }

private:
    const MilpProblem& p_;
    int horizon_;
    int channels_;
    int initial_last_abs_;
    std::vector<double> sorted_thetas_;
    std::vector<double> best_pos_;
    std::vector<std::vector<double>> suffix_top_;
};

/// Completes the partial schedule (rows >= r are zero by the DFS invariant)
/// and updates the incumbent when strictly better.
void consider(const Search& search, const Schedule& partial, Solution& incumbent) {
    Solution cand = search.evaluate(partial);
    cand.node_count = incumbent.node_count;
    if (solution_better(cand, incumbent)) {
        cand.node_count = incumbent.node_count;
        incumbent = std::move(cand);
    }
}

class BranchAndBound {
public:
    BranchAndBound(const MilpProblem& p, const Search& search)
        : p_(p), search_(search), partial_(search.horizon(), search.channels()) {
        incumbent_ = search_.evaluate(partial_);
    }

    Solution run() {
        dfs(0, 0.0, p_.messages_used, p_.cost_used, search_.initial_last_abs());
        incumbent_.node_count = nodes_;
        return incumbent_;
    }

private:
    void dfs(int r, double gain, int msgs_total, double cost_total, int last_abs) {
        ++nodes_;
        const double bound_gain =
            gain + search_.optimistic_gain(r, msgs_total, last_abs);
        const int bound_count = search_.count(bound_gain);
        if (bound_count < incumbent_.satisfied_count) return;
        if (bound_count == incumbent_.satisfied_count) {
            const int msgs_future = msgs_total - p_.messages_used;
            if (msgs_future > incumbent_.message_count) return;
            if (msgs_future == incumbent_.message_count) {
                // The subtree cannot raise the count, and any further
                // message loses the fewest-messages tie-break; only the
                // all-none completion can still win.
                consider(search_, partial_, incumbent_);
                return;
            }
        }
        if (r == search_.horizon()) {
            consider(search_, partial_, incumbent_);
            return;
        }
        dfs(r + 1, gain, msgs_total, cost_total, last_abs);
        if (search_.can_place(r, msgs_total, cost_total, last_abs)) {
            const int abs = p_.reduced.k_star + r;
            const double cost_after = cost_total + search_.step_cost(r);
            for (int j = 0; j < search_.channels(); ++j) {
                partial_.at(r, j) = 1;
                dfs(r + 1, gain + p_.reduced.gain_at(r, j), msgs_total + 1, cost_after,
                    abs);
                partial_.at(r, j) = 0;
            }
        }
    }

    const MilpProblem& p_;
    const Search& search_;
    Schedule partial_;
    Solution incumbent_;
    long nodes_ = 0;
};

class FastPath {
public:
    FastPath(const MilpProblem& p, const Search& search)
        : p_(p), search_(search), partial_(search.horizon(), search.channels()) {}

    Solution run() {
        // Phase 1: the largest total gain any feasible schedule reaches.
        best_gain_ = 0.0;
        dfs_max_gain(0, 0.0, p_.messages_used, p_.cost_used,
                     search_.initial_last_abs());

        const int best_count = search_.count(best_gain_);
        Solution empty = search_.evaluate(partial_);
        if (best_count == 0 || search_.sorted_theta(best_count - 1) <= 0.0) {
            // The empty schedule already attains the maximal count and is
            // unbeatable on every tie-break.
            empty.node_count = nodes_;
            return empty;
        }

        // Phase 2: among schedules whose gain reaches the best_count-th
        // smallest threshold (exactly the count-optimal ones), minimize
        // messages, then cost, then the lexicographic key.
        target_ = search_.sorted_theta(best_count - 1);
        found_ = false;
        dfs_min_burden(0, 0.0, p_.messages_used, p_.cost_used,
                       search_.initial_last_abs());
        incumbent_.node_count = nodes_;
        return incumbent_;
    }

private:
    void dfs_max_gain(int r, double gain, int msgs_total, double cost_total,
                      int last_abs) {
        ++nodes_;
        if (gain > best_gain_) best_gain_ = gain;
        if (gain + search_.optimistic_gain(r, msgs_total, last_abs) <= best_gain_)
            return;
        if (r == search_.horizon()) return;
        dfs_max_gain(r + 1, gain, msgs_total, cost_total, last_abs);
        if (search_.can_place(r, msgs_total, cost_total, last_abs)) {
            const int abs = p_.reduced.k_star + r;
            const double cost_after = cost_total + search_.step_cost(r);
            for (int j = 0; j < search_.channels(); ++j) {
                // A message with non-positive gain never raises the maximum:
                // dropping it keeps the schedule feasible and the gain as high.
                if (p_.reduced.gain_at(r, j) <= 0.0) continue;
                dfs_max_gain(r + 1, gain + p_.reduced.gain_at(r, j), msgs_total + 1,
                             cost_after, abs);
            }
        }
    }

    void consider_valid(double gain) {
        if (gain < target_) return;
        Solution cand = search_.evaluate(partial_);
        if (!found_ || solution_better(cand, incumbent_)) {
            incumbent_ = std::move(cand);
            found_ = true;
        }
    }

    void dfs_min_burden(int r, double gain, int msgs_total, double cost_total,
                        int last_abs) {
        ++nodes_;
        if (gain + search_.optimistic_gain(r, msgs_total, last_abs) < target_) return;
        if (found_) {
            const int msgs_future = msgs_total - p_.messages_used;
            if (msgs_future > incumbent_.message_count) return;
            if (msgs_future == incumbent_.message_count) {
                // Any further message loses the tie-break; only stopping
                // here can compete.
                consider_valid(gain);
                return;
            }
        }
        if (r == search_.horizon()) {
            consider_valid(gain);
            return;
        }
        dfs_min_burden(r + 1, gain, msgs_total, cost_total, last_abs);
        if (search_.can_place(r, msgs_total, cost_total, last_abs)) {
            const int abs = p_.reduced.k_star + r;
            const double cost_after = cost_total + search_.step_cost(r);
            for (int j = 0; j < search_.channels(); ++j) {
                // Dropping a non-positive-gain message keeps gain >= target
                // and strictly improves the burden tie-breaks.
                if (p_.reduced.gain_at(r, j) <= 0.0) continue;
                partial_.at(r, j) = 1;
                dfs_min_burden(r + 1, gain + p_.reduced.gain_at(r, j), msgs_total + 1,
                               cost_after, abs);
                partial_.at(r, j) = 0;
            }
        }
    }

    const MilpProblem& p_;
    const Search& search_;
    Schedule partial_;
    Solution incumbent_;
    double best_gain_ = 0.0;
    double target_ = 0.0;
    bool found_ = false;
    long nodes_ = 0;
};

class BruteForce {
public:
    BruteForce(const MilpProblem& p, const Search& search)
        : p_(p), search_(search), partial_(search.horizon(), search.channels()) {}

    Solution run() {
        incumbent_ = search_.evaluate(partial_);
        evaluated_ = 0;
        enumerate(0, p_.messages_used, p_.cost_used, search_.initial_last_abs());
        incumbent_.node_count = evaluated_;
        return incumbent_;
    }

private:
    void enumerate(int r, int msgs_total, double cost_total, int last_abs) {
        if (r == search_.horizon()) {
            ++evaluated_;
            consider(search_, partial_, incumbent_);
            return;
        }
        enumerate(r + 1, msgs_total, cost_total, last_abs);
        if (search_.can_place(r, msgs_total, cost_total, last_abs)) {
            const int abs = p_.reduced.k_star + r;
            const double cost_after = cost_total + search_.step_cost(r);
            for (int j = 0; j < search_.channels(); ++j) {
                partial_.at(r, j) = 1;
                enumerate(r + 1, msgs_total + 1, cost_after, abs);
                partial_.at(r, j) = 0;
            }
        }
    }

    const MilpProblem& p_;
    const Search& search_;
    Schedule partial_;
    Solution incumbent_;
    long evaluated_ = 0;
};

}  // namespace

bool solution_better(const Solution& a, const Solution& b) {
    if (a.satisfied_count != b.satisfied_count)
        return a.satisfied_count > b.satisfied_count;
    if (a.message_count != b.message_count) return a.message_count < b.message_count;
    if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
    return std::lexicographical_compare(a.schedule.cells.begin(),
                                        a.schedule.cells.end(),
                                        b.schedule.cells.begin(),
                                        b.schedule.cells.end());
}

MilpProblem formulate_big_m(ReducedProblem reduced, const BurdenConstraints& cons,
                            CostProfile costs, const Schedule& past) {
    if (past.steps != reduced.k_star)
        throw std::invalid_argument("formulate_big_m: past does not end at k_star");

    MilpProblem p;
    p.reduced = std::move(reduced);
    p.cons = cons;
    p.costs = std::move(costs);

    if (past.steps > 0) {
        const Schedule rest(p.reduced.horizon, past.channels);
        if (!is_feasible(rest, past, p.cons, p.costs).empty())
            throw std::invalid_argument("formulate_big_m: realized prefix infeasible");
        const PastConsumption pc = past_consumption(past, p.costs);
        p.messages_used = pc.sent;
        p.cost_used = pc.spent;
        p.last_message_step = pc.last_message_step;
    }

    // L: box-relaxation minimum of the total gain. p_s = 0 must deactivate
    // scenario s for every feasible schedule, so M^s >= theta_s - min gain;
    // the floor of 1 keeps the constant positive when the goal is already
    // guaranteed.
    double box_min = 0.0;
    for (double g : p.reduced.gains) box_min += std::min(0.0, g);
    p.big_m.resize(p.reduced.thetas.size());
    for (std::size_t s = 0; s < p.reduced.thetas.size(); ++s)
        p.big_m[s] = std::max(1.0, p.reduced.thetas[s] - box_min);

    validate_problem(p);
    return p;
}

Solution solve_branch_and_bound(const MilpProblem& problem) {
    validate_problem(problem);
    const Search search(problem);
    return BranchAndBound(problem, search).run();
}

Solution solve_shared_gain_fast_path(const MilpProblem& problem) {
    validate_problem(problem);
    const Search search(problem);
    return FastPath(problem, search).run();
}

Solution brute_force_oracle(const MilpProblem& problem) {
    validate_problem(problem);
    const double leaves =
        std::pow(problem.reduced.channels + 1, problem.reduced.horizon);
    if (leaves > 1e7)
        throw std::invalid_argument("brute_force_oracle: instance too large");
    const Search search(problem);
    return BruteForce(problem, search).run();
}

}  // namespace stepmpc
