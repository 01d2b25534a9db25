#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "stepmpc/solver.hpp"
#include "test_util.hpp"

using namespace stepmpc;
using namespace stepmpc::test;

namespace {

/// Hand-built problem: `gains` row-major over horizon x channels.
MilpProblem make_problem(int horizon, int channels, std::vector<double> gains,
                         std::vector<double> thetas, int alpha, double beta,
                         int spacing = 2, std::vector<double> costs = {}) {
    ReducedProblem red;
    red.k_star = 0;
    red.horizon = horizon;
    red.channels = channels;
    red.gains = std::move(gains);
    red.thetas = std::move(thetas);
    BurdenConstraints cons{.alpha = alpha, .beta = beta, .spacing_steps = spacing,
                           .window_len = horizon};
    CostProfile profile;
    profile.c = costs.empty() ? std::vector<double>(horizon, 0.0) : std::move(costs);
    profile.c_time.assign(horizon, 1.0);
    profile.c_step.assign(horizon, 1.0);
    return formulate_big_m(std::move(red), cons, std::move(profile),
                           Schedule(0, channels));
}

}  // namespace

TEST_CASE("formulate_big_m: box-relaxation constants") {
    SUBCASE("all gains nonnegative") {
        const auto p = make_problem(2, 1, {3.0, 7.0}, {50.0}, 2, 10.0);
        CHECK(p.big_m[0] == doctest::Approx(50.0).epsilon(1e-12));
    }
    SUBCASE("threshold below the box minimum floors at 1") {
        const auto p = make_problem(2, 1, {3.0, 7.0}, {-25.0}, 2, 10.0);
        CHECK(p.big_m[0] == 1.0);
    }
    SUBCASE("published final-step gains") {
        const auto p = make_problem(1, 3, {-20.418, 2.383, -14.345}, {10.0}, 1, 10.0);
        // L = -20.418 - 14.345 = -34.763
        CHECK(p.big_m[0] == doctest::Approx(44.763).epsilon(1e-12));
    }
}

TEST_CASE("trivial optima") {
    SUBCASE("single satisfied scenario keeps the schedule empty") {
        const auto p = make_problem(3, 2, std::vector<double>(6, 5.0), {-2.0}, 2, 10.0);
        for (const auto solve :
             {solve_branch_and_bound, solve_shared_gain_fast_path, brute_force_oracle}) {
            const Solution s = solve(p);
            CHECK(s.satisfied_count == 1);
            CHECK(s.objective == 1.0);
            CHECK(s.message_count == 0);
            CHECK(s.schedule == Schedule(3, 2));
        }
    }
    SUBCASE("unreachable thresholds give the empty schedule at objective 0") {
        const auto p =
            make_problem(3, 2, std::vector<double>(6, 5.0), {1e6, 2e6}, 2, 10.0);
        for (const auto solve :
             {solve_branch_and_bound, solve_shared_gain_fast_path, brute_force_oracle}) {
            const Solution s = solve(p);
            CHECK(s.satisfied_count == 0);
            CHECK(s.objective == 0.0);
            CHECK(s.message_count == 0);
        }
    }
    SUBCASE("all gains negative: empty schedule is gain-optimal") {
        const auto p = make_problem(2, 2, {-1.0, -2.0, -3.0, -4.0}, {-5.0, 3.0}, 2, 10.0);
        const Solution s = solve_shared_gain_fast_path(p);
        CHECK(s.message_count == 0);
        CHECK(s.satisfied_count == 1);
    }
}

TEST_CASE("single-step decision with the published gains") {
    // Four candidates: none, type 1..3. Sending type 2 (+2.383) helps only
    // when a threshold sits in (0, 2.383].
    SUBCASE("threshold within reach of type 2") {
        const auto p = make_problem(1, 3, {-20.418, 2.383, -14.345},
                                    {-100.0, 1.5, 300.0}, 1, 10.0);
        const Solution s = solve_shared_gain_fast_path(p);
        CHECK(s.satisfied_count == 2);
        CHECK(s.schedule.at(0, 1) == 1);
        CHECK(s.message_count == 1);
        const Solution b = solve_branch_and_bound(p);
        CHECK(b.satisfied_count == 2);
        CHECK(b.schedule == s.schedule);
    }
    SUBCASE("no threshold in reach: stay silent") {
        const auto p = make_problem(1, 3, {-20.418, 2.383, -14.345},
                                    {-100.0, 2.5, 300.0}, 1, 10.0);
        const Solution s = solve_shared_gain_fast_path(p);
        CHECK(s.satisfied_count == 1);
        CHECK(s.message_count == 0);
    }
}

TEST_CASE("brute force edges") {
    SUBCASE("horizon 0 counts the already-satisfied scenarios") {
        const auto p = make_problem(0, 2, {}, {-1.0, 0.0, 2.0}, 0, 1.0);
        const Solution s = brute_force_oracle(p);
        CHECK(s.satisfied_count == 2);  // theta <= 0
        CHECK(s.schedule.steps == 0);
    }
    SUBCASE("horizon 1, m = 3 enumerates exactly 4 schedules") {
        const auto p = make_problem(1, 3, {1.0, 2.0, 3.0}, {2.5}, 1, 10.0);
        const Solution s = brute_force_oracle(p);
        CHECK(s.node_count == 4);
        CHECK(s.satisfied_count == 1);
        CHECK(s.schedule.at(0, 2) == 1);
    }
    SUBCASE("guard rejects oversized instances") {
        ReducedProblem red;
        red.k_star = 0;
        red.horizon = 30;
        red.channels = 3;
        red.gains.assign(90, 1.0);
        red.thetas = {1.0};
        BurdenConstraints cons{.alpha = 1, .beta = 1.0, .spacing_steps = 2,
                               .window_len = 30};
        CostProfile costs;
        costs.c.assign(30, 0.0);
        const auto p = formulate_big_m(std::move(red), cons, std::move(costs),
                                       Schedule(0, 3));
        CHECK_THROWS_AS(brute_force_oracle(p), std::invalid_argument);
    }
}

TEST_CASE("random instances: both solvers match the oracle") {
    for (std::uint64_t seed = 1; seed <= 80; ++seed) {
        const TestInstance inst = random_milp_instance(seed);
        const Solution oracle = brute_force_oracle(inst.problem);
        const Solution bb = solve_branch_and_bound(inst.problem);
        const Solution fp = solve_shared_gain_fast_path(inst.problem);
        CAPTURE(seed);
        CHECK(bb.satisfied_count == oracle.satisfied_count);
        CHECK(fp.satisfied_count == oracle.satisfied_count);
        // The tie-break order is total, so the schedules agree exactly.
        CHECK(bb.schedule == oracle.schedule);
        CHECK(fp.schedule == oracle.schedule);
        CHECK(bb.message_count == oracle.message_count);
        CHECK(bb.total_cost == oracle.total_cost);
        CHECK(bb.objective ==
              static_cast<double>(bb.satisfied_count) / inst.problem.reduced.thetas.size());
    }
}

TEST_CASE("returned schedules are feasible and recounted post hoc") {
    for (std::uint64_t seed = 100; seed <= 130; ++seed) {
        const TestInstance inst = random_milp_instance(seed);
        const Solution s = solve_shared_gain_fast_path(inst.problem);
        CHECK(is_feasible(s.schedule, inst.past, inst.problem.cons, inst.problem.costs)
                  .empty());
        const double gain = inst.problem.reduced.total_gain(s.schedule);
        int recount = 0;
        for (double th : inst.problem.reduced.thetas)
            if (th <= gain) ++recount;
        CHECK(recount == s.satisfied_count);
    }
}

TEST_CASE("big-M validity: no feasible schedule is cut when p_s = 0") {
    for (std::uint64_t seed = 200; seed <= 240; ++seed) {
        const TestInstance inst = random_milp_instance(seed);
        const MilpProblem& p = inst.problem;
        enumerate_schedules(p.reduced.horizon, p.reduced.channels,
                            [&](const Schedule& s) {
            if (!is_feasible(s, inst.past, p.cons, p.costs).empty()) return;
            const double gain = p.reduced.total_gain(s);
            for (std::size_t i = 0; i < p.reduced.thetas.size(); ++i)
                CHECK(gain - p.reduced.thetas[i] >= -p.big_m[i]);
        });
    }
}

TEST_CASE("big-M MILP optimum equals the reduced-form optimum") {
    for (std::uint64_t seed = 300; seed <= 330; ++seed) {
        const TestInstance inst = random_milp_instance(seed);
        const MilpOracleResult oracle =
            milp_enumeration_oracle(inst.problem, inst.past);
        CHECK(oracle.big_m_valid);
        const Solution s = solve_branch_and_bound(inst.problem);
        CHECK(oracle.best_count == s.satisfied_count);
    }
}

TEST_CASE("saturation tie-break: empty plan optimal means zero messages") {
    int constructed = 0;
    for (std::uint64_t seed = 400; constructed < 25 && seed < 600; ++seed) {
        RandomInstanceOptions opt;
        opt.max_horizon = 6;
        const TestInstance inst = random_milp_instance(seed, opt);
        // Count what the empty schedule achieves, then check whether any
        // schedule beats it (exhaustively).
        const MilpProblem& p = inst.problem;
        int zero_count = 0;
        for (double th : p.reduced.thetas)
            if (th <= 0.0) ++zero_count;
        int best = -1;
        enumerate_schedules(p.reduced.horizon, p.reduced.channels,
                            [&](const Schedule& s) {
            if (!is_feasible(s, inst.past, p.cons, p.costs).empty()) return;
            const double gain = p.reduced.total_gain(s);
            int cnt = 0;
            for (double th : p.reduced.thetas)
                if (th <= gain) ++cnt;
            best = std::max(best, cnt);
        });
        if (best != zero_count) continue;
        ++constructed;
        for (const auto solve :
             {solve_branch_and_bound, solve_shared_gain_fast_path, brute_force_oracle}) {
            const Solution s = solve(p);
            CHECK(s.message_count == 0);
            CHECK(s.satisfied_count == zero_count);
        }
    }
    CHECK(constructed == 25);
}

TEST_CASE("scale invariance: scaling gains and thetas leaves the schedule") {
    for (std::uint64_t seed = 700; seed <= 720; ++seed) {
        const TestInstance inst = random_milp_instance(seed);
        const Solution base = solve_shared_gain_fast_path(inst.problem);
        for (const double lambda : {2.0, 0.25}) {
            MilpProblem scaled = inst.problem;
            for (auto& g : scaled.reduced.gains) g *= lambda;
            for (auto& th : scaled.reduced.thetas) th *= lambda;
            for (auto& m : scaled.big_m) m = std::max(1.0, m * lambda);
            const Solution s = solve_shared_gain_fast_path(scaled);
            CHECK(s.schedule == base.schedule);
            CHECK(s.satisfied_count == base.satisfied_count);
        }
    }
}

TEST_CASE("determinism: repeated solves are bit-identical") {
    const TestInstance inst = random_milp_instance(4242);
    const Solution a = solve_shared_gain_fast_path(inst.problem);
    const Solution b = solve_shared_gain_fast_path(inst.problem);
    CHECK(a.schedule == b.schedule);
    CHECK(a.satisfied_count == b.satisfied_count);
    CHECK(a.node_count == b.node_count);
    CHECK(a.total_cost == b.total_cost);
}

TEST_CASE("solver rejects malformed problems") {
    auto p = make_problem(2, 1, {1.0, 2.0}, {0.5}, 1, 1.0);
    SUBCASE("big_m size mismatch") {
        p.big_m.push_back(1.0);
        CHECK_THROWS_AS(solve_branch_and_bound(p), std::invalid_argument);
    }
    SUBCASE("gain size mismatch") {
        p.reduced.gains.pop_back();
        CHECK_THROWS_AS(solve_branch_and_bound(p), std::invalid_argument);
    }
    SUBCASE("no scenarios") {
        p.reduced.thetas.clear();
        p.big_m.clear();
        CHECK_THROWS_AS(solve_shared_gain_fast_path(p), std::invalid_argument);
    }
}
