#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stepmpc/kernels.hpp"
#include "stepmpc/pwa_model.hpp"
#include "stepmpc/schedule.hpp"

namespace stepmpc {

/// The per-step decision problem after exploiting affinity: the window sum
/// under schedule u and scenario s is base_s + sum_k sum_j g[k][j]*u[k][j],
/// so scenario s meets the goal iff the schedule's total gain reaches
/// thetas[s]. The gains are shared across scenarios.
struct ReducedProblem {
    int k_star = 0;   // first future step (0-based window index)
    int horizon = 0;  // number of future steps
    int channels = 0;
    std::vector<double> gains;   // row-major horizon x channels
    std::vector<double> thetas;  // one threshold per scenario

    double gain_at(int k, int j) const {
        return gains[static_cast<std::size_t>(k) * channels + j];
    }
    int scenario_count() const { return static_cast<int>(thetas.size()); }

    /// Total gain of a schedule over the horizon, accumulated row-major.
    double total_gain(const Schedule& schedule) const;
};

/// Translation-invariant gain machinery for one (sub-model, window length)
/// pair: one impulse-response pass serves every position and every shorter
/// horizon of the shrinking loop.
struct GainTable {
    int channels = 0;
    std::vector<double> impulse;       // h[t], AR response to a unit output bump
    std::vector<double> noise_weight;  // W[r] = sum_{t<=r} h[t]
    std::vector<double> cum_gain;      // row-major: cum_gain[r*m+j] = total effect
                                       // on the remaining sum of message j with
                                       // r later steps in the window
};

GainTable build_gain_table(const PwaModel& model, int regime, int max_horizon);

/// g[k][j] = total effect on the window sum of setting u^j at horizon
/// position k (0 = first future step), row-major horizon x channels.
std::vector<double> compute_gains(const PwaModel& model, int regime, int horizon);

/// N independent noise trajectories, deterministic per seed (delegates to
/// the sampling kernel).
std::vector<NoiseTrajectory> sample_noise(const NoiseModel& noise, int horizon,
                                          int count, std::uint64_t seed,
                                          int start_step = 0);

/// Collapses each scenario to a threshold: thetas[s] = goal - past_sum -
/// base_s, with base_s the zero-input predicted sum under noise[s].
ReducedProblem reduce(const PwaModel& model, int regime, const History& hist,
                      double past_outputs_sum, std::span<const NoiseTrajectory> noise,
                      double goal, int k_star);

/// Exact goal probability for a fixed schedule under constant Gaussian
/// noise: the window sum is Gaussian with mean from the deterministic
/// simulation and variance sigma^2 * sum of squared cumulative impulse
/// responses. With a per-step sigma list this closed form is not offered;
/// the estimate falls back to Monte Carlo (mc_sims draws, seeded).
double analytic_probability(const PwaModel& model, int regime, const History& hist,
                            double past_outputs_sum, const Schedule& schedule,
                            double goal, int start_step = 0, int mc_sims = 200000,
                            std::uint64_t mc_seed = 0x616e616c79746963ull);

}  // namespace stepmpc
