#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stepmpc/pwa_model.hpp"
#include "stepmpc/schedule.hpp"

namespace stepmpc {

/// One sampled process-noise trajectory over the remaining horizon.
struct NoiseTrajectory {
    std::vector<double> w;
};

/// Data-parallel inner loops, each in a serial reference version and an
/// OpenMP version. The parallel versions are bit-identical to the serial
/// ones by construction: every work item (scenario, trajectory,
/// simulation) is computed by the same serial code and written to its own
/// slot, and the only cross-item reductions are integer counts.
/// tools/bench_kernels compares the two.
namespace kernels {

/// |{s : thetas[s] <= gain}|.
int count_satisfied_serial(std::span<const double> thetas, double gain);
int count_satisfied_parallel(std::span<const double> thetas, double gain);
int count_satisfied(std::span<const double> thetas, double gain);

/// `count` i.i.d. Gaussian trajectories of length `horizon`. Trajectory s
/// draws from its own engine seeded with derive_seed(seed, s), so results
/// do not depend on thread count. `start_step` offsets into a per-step
/// sigma list when the noise model carries one.
std::vector<NoiseTrajectory> sample_noise_serial(const NoiseModel& noise, int horizon,
                                                 int count, std::uint64_t seed,
                                                 int start_step = 0);
std::vector<NoiseTrajectory> sample_noise_parallel(const NoiseModel& noise, int horizon,
                                                   int count, std::uint64_t seed,
                                                   int start_step = 0);
std::vector<NoiseTrajectory> sample_noise(const NoiseModel& noise, int horizon,
                                          int count, std::uint64_t seed,
                                          int start_step = 0);

/// Per-scenario zero-input predicted window sums: entry s is
/// sum(simulate_trajectory(model, regime, hist, zero schedule, noise[s])).
std::vector<double> base_sums_serial(const PwaModel& model, int regime,
                                     const History& hist,
                                     std::span<const NoiseTrajectory> noise);
std::vector<double> base_sums_parallel(const PwaModel& model, int regime,
                                       const History& hist,
                                       std::span<const NoiseTrajectory> noise);
std::vector<double> base_sums(const PwaModel& model, int regime, const History& hist,
                              std::span<const NoiseTrajectory> noise);

/// Monte Carlo estimate of P(past_sum + window sum under `schedule` >= goal),
/// sampling fresh noise per simulation. Simulation i uses
/// derive_seed(seed, i); the satisfied tally is an integer reduction.
double mc_goal_probability_serial(const PwaModel& model, int regime,
                                  const History& hist, double past_sum,
                                  const Schedule& schedule, double goal, int n_sims,
                                  std::uint64_t seed, int start_step = 0);
double mc_goal_probability_parallel(const PwaModel& model, int regime,
                                    const History& hist, double past_sum,
                                    const Schedule& schedule, double goal, int n_sims,
                                    std::uint64_t seed, int start_step = 0);
double mc_goal_probability(const PwaModel& model, int regime, const History& hist,
                           double past_sum, const Schedule& schedule, double goal,
                           int n_sims, std::uint64_t seed, int start_step = 0);

}  // namespace kernels
}  // namespace stepmpc
