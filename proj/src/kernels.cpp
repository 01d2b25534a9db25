#include "stepmpc/kernels.hpp"

#include <stdexcept>

#include "stepmpc/rng.hpp"

namespace stepmpc::kernels {

namespace {

// Parallel loops pay off only past a few thousand items on typical inputs.
constexpr int kParallelCutoff = 4096;

void fill_trajectory(const NoiseModel& noise, int horizon, int start_step,
                     std::uint64_t seed, NoiseTrajectory& out) {
    GaussianSampler g(seed);
    out.w.resize(horizon);
    for (int t = 0; t < horizon; ++t)
        out.w[t] = g.next(noise.mu, noise.sigma_at(start_step + t));
}

double one_base_sum(const PwaModel& model, int regime, const History& hist,
                    const NoiseTrajectory& traj) {
    const SubModel& sub = model.submodels[regime];
    History h = hist;
    const std::vector<std::uint8_t> u_zero(model.channels, 0);
    double sum = 0.0;
    for (double w : traj.w) {
        const double y = simulate_step(sub, h, u_zero, w);
        sum += y;
        h.push(y, u_zero);
    }
    return sum;
}

bool one_sim_hits_goal(const PwaModel& model, int regime, const History& hist,
                       double past_sum, const Schedule& schedule, double goal,
                       int start_step, std::uint64_t seed) {
    const SubModel& sub = model.submodels[regime];
    GaussianSampler g(seed);
    History h = hist;
    std::vector<std::uint8_t> u_now(model.channels);
    double sum = past_sum;
    for (int t = 0; t < schedule.steps; ++t) {
        for (int j = 0; j < model.channels; ++j) u_now[j] = schedule.at(t, j);
        const double w = g.next(model.noise.mu, model.noise.sigma_at(start_step + t));
        const double y = simulate_step(sub, h, u_now, w);
        sum += y;
        h.push(y, u_now);
    }
    return sum >= goal;
}

}  // namespace

int count_satisfied_serial(std::span<const double> thetas, double gain) {
    int n = 0;
    for (double th : thetas)
        if (th <= gain) ++n;
    return n;
}

int count_satisfied_parallel(std::span<const double> thetas, double gain) {
    const std::int64_t size = static_cast<std::int64_t>(thetas.size());
    int n = 0;
#pragma omp parallel for reduction(+ : n)
    for (std::int64_t i = 0; i < size; ++i)
        if (thetas[i] <= gain) ++n;
    return n;
}

int count_satisfied(std::span<const double> thetas, double gain) {
    return static_cast<int>(thetas.size()) < kParallelCutoff
               ? count_satisfied_serial(thetas, gain)
               : count_satisfied_parallel(thetas, gain);
}

std::vector<NoiseTrajectory> sample_noise_serial(const NoiseModel& noise, int horizon,
                                                 int count, std::uint64_t seed,
                                                 int start_step) {
    if (count < 1 || horizon < 0)
        throw std::invalid_argument("sample_noise: need count >= 1 and horizon >= 0");
    std::vector<NoiseTrajectory> out(count);
    for (int s = 0; s < count; ++s)
        fill_trajectory(noise, horizon, start_step, derive_seed(seed, s), out[s]);
    return out;
}

std::vector<NoiseTrajectory> sample_noise_parallel(const NoiseModel& noise, int horizon,
                                                   int count, std::uint64_t seed,
                                                   int start_step) {
    if (count < 1 || horizon < 0)
        throw std::invalid_argument("sample_noise: need count >= 1 and horizon >= 0");
    std::vector<NoiseTrajectory> out(count);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < count; ++s)
        fill_trajectory(noise, horizon, start_step, derive_seed(seed, s), out[s]);
    return out;
}

std::vector<NoiseTrajectory> sample_noise(const NoiseModel& noise, int horizon,
                                          int count, std::uint64_t seed,
                                          int start_step) {
    return count < kParallelCutoff
               ? sample_noise_serial(noise, horizon, count, seed, start_step)
               : sample_noise_parallel(noise, horizon, count, seed, start_step);
}

std::vector<double> base_sums_serial(const PwaModel& model, int regime,
                                     const History& hist,
                                     std::span<const NoiseTrajectory> noise) {
    std::vector<double> out(noise.size());
    for (std::size_t s = 0; s < noise.size(); ++s)
        out[s] = one_base_sum(model, regime, hist, noise[s]);
    return out;
}

std::vector<double> base_sums_parallel(const PwaModel& model, int regime,
                                       const History& hist,
                                       std::span<const NoiseTrajectory> noise) {
    std::vector<double> out(noise.size());
    const std::int64_t size = static_cast<std::int64_t>(noise.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < size; ++s)
        out[s] = one_base_sum(model, regime, hist, noise[s]);
    return out;
}

std::vector<double> base_sums(const PwaModel& model, int regime, const History& hist,
                              std::span<const NoiseTrajectory> noise) {
    return static_cast<int>(noise.size()) < kParallelCutoff
               ? base_sums_serial(model, regime, hist, noise)
               : base_sums_parallel(model, regime, hist, noise);
}

double mc_goal_probability_serial(const PwaModel& model, int regime,
                                  const History& hist, double past_sum,
                                  const Schedule& schedule, double goal, int n_sims,
                                  std::uint64_t seed, int start_step) {
    if (n_sims < 1) throw std::invalid_argument("mc_goal_probability: n_sims >= 1");
    int hits = 0;
    for (int i = 0; i < n_sims; ++i)
        if (one_sim_hits_goal(model, regime, hist, past_sum, schedule, goal, start_step,
                              derive_seed(seed, i)))
            ++hits;
    return static_cast<double>(hits) / n_sims;
}

double mc_goal_probability_parallel(const PwaModel& model, int regime,
                                    const History& hist, double past_sum,
                                    const Schedule& schedule, double goal, int n_sims,
                                    std::uint64_t seed, int start_step) {
    if (n_sims < 1) throw std::invalid_argument("mc_goal_probability: n_sims >= 1");
    int hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
    for (int i = 0; i < n_sims; ++i)
        if (one_sim_hits_goal(model, regime, hist, past_sum, schedule, goal, start_step,
                              derive_seed(seed, i)))
            ++hits;
    return static_cast<double>(hits) / n_sims;
}

double mc_goal_probability(const PwaModel& model, int regime, const History& hist,
                           double past_sum, const Schedule& schedule, double goal,
                           int n_sims, std::uint64_t seed, int start_step) {
    return n_sims < kParallelCutoff
               ? mc_goal_probability_serial(model, regime, hist, past_sum, schedule,
                                            goal, n_sims, seed, start_step)
               : mc_goal_probability_parallel(model, regime, hist, past_sum, schedule,
                                              goal, n_sims, seed, start_step);
}

}  // namespace stepmpc::kernels
