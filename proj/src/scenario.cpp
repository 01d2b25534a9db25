#include "stepmpc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stepmpc/rng.hpp"

namespace stepmpc {

double ReducedProblem::total_gain(const Schedule& schedule) const {
    if (schedule.steps != horizon || schedule.channels != channels)
        throw std::invalid_argument("total_gain: schedule does not match horizon");
    double g = 0.0;
    for (int k = 0; k < horizon; ++k)
        for (int j = 0; j < channels; ++j)
            if (schedule.at(k, j)) g += gain_at(k, j);
    return g;
}

GainTable build_gain_table(const PwaModel& model, int regime, int max_horizon) {
    if (regime < 0 || regime >= static_cast<int>(model.submodels.size()))
        throw std::invalid_argument("build_gain_table: regime out of range");
    if (max_horizon < 0)
        throw std::invalid_argument("build_gain_table: negative horizon");

    const SubModel& sub = model.submodels[regime];
    const int n = model.order;
    const int m = model.channels;

    GainTable table;
    table.channels = m;
    table.impulse.resize(max_horizon);
    table.noise_weight.resize(max_horizon);
    table.cum_gain.resize(static_cast<std::size_t>(max_horizon) * m);

    // h[t]: response of y_{k+t} to a unit bump added to y_k.
    for (int t = 0; t < max_horizon; ++t) {
        double h = t == 0 ? 1.0 : 0.0;
        for (int i = 1; i <= std::min(t, n); ++i) h += sub.a[i - 1] * table.impulse[t - i];
        table.impulse[t] = h;
        table.noise_weight[t] = (t == 0 ? 0.0 : table.noise_weight[t - 1]) + h;
    }

    // phi_j(t) = sum_d b[j][d] h[t-d]: effect of message j on the output t
    // steps later; cum_gain[r] accumulates phi over t = 0..r.
    for (int j = 0; j < m; ++j) {
        double running = 0.0;
        for (int t = 0; t < max_horizon; ++t) {
            double phi = 0.0;
            for (int d = 0; d <= std::min(t, n); ++d)
                phi += sub.b[j][d] * table.impulse[t - d];
            running += phi;
            table.cum_gain[static_cast<std::size_t>(t) * m + j] = running;
        }
    }
    return table;
}

std::vector<double> compute_gains(const PwaModel& model, int regime, int horizon) {
    const GainTable table = build_gain_table(model, regime, horizon);
    const int m = model.channels;
    std::vector<double> gains(static_cast<std::size_t>(horizon) * m);
    for (int k = 0; k < horizon; ++k) {
        const int remaining = horizon - 1 - k;
        for (int j = 0; j < m; ++j)
            gains[static_cast<std::size_t>(k) * m + j] =
                table.cum_gain[static_cast<std::size_t>(remaining) * m + j];
    }
    return gains;
}

std::vector<NoiseTrajectory> sample_noise(const NoiseModel& noise, int horizon,
                                          int count, std::uint64_t seed,
                                          int start_step) {
    return kernels::sample_noise(noise, horizon, count, seed, start_step);
}

ReducedProblem reduce(const PwaModel& model, int regime, const History& hist,
                      double past_outputs_sum, std::span<const NoiseTrajectory> noise,
                      double goal, int k_star) {
    if (noise.empty()) throw std::invalid_argument("reduce: need at least one scenario");
    const int horizon = static_cast<int>(noise.front().w.size());
    for (const auto& traj : noise)
        if (static_cast<int>(traj.w.size()) != horizon)
            throw std::invalid_argument("reduce: ragged noise trajectories");

    ReducedProblem red;
    red.k_star = k_star;
    red.horizon = horizon;
    red.channels = model.channels;
    red.gains = compute_gains(model, regime, horizon);

    const std::vector<double> bases = kernels::base_sums(model, regime, hist, noise);
    red.thetas.resize(bases.size());
    for (std::size_t s = 0; s < bases.size(); ++s)
        red.thetas[s] = goal - past_outputs_sum - bases[s];
    return red;
}

double analytic_probability(const PwaModel& model, int regime, const History& hist,
                            double past_outputs_sum, const Schedule& schedule,
                            double goal, int start_step, int mc_sims,
                            std::uint64_t mc_seed) {
    if (!model.noise.per_step_sigma.empty())
        return kernels::mc_goal_probability(model, regime, hist, past_outputs_sum,
                                            schedule, goal, mc_sims, mc_seed,
                                            start_step);

    const int horizon = schedule.steps;
    const std::vector<double> mean_noise(horizon, model.noise.mu);
    const std::vector<double> y =
        simulate_trajectory(model, regime, hist, schedule, mean_noise);
    double mu_total = past_outputs_sum;
    for (double v : y) mu_total += v;

    const GainTable table = build_gain_table(model, regime, horizon);
    double var = 0.0;
    for (int k = 0; k < horizon; ++k) {
        const double w = table.noise_weight[horizon - 1 - k];
        var += w * w;
    }
    const double sigma_total = model.noise.sigma * std::sqrt(var);
    if (sigma_total == 0.0) return mu_total >= goal ? 1.0 : 0.0;
    return normal_cdf((mu_total - goal) / sigma_total);
}

}  // namespace stepmpc
