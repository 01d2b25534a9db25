// Compares the serial reference kernels against their OpenMP versions and
// times one full controller window. Results must be identical; only the
// wall time may differ.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stepmpc/experiment.hpp"
#include "stepmpc/kernels.hpp"
#include "stepmpc/rng.hpp"

using namespace stepmpc;

namespace {

double seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

template <typename F>
double time_best_of(int reps, const F& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, seconds(t0));
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-22s serial %8.4f s   omp %8.4f s   speedup %5.2fx   %s\n", name,
                serial, parallel, serial / parallel,
                identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both columns run the serial code\n");
#endif

    const PwaModel model = reference_weekday_model();
    const History hist = History::zeros(model.order, model.channels);

    {
        const int n = 200000, horizon = 40;
        std::vector<NoiseTrajectory> a, b;
        const double ts = time_best_of(3, [&] {
            a = kernels::sample_noise_serial(model.noise, horizon, n, 42);
        });
        const double tp = time_best_of(3, [&] {
            b = kernels::sample_noise_parallel(model.noise, horizon, n, 42);
        });
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].w == b[i].w;
        report("sample_noise", ts, tp, same);

        std::vector<double> sa, sb;
        const double bs = time_best_of(
            3, [&] { sa = kernels::base_sums_serial(model, 0, hist, a); });
        const double bp = time_best_of(
            3, [&] { sb = kernels::base_sums_parallel(model, 0, hist, a); });
        report("base_sums", bs, bp, sa == sb);
    }

    {
        const int n = 20000000;
        std::vector<double> thetas(n);
        GaussianSampler g(7);
        for (auto& th : thetas) th = g.next(0.0, 1000.0);
        int ca = 0, cb = 0;
        const double ts =
            time_best_of(3, [&] { ca = kernels::count_satisfied_serial(thetas, 12.5); });
        const double tp = time_best_of(
            3, [&] { cb = kernels::count_satisfied_parallel(thetas, 12.5); });
        report("count_satisfied", ts, tp, ca == cb);
    }

    {
        const int sims = 400000;
        Schedule schedule(40, model.channels);
        schedule.at(4, 1) = 1;
        schedule.at(10, 0) = 1;
        double pa = 0, pb = 0;
        const double ts = time_best_of(2, [&] {
            pa = kernels::mc_goal_probability_serial(model, 0, hist, 0.0, schedule,
                                                     6016.0, sims, 3);
        });
        const double tp = time_best_of(2, [&] {
            pb = kernels::mc_goal_probability_parallel(model, 0, hist, 0.0, schedule,
                                                       6016.0, sims, 3);
        });
        report("mc_goal_probability", ts, tp, pa == pb);
    }

    {
        ExperimentConfig cfg;
        apply_preset(cfg, "regular");
        cfg.seed = 1;
        const auto t0 = std::chrono::steady_clock::now();
        const RunLog log = simulate_experiment(cfg);
        std::printf("full window run        %8.4f s   (%d messages, final prob %.2f)\n",
                    seconds(t0), log.total_messages, log.final_prob_estimate);
    }
    return 0;
}
