#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "stepmpc/kernels.hpp"
#include "stepmpc/rng.hpp"
#include "test_util.hpp"

using namespace stepmpc;
using namespace stepmpc::test;

TEST_CASE("count_satisfied: serial and parallel agree exactly") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = trial < 5 ? uniform_int(rng, 0, 100) : uniform_int(rng, 5000, 20000);
        std::vector<double> thetas(n);
        for (auto& th : thetas) th = uniform(rng, -100.0, 100.0);
        const double gain = uniform(rng, -100.0, 100.0);
        const int a = kernels::count_satisfied_serial(thetas, gain);
        const int b = kernels::count_satisfied_parallel(thetas, gain);
        CHECK(a == b);
        CHECK(kernels::count_satisfied(thetas, gain) == a);
    }
}

TEST_CASE("count_satisfied: boundary inclusion") {
    const std::vector<double> thetas{-1.0, 0.0, 0.0, 2.0};
    CHECK(kernels::count_satisfied_serial(thetas, 0.0) == 3);  // theta <= gain
    CHECK(kernels::count_satisfied_serial(thetas, -2.0) == 0);
    CHECK(kernels::count_satisfied_serial(thetas, 2.0) == 4);
}

TEST_CASE("sample_noise: degenerate sigma and determinism") {
    NoiseModel noise{.mu = -0.0155, .sigma = 0.0};
    const auto t = kernels::sample_noise_serial(noise, 6, 4, 99);
    for (const auto& traj : t)
        for (double w : traj.w) CHECK(w == -0.0155);

    NoiseModel wide{.mu = -0.0155, .sigma = 268.679};
    const auto a = kernels::sample_noise_serial(wide, 8, 64, 1234);
    const auto b = kernels::sample_noise_serial(wide, 8, 64, 1234);
    const auto c = kernels::sample_noise_parallel(wide, 8, 64, 1234);
    REQUIRE(a.size() == 64);
    for (int s = 0; s < 64; ++s) {
        CHECK(a[s].w == b[s].w);
        CHECK(a[s].w == c[s].w);
    }
    const auto d = kernels::sample_noise_serial(wide, 8, 64, 1235);
    CHECK(a[0].w != d[0].w);
}

TEST_CASE("sample_noise: sample mean within 4 sigma / sqrt(N)") {
    NoiseModel noise{.mu = -0.0155, .sigma = 268.679};
    const int n = 10000;
    const auto t = kernels::sample_noise_serial(noise, 1, n, 2026);
    double mean = 0.0;
    for (const auto& traj : t) mean += traj.w[0];
    mean /= n;
    CHECK(std::abs(mean - noise.mu) <= 4.0 * noise.sigma / std::sqrt(double(n)));
}

TEST_CASE("sample_noise honors a per-step sigma list with offset") {
    NoiseModel noise{.mu = 5.0, .sigma = 100.0};
    noise.per_step_sigma = {0.0, 0.0, 1.0, 2.0, 0.0, 3.0};
    const auto t = kernels::sample_noise_serial(noise, 2, 3, 7, /*start_step=*/4);
    for (const auto& traj : t) {
        CHECK(traj.w[0] == 5.0);  // sigma[4] = 0
        CHECK(traj.w[1] != 5.0);  // sigma[5] = 3
    }
    CHECK_THROWS_AS(kernels::sample_noise_serial(noise, 3, 1, 7, 4),
                    std::out_of_range);
}

TEST_CASE("base_sums: serial and parallel bit-identical") {
    const PwaModel model = reference_weekday_model();
    std::mt19937_64 rng(8);
    const History hist = random_history(rng, 5, 3);
    const auto noise = kernels::sample_noise_serial(model.noise, 12, 300, 42);
    const auto a = kernels::base_sums_serial(model, 0, hist, noise);
    const auto b = kernels::base_sums_parallel(model, 0, hist, noise);
    CHECK(a == b);
    CHECK(kernels::base_sums(model, 0, hist, noise) == a);
}

TEST_CASE("base_sums equals a direct zero-input simulation") {
    const PwaModel model = reference_weekday_model();
    std::mt19937_64 rng(9);
    const History hist = random_history(rng, 5, 3);
    const auto noise = kernels::sample_noise_serial(model.noise, 7, 20, 43);
    const auto sums = kernels::base_sums_serial(model, 0, hist, noise);
    for (int s = 0; s < 20; ++s) {
        const auto y = simulate_trajectory(model, 0, hist, Schedule(7, 3), noise[s].w);
        double direct = 0.0;
        for (double v : y) direct += v;
        CHECK(sums[s] == direct);
    }
}

TEST_CASE("mc_goal_probability: serial == parallel, honest probabilities") {
    const PwaModel model = reference_weekday_model();
    const History hist = History::zeros(5, 3);
    Schedule sched(10, 3);
    sched.at(2, 1) = 1;
    const double pa = kernels::mc_goal_probability_serial(model, 0, hist, 0.0, sched,
                                                          800.0, 5000, 77);
    const double pb = kernels::mc_goal_probability_parallel(model, 0, hist, 0.0, sched,
                                                            800.0, 5000, 77);
    CHECK(pa == pb);
    CHECK(pa >= 0.0);
    CHECK(pa <= 1.0);
    // Impossible and certain goals.
    CHECK(kernels::mc_goal_probability_serial(model, 0, hist, 0.0, sched, -1e9, 100,
                                              1) == 1.0);
    CHECK(kernels::mc_goal_probability_serial(model, 0, hist, 0.0, sched, 1e9, 100,
                                              1) == 0.0);
}

TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}

TEST_CASE("GaussianSampler moments are sane") {
    GaussianSampler g(123);
    const int n = 200000;
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = g.next_standard();
        mean += z;
        var += z * z;
    }
    mean /= n;
    var = var / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}
