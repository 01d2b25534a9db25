#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace stepmpc {

/// splitmix64 finalizer (Steele, Lea, Flood 2014). Used to derive
/// per-stream seeds so that parallel sampling is reproducible: stream s of
/// master seed M always gets the same engine seed, regardless of thread
/// count or evaluation order.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master + 0x9E3779B97F4A7C15ull * (stream + 1));
}

/// Gaussian sampler with a pinned algorithm: std::mt19937_64 (fully
/// specified by the standard) feeding the Box-Muller transform. We avoid
/// std::normal_distribution because its algorithm is implementation
/// defined, which would break replay across standard libraries.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : eng_(seed) {}

    /// One N(mu, sigma) draw.
    double next(double mu, double sigma) { return mu + sigma * next_standard(); }

    /// One N(0, 1) draw.
    double next_standard() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1): 53-bit mantissa uniforms.
        const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace stepmpc
