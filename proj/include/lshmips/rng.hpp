#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lshmips {

/// Derives an independent stream seed for a named purpose (splitmix64 step).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seeded random source. Gaussian variates come from an explicit Box-Muller
/// transform of mt19937_64 output, so a seed reproduces the same stream on
/// every platform; std::normal_distribution makes no such promise.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal variate; consumes exactly two engine draws.
    double gaussian() {
        // u1 in (0, 1] keeps the log finite.
        double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::mt19937_64 engine_;
};

} // namespace lshmips
