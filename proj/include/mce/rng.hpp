#pragma once

// Reproducible random streams.
//
// Each stream is keyed by (seed, index) and is an mt19937_64 seeded through
// SplitMix64, so a trajectory's draws do not depend on which worker runs it.
// Uniforms use the top 53 bits and normals use Box-Muller; neither relies on
// the implementation-defined std:: distributions.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace mce {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t index)
        : engine_(splitmix64(seed ^ splitmix64(index + 0x5851f42d4c957f2dULL))) {}

    /// Uniform in (0, 1).
    double uniform() {
        double u;
        do {
            u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        } while (u == 0.0);
        return u;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// x + i y with x, y independent N(0, sigma^2).
    std::complex<double> complex_normal(double sigma) {
        const double x = normal();
        const double y = normal();
        return {sigma * x, sigma * y};
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace mce
