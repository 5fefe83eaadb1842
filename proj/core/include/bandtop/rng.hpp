#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace bandtop {

constexpr std::uint64_t kDefaultSeed = 12345;

/// Deterministic RNG used everywhere randomness is needed (symmetry
/// sampling, test directions, gauge noise). Same seed, same stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed = kDefaultSeed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

    /// Uniformly random point on the unit sphere S^{n-1}.
    std::vector<double> unit_vector(int n) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& x : v) {
                x = normal();
                norm2 += x * x;
            }
        } while (norm2 < 1e-24);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x *= inv;
        return v;
    }

    /// Random phase on the unit circle.
    std::complex<double> unit_phase() {
        const double th = uniform(0.0, 2.0 * M_PI);
        return {std::cos(th), std::sin(th)};
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

} // namespace bandtop
