#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pubfin {

/// splitmix64 generator shared by the synthetic data generator and the
/// network initializer. The draw order of every consumer is part of the
/// reproducibility contract, so never reorder calls.
class Prng {
public:
    explicit Prng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in the open interval (0, 1): top 53 bits, offset by half an ulp.
    double next_uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double next_uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_uniform(); }

    /// Uniform integer in [0, n) by modulo reduction (bias is < 2^-50 for the
    /// small n used here).
    std::uint64_t next_below(std::uint64_t n) noexcept { return next_u64() % n; }

    /// Standard normal via Box-Muller on two successive uniforms; the sine
    /// branch is discarded so every variate consumes exactly two draws.
    double next_gaussian() noexcept {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

}  // namespace pubfin
