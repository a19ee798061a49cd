#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pubfin/error.hpp"

namespace pubfin::neural {

inline double l2_norm(std::span<const double> g) noexcept {
    double s = 0.0;
    for (double x : g) s += x * x;
    return std::sqrt(s);
}

/// Rescales `grads` onto the ball of radius `max_norm` when it lies outside.
inline std::vector<double> clip_gradients(std::span<const double> grads, double max_norm) {
    if (!(max_norm > 0.0)) throw InvalidConfig("gradient clip norm must be positive");
    std::vector<double> out(grads.begin(), grads.end());
    const double norm = l2_norm(grads);
    if (norm > max_norm) {
        const double alpha = max_norm / norm;
        for (double& x : out) x *= alpha;
    }
    return out;
}

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step_count = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}

    friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// One bias-corrected Adam update, in place.
inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                      const AdamConfig& cfg) {
    if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size())
        throw LengthMismatch("adam_step: parameter, gradient and moment lengths differ");
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t j = 0; j < params.size(); ++j) {
        const double g = grads[j];
        state.m[j] = cfg.beta1 * state.m[j] + (1.0 - cfg.beta1) * g;
        state.v[j] = cfg.beta2 * state.v[j] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[j] / c1;
        const double v_hat = state.v[j] / c2;
        params[j] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

}  // namespace pubfin::neural
