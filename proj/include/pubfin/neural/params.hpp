#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/prng.hpp"

namespace pubfin::neural {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

enum Gate : std::size_t { kInput = 0, kForget = 1, kOutput = 2, kCandidate = 3 };
inline constexpr std::size_t kGateCount = 4;

struct GateParams {
    Matrix w;                // H x 1, applied to the scalar input
    Matrix u;                // H x H, applied to h_prev
    std::vector<double> b;   // H

    friend bool operator==(const GateParams&, const GateParams&) = default;
};

struct LstmParams {
    std::array<GateParams, kGateCount> gates;  // input, forget, output, candidate

    friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

struct DenseParams {
    std::vector<double> w;  // 1 x H
    double b = 0.0;

    friend bool operator==(const DenseParams&, const DenseParams&) = default;
};

struct ModelParams {
    LstmParams lstm;
    DenseParams dense;

    std::size_t hidden_size() const noexcept { return dense.w.size(); }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// 4(H + H^2 + H) + H + 1.
constexpr std::size_t param_count(std::size_t hidden) noexcept {
    return 4 * (hidden + hidden * hidden + hidden) + hidden + 1;
}

/// All-zero parameters of hidden width `hidden`.
inline ModelParams zero_params(std::size_t hidden) {
    if (hidden < 1) throw InvalidConfig("hidden size must be at least 1");
    ModelParams p;
    for (auto& g : p.lstm.gates) {
        g.w = Matrix(hidden, 1);
        g.u = Matrix(hidden, hidden);
        g.b.assign(hidden, 0.0);
    }
    p.dense.w.assign(hidden, 0.0);
    return p;
}

/// Flat order: for each gate (input, forget, output, candidate) W, U
/// row-major, b; then dense w, dense b.
inline std::vector<double> flatten(const ModelParams& p) {
    std::vector<double> out;
    out.reserve(param_count(p.hidden_size()));
    for (const auto& g : p.lstm.gates) {
        out.insert(out.end(), g.w.data.begin(), g.w.data.end());
        out.insert(out.end(), g.u.data.begin(), g.u.data.end());
        out.insert(out.end(), g.b.begin(), g.b.end());
    }
    out.insert(out.end(), p.dense.w.begin(), p.dense.w.end());
    out.push_back(p.dense.b);
    return out;
}

inline ModelParams unflatten(std::span<const double> flat, std::size_t hidden) {
    if (flat.size() != param_count(hidden))
        throw LengthMismatch("parameter vector has " + std::to_string(flat.size()) + " entries, expected " +
                             std::to_string(param_count(hidden)));
    ModelParams p = zero_params(hidden);
    std::size_t k = 0;
    auto take = [&](std::vector<double>& dst) {
        for (double& x : dst) x = flat[k++];
    };
    for (auto& g : p.lstm.gates) {
        take(g.w.data);
        take(g.u.data);
        take(g.b);
    }
    take(p.dense.w);
    p.dense.b = flat[k];
    return p;
}

/// Glorot-uniform weights, zero biases except the forget gate (1.0).
/// Draw order: per gate W then U, then dense w; one uniform per weight.
inline ModelParams init_params(std::size_t hidden, std::uint64_t seed) {
    ModelParams p = zero_params(hidden);
    Prng rng(seed);
    auto glorot = [&](std::vector<double>& dst, std::size_t fan_in, std::size_t fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& x : dst) x = rng.next_uniform(-limit, limit);
    };
    for (auto& g : p.lstm.gates) {
        glorot(g.w.data, 1, hidden);
        glorot(g.u.data, hidden, hidden);
    }
    glorot(p.dense.w, hidden, 1);
    p.lstm.gates[kForget].b.assign(hidden, 1.0);
    return p;
}

}  // namespace pubfin::neural
