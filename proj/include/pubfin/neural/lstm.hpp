#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "pubfin/neural/params.hpp"

namespace pubfin::neural {

inline double sigmoid(double x) noexcept {
    // branch keeps exp() from overflowing for large |x|
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Everything backprop needs from one cell step.
struct StepCache {
    double x = 0.0;
    std::vector<double> h_prev, c_prev;
    std::vector<double> i, f, o, g;  // gate activations; g is the tanh candidate
    std::vector<double> c, tanh_c;
};

struct StepResult {
    std::vector<double> h;
    std::vector<double> c;
    StepCache cache;
};

/// i, f, o = sigmoid(W x + U h_prev + b); g = tanh(...);
/// c = f*c_prev + i*g; h = o*tanh(c).
inline StepResult lstm_step(const LstmParams& p, double x, std::span<const double> h_prev,
                            std::span<const double> c_prev) {
    const std::size_t H = h_prev.size();
    StepCache k;
    k.x = x;
    k.h_prev.assign(h_prev.begin(), h_prev.end());
    k.c_prev.assign(c_prev.begin(), c_prev.end());

    std::array<std::vector<double>*, kGateCount> act = {&k.i, &k.f, &k.o, &k.g};
    for (std::size_t gi = 0; gi < kGateCount; ++gi) {
        const GateParams& gp = p.gates[gi];
        auto& a = *act[gi];
        a.resize(H);
        for (std::size_t r = 0; r < H; ++r) {
            double z = gp.w.data[r] * x + gp.b[r];
            const double* urow = &gp.u.data[r * H];
            for (std::size_t c = 0; c < H; ++c) z += urow[c] * h_prev[c];
            a[r] = gi == kCandidate ? std::tanh(z) : sigmoid(z);
        }
    }

    StepResult out;
    k.c.resize(H);
    k.tanh_c.resize(H);
    out.h.resize(H);
    for (std::size_t r = 0; r < H; ++r) {
        k.c[r] = k.f[r] * c_prev[r] + k.i[r] * k.g[r];
        k.tanh_c[r] = std::tanh(k.c[r]);
        out.h[r] = k.o[r] * k.tanh_c[r];
    }
    out.c = k.c;
    out.cache = std::move(k);
    return out;
}

struct ForwardPass {
    double prediction = 0.0;
    std::vector<StepCache> caches;  // one per window step
    std::vector<double> h_last;
};

/// Runs the window from a zero state; the output node is linear.
inline ForwardPass model_forward(const ModelParams& p, std::span<const double> window) {
    const std::size_t H = p.hidden_size();
    ForwardPass fp;
    fp.caches.reserve(window.size());
    std::vector<double> h(H, 0.0), c(H, 0.0);
    for (double x : window) {
        StepResult s = lstm_step(p.lstm, x, h, c);
        h = std::move(s.h);
        c = std::move(s.c);
        fp.caches.push_back(std::move(s.cache));
    }
    double y = p.dense.b;
    for (std::size_t r = 0; r < H; ++r) y += p.dense.w[r] * h[r];
    fp.prediction = y;
    fp.h_last = std::move(h);
    return fp;
}

inline double predict(const ModelParams& p, std::span<const double> window) {
    return model_forward(p, window).prediction;
}

}  // namespace pubfin::neural
