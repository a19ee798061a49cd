#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/neural/lstm.hpp"
#include "pubfin/neural/params.hpp"
#include "pubfin/prng.hpp"

namespace pubfin::neural {

inline double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size())
        throw LengthMismatch("mse_loss: " + std::to_string(predictions.size()) + " predictions vs " +
                             std::to_string(targets.size()) + " targets");
    if (predictions.empty()) throw EmptyInput("mse_loss: empty batch");
    double s = 0.0;
    for (std::size_t n = 0; n < predictions.size(); ++n) {
        const double d = predictions[n] - targets[n];
        s += d * d;
    }
    return s / static_cast<double>(predictions.size());
}

/// Exact gradient of the batch MSE with respect to every parameter, by
/// backpropagation through all window steps. `passes[n]` must be the
/// forward pass that produced the n-th prediction. Result is in flatten()
/// order.
inline std::vector<double> backward(const ModelParams& p, std::span<const ForwardPass> passes,
                                    std::span<const double> targets) {
    if (passes.size() != targets.size()) throw LengthMismatch("backward: passes and targets differ in length");
    if (passes.empty()) throw EmptyInput("backward: empty batch");

    const std::size_t H = p.hidden_size();
    const double scale = 2.0 / static_cast<double>(passes.size());
    ModelParams grad = zero_params(H);

    std::vector<double> dh(H), dc(H), dh_prev(H);
    std::array<std::vector<double>, kGateCount> da;
    for (auto& v : da) v.resize(H);

    for (std::size_t n = 0; n < passes.size(); ++n) {
        const ForwardPass& fp = passes[n];
        const double dy = scale * (fp.prediction - targets[n]);
        grad.dense.b += dy;
        for (std::size_t r = 0; r < H; ++r) {
            grad.dense.w[r] += dy * fp.h_last[r];
            dh[r] = dy * p.dense.w[r];
        }
        std::fill(dc.begin(), dc.end(), 0.0);

        for (std::size_t t = fp.caches.size(); t-- > 0;) {
            const StepCache& k = fp.caches[t];
            for (std::size_t r = 0; r < H; ++r) {
                const double d_o = dh[r] * k.tanh_c[r];
                dc[r] += dh[r] * k.o[r] * (1.0 - k.tanh_c[r] * k.tanh_c[r]);
                const double d_i = dc[r] * k.g[r];
                const double d_g = dc[r] * k.i[r];
                const double d_f = dc[r] * k.c_prev[r];
                da[kInput][r] = d_i * k.i[r] * (1.0 - k.i[r]);
                da[kForget][r] = d_f * k.f[r] * (1.0 - k.f[r]);
                da[kOutput][r] = d_o * k.o[r] * (1.0 - k.o[r]);
                da[kCandidate][r] = d_g * (1.0 - k.g[r] * k.g[r]);
                dc[r] *= k.f[r];  // becomes dc_prev
            }
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            for (std::size_t gi = 0; gi < kGateCount; ++gi) {
                GateParams& gg = grad.lstm.gates[gi];
                const GateParams& gp = p.lstm.gates[gi];
                const auto& a = da[gi];
                for (std::size_t r = 0; r < H; ++r) {
                    gg.w.data[r] += a[r] * k.x;
                    gg.b[r] += a[r];
                    double* grow = &gg.u.data[r * H];
                    const double* urow = &gp.u.data[r * H];
                    for (std::size_t c = 0; c < H; ++c) {
                        grow[c] += a[r] * k.h_prev[c];
                        dh_prev[c] += urow[c] * a[r];
                    }
                }
            }
            dh.swap(dh_prev);
        }
    }
    return flatten(grad);
}

/// Forward + loss over a batch; convenience for training and checks.
inline double batch_loss(const ModelParams& p, std::span<const std::vector<double>> windows,
                         std::span<const double> targets) {
    std::vector<double> preds;
    preds.reserve(windows.size());
    for (const auto& w : windows) preds.push_back(predict(p, w));
    return mse_loss(preds, targets);
}

/// Worst per-parameter relative error |g_a - g_n| / max(1e-8, |g_a| + |g_n|)
/// between backward() and central finite differences (eps = 1e-5), on a
/// random model and batch drawn from `seed`.
inline double grad_check(std::size_t hidden, std::size_t window, std::size_t batch, std::uint64_t seed) {
    constexpr double eps = 1e-5;
    Prng rng(seed);
    std::vector<double> flat(param_count(hidden));
    for (double& x : flat) x = 0.5 * rng.next_gaussian();
    std::vector<std::vector<double>> windows(batch, std::vector<double>(window));
    for (auto& w : windows)
        for (double& x : w) x = rng.next_gaussian();
    std::vector<double> targets(batch);
    for (double& y : targets) y = rng.next_gaussian();

    const ModelParams params = unflatten(flat, hidden);
    std::vector<ForwardPass> passes;
    for (const auto& w : windows) passes.push_back(model_forward(params, w));
    const std::vector<double> analytic = backward(params, passes, targets);

    double worst = 0.0;
    for (std::size_t j = 0; j < flat.size(); ++j) {
        const double saved = flat[j];
        flat[j] = saved + eps;
        const double up = batch_loss(unflatten(flat, hidden), windows, targets);
        flat[j] = saved - eps;
        const double down = batch_loss(unflatten(flat, hidden), windows, targets);
        flat[j] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double err =
            std::abs(analytic[j] - numeric) / std::max(1e-8, std::abs(analytic[j]) + std::abs(numeric));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace pubfin::neural
