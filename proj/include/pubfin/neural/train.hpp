#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/format.hpp"
#include "pubfin/neural/backprop.hpp"
#include "pubfin/neural/lstm.hpp"
#include "pubfin/neural/optim.hpp"
#include "pubfin/neural/params.hpp"
#include "pubfin/preprocess.hpp"

namespace pubfin::neural {

struct TrainConfig {
    std::size_t hidden_size = 32;
    int epochs = 200;
    AdamConfig adam;
    double grad_clip_norm = 5.0;
    std::uint64_t seed = 42;
};

inline void validate(const TrainConfig& cfg) {
    if (cfg.hidden_size < 1) throw InvalidConfig("hidden_size must be at least 1");
    if (cfg.epochs < 1) throw InvalidConfig("epochs must be at least 1");
    if (!(cfg.adam.learning_rate > 0.0)) throw InvalidConfig("learning_rate must be positive");
    if (!(cfg.adam.beta1 > 0.0 && cfg.adam.beta1 < 1.0)) throw InvalidConfig("beta1 must lie in (0, 1)");
    if (!(cfg.adam.beta2 > 0.0 && cfg.adam.beta2 < 1.0)) throw InvalidConfig("beta2 must lie in (0, 1)");
    if (!(cfg.adam.epsilon > 0.0)) throw InvalidConfig("adam epsilon must be positive");
    if (!(cfg.grad_clip_norm > 0.0)) throw InvalidConfig("grad_clip_norm must be positive");
}

struct LossPoint {
    int epoch = 0;  // 1-based
    double train_mse = 0.0;
    double test_mse = 0.0;

    friend bool operator==(const LossPoint&, const LossPoint&) = default;
};

/// Per-epoch MSE in normalized units, measured after that epoch's update.
struct LossCurve {
    std::vector<LossPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    friend bool operator==(const LossCurve&, const LossCurve&) = default;
};

struct TrainResult {
    ModelParams params;
    LossCurve curve;
    double initial_train_mse = 0.0;  // before any update
};

namespace detail {
inline std::vector<double> targets_of(const SupervisedDataset& ds) {
    std::vector<double> y;
    y.reserve(ds.size());
    for (const auto& s : ds.samples) y.push_back(s.target);
    return y;
}

inline double dataset_mse(const ModelParams& p, const SupervisedDataset& ds) {
    double s = 0.0;
    for (const auto& smp : ds.samples) {
        const double d = predict(p, smp.inputs) - smp.target;
        s += d * d;
    }
    return s / static_cast<double>(ds.size());
}
}  // namespace detail

/// Full-batch Adam with gradient clipping. Deterministic given cfg.seed.
/// Throws NonFiniteLoss on divergence.
inline TrainResult train(const TrainConfig& cfg, const SupervisedDataset& train_set,
                         const SupervisedDataset& test_set) {
    validate(cfg);
    if (train_set.empty() || test_set.empty()) throw EmptyInput("train: training and test sets must be non-empty");

    TrainResult out;
    out.params = init_params(cfg.hidden_size, cfg.seed);
    std::vector<double> flat = flatten(out.params);
    AdamState adam(flat.size());
    const std::vector<double> targets = detail::targets_of(train_set);

    std::vector<ForwardPass> passes(train_set.size());
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double loss = 0.0;
        for (std::size_t n = 0; n < train_set.size(); ++n) {
            passes[n] = model_forward(out.params, train_set.samples[n].inputs);
            const double d = passes[n].prediction - targets[n];
            loss += d * d;
        }
        loss /= static_cast<double>(train_set.size());
        if (!std::isfinite(loss)) throw NonFiniteLoss(epoch);
        if (epoch == 1) out.initial_train_mse = loss;

        const auto grads = clip_gradients(backward(out.params, passes, targets), cfg.grad_clip_norm);
        adam_step(flat, grads, adam, cfg.adam);
        out.params = unflatten(flat, cfg.hidden_size);

        const double train_mse = detail::dataset_mse(out.params, train_set);
        const double test_mse = detail::dataset_mse(out.params, test_set);
        if (!std::isfinite(train_mse) || !std::isfinite(test_mse)) throw NonFiniteLoss(epoch);
        out.curve.points.push_back({epoch, train_mse, test_mse});
    }
    return out;
}

struct Prediction {
    Month target_month;
    double predicted = 0.0;  // normalized
    double actual = 0.0;     // normalized
};

struct EvalReport {
    double mse_normalized = 0.0;
    double mse_notch = 0.0;  // mse_normalized * intl std^2
    double baseline_mse_persistence = 0.0;  // normalized
    double baseline_mse_notch = 0.0;
    NormalizationStats intl_stats;
    std::vector<Prediction> predictions;
};

/// Test-set MSE in normalized and notch units, alongside the persistence
/// baseline that predicts each target as the previous month's INTL change.
inline EvalReport evaluate(const ModelParams& p, const SupervisedDataset& test_set,
                           const NormalizationStats& intl_stats) {
    if (test_set.empty()) throw EmptyInput("evaluate: empty test set");
    EvalReport r;
    r.intl_stats = intl_stats;
    double se = 0.0, se_base = 0.0;
    for (const auto& s : test_set.samples) {
        const double y = predict(p, s.inputs);
        se += (y - s.target) * (y - s.target);
        se_base += (s.previous_target - s.target) * (s.previous_target - s.target);
        r.predictions.push_back({s.target_month, y, s.target});
    }
    const double n = static_cast<double>(test_set.size());
    const double var_scale = intl_stats.std * intl_stats.std;
    r.mse_normalized = se / n;
    r.mse_notch = r.mse_normalized * var_scale;
    r.baseline_mse_persistence = se_base / n;
    r.baseline_mse_notch = r.baseline_mse_persistence * var_scale;
    return r;
}

inline void write_loss_curve_csv(std::ostream& out, const LossCurve& curve) {
    out << "epoch,train_mse,test_mse\n";
    for (const auto& pt : curve.points)
        out << pt.epoch << ',' << format_double(pt.train_mse) << ',' << format_double(pt.test_mse) << '\n';
}

/// Notch units.
inline void write_predictions_csv(std::ostream& out, const EvalReport& r) {
    out << "target_month,predicted_change,actual_change\n";
    for (const auto& pr : r.predictions)
        out << to_string(pr.target_month) << ',' << format_double(denormalize(pr.predicted, r.intl_stats)) << ','
            << format_double(denormalize(pr.actual, r.intl_stats)) << '\n';
}

inline void write_eval_report(std::ostream& out, const EvalReport& r) {
    out << "mse_normalized=" << format_double(r.mse_normalized) << '\n'
        << "mse_notch=" << format_double(r.mse_notch) << '\n'
        << "baseline_mse=" << format_double(r.baseline_mse_persistence) << '\n'
        << "baseline_mse_notch=" << format_double(r.baseline_mse_notch) << '\n'
        << "test_samples=" << r.predictions.size() << '\n';
}

}  // namespace pubfin::neural
