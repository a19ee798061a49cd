#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/format.hpp"
#include "pubfin/ratings.hpp"

namespace pubfin {

inline constexpr double kStdFloor = 1e-8;

struct NormalizationStats {
    double mean = 0.0;
    double std = 1.0;

    friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

namespace detail {
inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double population_std(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}
}  // namespace detail

/// Mean and population standard deviation (floored at 1e-8).
inline NormalizationStats fit_stats(std::span<const double> train_values) {
    if (train_values.size() < 2)
        throw TooFewValues("normalization needs at least 2 values, got " + std::to_string(train_values.size()));
    const double mean = detail::mean_of(train_values);
    return {mean, std::max(detail::population_std(train_values, mean), kStdFloor)};
}

inline double normalize(double x, const NormalizationStats& s) noexcept { return (x - s.mean) / s.std; }
inline double denormalize(double z, const NormalizationStats& s) noexcept { return z * s.std + s.mean; }

inline std::vector<double> normalize(std::span<const double> xs, const NormalizationStats& s) {
    std::vector<double> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [&](double x) { return normalize(x, s); });
    return out;
}

// ---------------------------------------------------------------------------
// Outliers
// ---------------------------------------------------------------------------

/// Clamp interval mean ± k·std, kept so the same clamp can be reapplied.
struct WinsorBounds {
    double mean = 0.0;
    double std = 0.0;  // population std, unfloored
    double k = 4.0;

    double lower() const noexcept { return mean - k * std; }
    double upper() const noexcept { return mean + k * std; }
};

inline WinsorBounds winsor_bounds(std::span<const double> reference, double k) {
    if (!(k > 0.0)) throw InvalidConfig("winsorization k must be positive");
    if (reference.empty()) return {0.0, 0.0, k};
    const double mean = detail::mean_of(reference);
    return {mean, detail::population_std(reference, mean), k};
}

inline std::vector<double> winsorize(std::span<const double> values, const WinsorBounds& b) {
    std::vector<double> out(values.begin(), values.end());
    const double lo = b.lower(), hi = b.upper();
    for (double& x : out) x = std::clamp(x, lo, hi);
    return out;
}

struct Winsorized {
    std::vector<double> values;
    WinsorBounds bounds;
};

/// Clamps against the input series' own mean ± k·std.
inline Winsorized winsorize(std::span<const double> values, double k = 4.0) {
    const WinsorBounds b = winsor_bounds(values, k);
    return {winsorize(values, b), b};
}

// ---------------------------------------------------------------------------
// Alignment and windows
// ---------------------------------------------------------------------------

namespace detail {
inline RegionPanel slice_panel(const RegionPanel& p, Month from, Month to) {
    const std::size_t a = *p.grid.index_of(from);
    const std::size_t b = *p.grid.index_of(to) + 1;
    RegionPanel out;
    out.region = p.region;
    out.grid = TimeGrid(from, to);
    out.index.assign(p.index.begin() + a, p.index.begin() + b);
    out.coverage.assign(p.coverage.begin() + a, p.coverage.begin() + b);
    out.change.assign(out.index.size(), 0.0);
    for (std::size_t t = 1; t < out.index.size(); ++t) out.change[t] = out.index[t] - out.index[t - 1];
    return out;
}
}  // namespace detail

/// Truncates both panels to their common months. `change[0]` of a truncated
/// panel is reset to 0 so the panel invariant holds.
inline std::pair<RegionPanel, RegionPanel> align_panels(const RegionPanel& us, const RegionPanel& intl,
                                                        int lookback) {
    const Month from = std::max(us.grid.start(), intl.grid.start());
    const Month to = std::min(us.grid.end(), intl.grid.end());
    const int overlap = to < from ? 0 : months_between(from, to) + 1;
    if (us.grid.empty() || intl.grid.empty() || overlap < lookback + 2)
        throw InsufficientOverlap("panels share " + std::to_string(overlap) + " months; need at least " +
                                  std::to_string(lookback + 2));
    return {detail::slice_panel(us, from, to), detail::slice_panel(intl, from, to)};
}

struct WindowSample {
    std::vector<double> inputs;  // us[t-W .. t-1], oldest first
    double target = 0.0;         // intl[t]
    double previous_target = 0.0;  // intl[t-1], used by the persistence baseline
    Month target_month{};
};

struct SupervisedDataset {
    std::vector<WindowSample> samples;
    int lookback = 0;
    NormalizationStats us_stats;
    NormalizationStats intl_stats;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
};

/// One-step-ahead windows: for t in [W, T-1], inputs us[t-W..t-1] and target
/// intl[t]. Sample i targets month `first_month + W + i`.
inline SupervisedDataset make_windows(std::span<const double> us_changes, std::span<const double> intl_changes,
                                      int lookback, Month first_month = {}) {
    if (us_changes.size() != intl_changes.size()) throw LengthMismatch("US and INTL series differ in length");
    if (lookback < 1) throw InvalidConfig("lookback must be at least 1");
    const std::size_t T = us_changes.size();
    const auto W = static_cast<std::size_t>(lookback);
    if (T < W + 1)
        throw SeriesTooShort("series of length " + std::to_string(T) + " too short for lookback " +
                             std::to_string(lookback));

    SupervisedDataset ds;
    ds.lookback = lookback;
    ds.samples.reserve(T - W);
    for (std::size_t t = W; t < T; ++t) {
        WindowSample s;
        s.inputs.assign(us_changes.begin() + static_cast<std::ptrdiff_t>(t - W),
                        us_changes.begin() + static_cast<std::ptrdiff_t>(t));
        s.target = intl_changes[t];
        s.previous_target = intl_changes[t - 1];
        s.target_month = first_month.plus(static_cast<int>(t));
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

struct SplitSpec {
    double train_fraction = 0.8;
};

/// Number of training samples for a dataset of `n` samples.
inline std::size_t train_count(std::size_t n, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw InvalidConfig("train_fraction must lie in (0, 1)");
    if (n < 5) throw DegenerateSplit("need at least 5 samples to split, got " + std::to_string(n));
    const auto k = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n)));
    if (k == 0 || k == n)
        throw DegenerateSplit("split of " + std::to_string(n) + " samples leaves one side empty");
    return k;
}

/// Chronological split; no shuffling.
inline std::pair<SupervisedDataset, SupervisedDataset> temporal_split(const SupervisedDataset& ds,
                                                                      const SplitSpec& spec = {}) {
    const std::size_t k = train_count(ds.size(), spec);
    SupervisedDataset train = ds, test = ds;
    train.samples.assign(ds.samples.begin(), ds.samples.begin() + static_cast<std::ptrdiff_t>(k));
    test.samples.assign(ds.samples.begin() + static_cast<std::ptrdiff_t>(k), ds.samples.end());
    return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Full preparation
// ---------------------------------------------------------------------------

struct PreprocessConfig {
    int lookback = 12;
    double train_fraction = 0.8;
    double winsor_k = 4.0;
};

struct PreparedData {
    RegionPanel us;    // aligned
    RegionPanel intl;  // aligned
    WinsorBounds us_winsor;
    WinsorBounds intl_winsor;
    SupervisedDataset all;
    SupervisedDataset train;
    SupervisedDataset test;
};

/// Aligns, winsorizes, normalizes, windows and splits. Winsorization bounds
/// and normalization stats are fitted on the values that appear in training
/// samples only: US inputs us[0 .. W+n_train-2] and INTL targets
/// intl[W .. W+n_train-1].
inline PreparedData prepare_dataset(const RegionPanel& us_panel, const RegionPanel& intl_panel,
                                    const PreprocessConfig& cfg) {
    PreparedData out;
    std::tie(out.us, out.intl) = align_panels(us_panel, intl_panel, cfg.lookback);

    const std::size_t T = out.us.change.size();
    const auto W = static_cast<std::size_t>(cfg.lookback);
    const std::size_t n_train = train_count(T - W, SplitSpec{cfg.train_fraction});

    const std::span<const double> us_all(out.us.change), intl_all(out.intl.change);
    const auto us_train = us_all.subspan(0, W + n_train - 1);
    const auto intl_train = intl_all.subspan(W, n_train);

    out.us_winsor = winsor_bounds(us_train, cfg.winsor_k);
    out.intl_winsor = winsor_bounds(intl_train, cfg.winsor_k);
    const auto us_w = winsorize(us_all, out.us_winsor);
    const auto intl_w = winsorize(intl_all, out.intl_winsor);

    const auto us_stats = fit_stats(std::span<const double>(us_w).subspan(0, W + n_train - 1));
    const auto intl_stats = fit_stats(std::span<const double>(intl_w).subspan(W, n_train));

    out.all = make_windows(normalize(us_w, us_stats), normalize(intl_w, intl_stats), cfg.lookback,
                           out.us.grid.start());
    out.all.us_stats = us_stats;
    out.all.intl_stats = intl_stats;
    std::tie(out.train, out.test) = temporal_split(out.all, SplitSpec{cfg.train_fraction});
    return out;
}

/// Debug dump: `sample_idx,target_month,u_lag_1..u_lag_W,target`, where
/// u_lag_1 is the most recent month (t-1).
inline void write_dataset_csv(std::ostream& out, const SupervisedDataset& ds) {
    out << "sample_idx,target_month";
    for (int l = 1; l <= ds.lookback; ++l) out << ",u_lag_" << l;
    out << ",target\n";
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const auto& s = ds.samples[i];
        out << i << ',' << to_string(s.target_month);
        for (auto it = s.inputs.rbegin(); it != s.inputs.rend(); ++it) out << ',' << format_double(*it);
        out << ',' << format_double(s.target) << '\n';
    }
}

}  // namespace pubfin
