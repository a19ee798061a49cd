#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/format.hpp"
#include "pubfin/io.hpp"
#include "pubfin/ratings.hpp"

namespace pubfin::analysis {

/// How quickly the international series is said to have followed an event.
enum class ClaimedLag { immediate, next_period, unspecified };

constexpr std::string_view claimed_lag_name(ClaimedLag l) noexcept {
    switch (l) {
        case ClaimedLag::immediate: return "immediate";
        case ClaimedLag::next_period: return "next_period";
        default: return "unspecified";
    }
}

struct EventRecord {
    std::string name;
    Month anchor_month;
    ClaimedLag claimed_lag = ClaimedLag::unspecified;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Market stress episodes, in chronological order.
inline std::vector<EventRecord> default_event_calendar() {
    return {
        {"2011 stock market crash", {2011, 8}, ClaimedLag::next_period},
        {"2013 NASDAQ flash freeze", {2013, 8}, ClaimedLag::next_period},
        {"2013 federal government shutdown", {2013, 10}, ClaimedLag::next_period},
        {"2015-16 stock market selloff", {2015, 8}, ClaimedLag::immediate},
        {"2018 cryptocurrency crash", {2018, 1}, ClaimedLag::immediate},
        {"2020 COVID-19 pandemic", {2020, 3}, ClaimedLag::immediate},
    };
}

/// Calendar override: header `name,anchor_month`, month as `YYYY-MM`.
inline std::vector<EventRecord> read_event_calendar(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "name,anchor_month")
        throw DataError("event calendar header must be 'name,anchor_month'");
    std::vector<EventRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto comma = t.rfind(',');
        const auto month = comma == std::string_view::npos ? std::nullopt : parse_month(t.substr(comma + 1));
        if (!month || trim(t.substr(0, comma)).empty())
            throw DataError("event calendar line " + std::to_string(line_no) + ": expected 'name,YYYY-MM'");
        out.push_back({std::string(trim(t.substr(0, comma))), *month, ClaimedLag::unspecified});
    }
    if (out.empty()) throw EmptyInput("event calendar has no events");
    return out;
}

struct DipReport {
    Month dip_month;
    double magnitude = 0.0;  // notch drop over the detection window
    std::optional<EventRecord> matched_event;
    std::optional<int> match_distance_months;  // |dip - anchor|, set when matched
};

/// Drop statistic: index[t] - min(index[t .. t+window-1]), window clipped at
/// the series end.
inline std::vector<double> drop_statistic(std::span<const double> index, int window) {
    const std::size_t T = index.size();
    std::vector<double> stat(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t end = std::min(T, t + static_cast<std::size_t>(window));
        const double lo = *std::min_element(index.begin() + static_cast<std::ptrdiff_t>(t),
                                            index.begin() + static_cast<std::ptrdiff_t>(end));
        stat[t] = index[t] - lo;
    }
    return stat;
}

/// Reports month t when its drop statistic reaches `threshold` and is the
/// maximum within ±window months. Among tied maxima the latest month wins,
/// so a step-down at month m is reported at m-1, the last month before the
/// fall.
inline std::vector<DipReport> detect_dips(const RegionPanel& panel, int window, double threshold) {
    if (window < 1) throw InvalidConfig("dip window must be at least 1");
    if (!(threshold > 0.0)) throw InvalidConfig("dip threshold must be positive");
    constexpr double tie = 1e-12;

    const auto stat = drop_statistic(panel.index, window);
    const auto T = static_cast<std::ptrdiff_t>(stat.size());
    std::vector<DipReport> dips;
    for (std::ptrdiff_t t = 0; t < T; ++t) {
        if (stat[t] < threshold - tie) continue;
        bool is_max = true;
        for (std::ptrdiff_t s = std::max<std::ptrdiff_t>(0, t - window); s <= std::min(T - 1, t + window); ++s) {
            if (s == t) continue;
            if (stat[s] > stat[t] + tie || (s > t && std::abs(stat[s] - stat[t]) <= tie)) {
                is_max = false;
                break;
            }
        }
        if (is_max) dips.push_back({panel.grid[static_cast<std::size_t>(t)], stat[t], std::nullopt, std::nullopt});
    }
    return dips;
}

struct LagEstimate {
    int best_lag = 0;
    double correlation_at_best = 0.0;
    std::vector<double> correlation_by_lag;  // index = lag in months
};

/// Pearson correlation; 0 when either side has zero variance.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n == 0 || n != y.size()) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// For each lag L in [0, max_lag], correlates us[0..T-1-L] with intl[L..T-1].
/// Best lag is the argmax; ties go to the smaller lag.
inline LagEstimate cross_correlation_lag(std::span<const double> us_change, std::span<const double> intl_change,
                                         int max_lag = 12) {
    if (us_change.size() != intl_change.size()) throw LengthMismatch("lag: series lengths differ");
    if (max_lag < 0) throw InvalidConfig("max_lag must be non-negative");
    const std::size_t T = us_change.size();
    if (T <= static_cast<std::size_t>(max_lag) + 2)
        throw SeriesTooShort("lag: series of length " + std::to_string(T) + " too short for max_lag " +
                             std::to_string(max_lag));

    LagEstimate est;
    for (int L = 0; L <= max_lag; ++L) {
        const auto n = T - static_cast<std::size_t>(L);
        est.correlation_by_lag.push_back(pearson(us_change.subspan(0, n), intl_change.subspan(L, n)));
    }
    for (int L = 1; L <= max_lag; ++L)
        if (est.correlation_by_lag[L] > est.correlation_by_lag[est.best_lag]) est.best_lag = L;
    est.correlation_at_best = est.correlation_by_lag[est.best_lag];
    return est;
}

/// Greedy nearest matching: candidate (dip, event) pairs within tolerance are
/// taken in order of distance, then earlier dip, then earlier anchor. Each
/// dip and each event is used at most once.
inline std::vector<DipReport> match_events(std::vector<DipReport> dips, std::span<const EventRecord> calendar,
                                           int tolerance_months = 6) {
    if (tolerance_months < 0) throw InvalidConfig("match tolerance must be non-negative");
    struct Pair {
        int distance;
        Month dip;
        Month anchor;
        std::size_t d, e;
    };
    std::vector<Pair> pairs;
    for (std::size_t d = 0; d < dips.size(); ++d) {
        dips[d].matched_event.reset();
        dips[d].match_distance_months.reset();
        for (std::size_t e = 0; e < calendar.size(); ++e) {
            const int dist = std::abs(months_between(calendar[e].anchor_month, dips[d].dip_month));
            if (dist <= tolerance_months) pairs.push_back({dist, dips[d].dip_month, calendar[e].anchor_month, d, e});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::tie(a.distance, a.dip, a.anchor, a.d, a.e) < std::tie(b.distance, b.dip, b.anchor, b.d, b.e);
    });
    std::vector<bool> event_used(calendar.size(), false);
    for (const auto& p : pairs) {
        if (dips[p.d].matched_event || event_used[p.e]) continue;
        dips[p.d].matched_event = calendar[p.e];
        dips[p.d].match_distance_months = p.distance;
        event_used[p.e] = true;
    }
    return dips;
}

struct AnalysisConfig {
    int dip_window = 6;
    double dip_threshold = 0.25;
    int match_tolerance = 6;
    int max_lag = 12;
};

struct AnalysisResult {
    std::vector<DipReport> dips;
    LagEstimate lag;

    std::size_t matched_count() const noexcept {
        return static_cast<std::size_t>(
            std::count_if(dips.begin(), dips.end(), [](const DipReport& d) { return d.matched_event.has_value(); }));
    }
};

/// Dips are taken from the US panel; panels must already be aligned.
inline AnalysisResult analyze(const RegionPanel& us, const RegionPanel& intl, const AnalysisConfig& cfg,
                              std::span<const EventRecord> calendar) {
    if (!(us.grid == intl.grid)) throw DataError("analysis requires aligned panels");
    AnalysisResult r;
    r.dips = match_events(detect_dips(us, cfg.dip_window, cfg.dip_threshold), calendar, cfg.match_tolerance);
    r.lag = cross_correlation_lag(us.change, intl.change, cfg.max_lag);
    return r;
}

inline void write_trend_csv(std::ostream& out, const RegionPanel& us, const RegionPanel& intl) {
    out << "month,us_index,intl_index,us_change,intl_change\n";
    for (std::size_t t = 0; t < us.grid.size(); ++t)
        out << to_string(us.grid[t]) << ',' << format_double(us.index[t]) << ',' << format_double(intl.index[t])
            << ',' << format_double(us.change[t]) << ',' << format_double(intl.change[t]) << '\n';
}

/// Unmatched dips leave the event and distance columns empty.
inline void write_dips_csv(std::ostream& out, std::span<const DipReport> dips) {
    out << "dip_month,magnitude,matched_event,match_distance_months\n";
    for (const auto& d : dips) {
        out << to_string(d.dip_month) << ',' << format_double(d.magnitude) << ',';
        if (d.matched_event) out << d.matched_event->name;
        out << ',';
        if (d.match_distance_months) out << *d.match_distance_months;
        out << '\n';
    }
}

inline void write_lag_profile_csv(std::ostream& out, const LagEstimate& lag) {
    out << "lag_months,correlation\n";
    for (std::size_t L = 0; L < lag.correlation_by_lag.size(); ++L)
        out << L << ',' << format_double(lag.correlation_by_lag[L]) << '\n';
}

/// Writes trend.csv, dips.csv and lag_profile.csv into `dir`.
inline void emit_trend_report(const std::filesystem::path& dir, const RegionPanel& us, const RegionPanel& intl,
                              std::span<const DipReport> dips, const LagEstimate& lag) {
    if (!(us.grid == intl.grid)) throw DataError("trend report requires aligned panels");
    write_file(dir / "trend.csv", [&](std::ostream& o) { write_trend_csv(o, us, intl); });
    write_file(dir / "dips.csv", [&](std::ostream& o) { write_dips_csv(o, dips); });
    write_file(dir / "lag_profile.csv", [&](std::ostream& o) { write_lag_profile_csv(o, lag); });
}

}  // namespace pubfin::analysis
