#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "pubfin/analysis.hpp"
#include "pubfin/error.hpp"
#include "pubfin/format.hpp"
#include "pubfin/neural/train.hpp"
#include "pubfin/preprocess.hpp"
#include "pubfin/synth.hpp"

namespace pubfin {

/// Every tunable of a run. `seed` drives both the generator and the network
/// initializer.
struct RunConfig {
    synth::SynthConfig synth;
    PreprocessConfig preprocess;
    neural::TrainConfig train;
    analysis::AnalysisConfig analysis;
    bool allow_early_dates = false;
    std::string calendar;  // optional event calendar CSV
};

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    bool ok = false;
    if constexpr (std::is_floating_point_v<T>) ok = parse_double(value, out);
    else ok = parse_int(value, out);
    if (!ok) throw ConfigError("config key '" + std::string(key) + "': invalid value '" + std::string(value) + "'");
    return out;
}

inline bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + std::string(key) + "': expected true/false, got '" + std::string(value) + "'");
}

/// `none`, or `YYYY-MM:depth` entries separated by ';'.
inline std::vector<synth::DipSpec> parse_dip_schedule(std::string_view key, std::string_view value) {
    std::vector<synth::DipSpec> out;
    if (value == "none" || value.empty()) return out;
    const auto bad = [&] {
        return ConfigError("config key '" + std::string(key) + "': expected 'YYYY-MM:depth;...' or 'none', got '" +
                           std::string(value) + "'");
    };
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto semi = value.find(';', pos);
        const auto item = trim(value.substr(pos, semi == std::string_view::npos ? semi : semi - pos));
        if (!item.empty()) {
            const auto colon = item.find(':');
            if (colon == std::string_view::npos) throw bad();
            const auto month = parse_month(item.substr(0, colon));
            double depth = 0.0;
            if (!month || !parse_double(trim(item.substr(colon + 1)), depth)) throw bad();
            out.push_back({*month, depth});
        }
        if (semi == std::string_view::npos) break;
        pos = semi + 1;
    }
    return out;
}

inline std::string format_dip_schedule(const std::vector<synth::DipSpec>& dips) {
    if (dips.empty()) return "none";
    std::string s;
    for (const auto& d : dips) {
        if (!s.empty()) s += ';';
        s += to_string(d.month) + ':' + format_double(d.depth);
    }
    return s;
}

}  // namespace detail

/// Applies one `key=value` setting. Unknown keys are errors.
inline void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    using detail::parse_number;
    auto& s = cfg.synth;
    auto& t = cfg.train;
    auto& a = cfg.analysis;
    if (key == "seed") s.seed = t.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "start_month") {
        const auto m = parse_month(value);
        if (!m) throw ConfigError("config key 'start_month': expected YYYY-MM, got '" + std::string(value) + "'");
        s.start = *m;
    }
    else if (key == "months") s.months = parse_number<int>(key, value);
    else if (key == "entities_per_region") s.entities_per_region = parse_number<int>(key, value);
    else if (key == "lag_months") s.lag_months = parse_number<int>(key, value);
    else if (key == "noise_std") s.noise_std = parse_number<double>(key, value);
    else if (key == "dip_schedule") s.dip_schedule = detail::parse_dip_schedule(key, value);
    else if (key == "event_emission_prob") s.event_emission_prob = parse_number<double>(key, value);
    else if (key == "base_notch") {
        if (value == "random") s.base_notch.reset();
        else s.base_notch = parse_number<int>(key, value);
    }
    else if (key == "lookback") cfg.preprocess.lookback = parse_number<int>(key, value);
    else if (key == "train_fraction") cfg.preprocess.train_fraction = parse_number<double>(key, value);
    else if (key == "winsor_k") cfg.preprocess.winsor_k = parse_number<double>(key, value);
    else if (key == "hidden_size") t.hidden_size = parse_number<std::size_t>(key, value);
    else if (key == "epochs") t.epochs = parse_number<int>(key, value);
    else if (key == "learning_rate") t.adam.learning_rate = parse_number<double>(key, value);
    else if (key == "beta1") t.adam.beta1 = parse_number<double>(key, value);
    else if (key == "beta2") t.adam.beta2 = parse_number<double>(key, value);
    else if (key == "adam_epsilon") t.adam.epsilon = parse_number<double>(key, value);
    else if (key == "grad_clip_norm") t.grad_clip_norm = parse_number<double>(key, value);
    else if (key == "dip_window") a.dip_window = parse_number<int>(key, value);
    else if (key == "dip_threshold") a.dip_threshold = parse_number<double>(key, value);
    else if (key == "match_tolerance") a.match_tolerance = parse_number<int>(key, value);
    else if (key == "max_lag") a.max_lag = parse_number<int>(key, value);
    else if (key == "calendar") cfg.calendar = std::string(value);
    else if (key == "allow_early_dates") cfg.allow_early_dates = detail::parse_bool(key, value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

/// Applies a `key=value` override string such as `--set epochs=10`.
inline void apply_assignment(RunConfig& cfg, std::string_view assignment, const std::string& where = "override") {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError(where + ": expected key=value, got '" + std::string(assignment) + "'");
    apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

/// Flat `key=value` lines; `#` starts a comment; blank lines ignored.
inline void apply_config_text(RunConfig& cfg, std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v(line);
        if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        v = trim(v);
        if (v.empty()) continue;
        apply_assignment(cfg, v, "config line " + std::to_string(line_no));
    }
}

inline void validate(const RunConfig& cfg) {
    const auto& p = cfg.preprocess;
    if (p.lookback < 1) throw InvalidConfig("lookback must be at least 1");
    if (!(p.train_fraction > 0.0 && p.train_fraction < 1.0)) throw InvalidConfig("train_fraction must lie in (0, 1)");
    if (!(p.winsor_k > 0.0)) throw InvalidConfig("winsor_k must be positive");
    neural::validate(cfg.train);
    const auto& a = cfg.analysis;
    if (a.dip_window < 1) throw InvalidConfig("dip_window must be at least 1");
    if (!(a.dip_threshold > 0.0)) throw InvalidConfig("dip_threshold must be positive");
    if (a.match_tolerance < 0) throw InvalidConfig("match_tolerance must be non-negative");
    if (a.max_lag < 0) throw InvalidConfig("max_lag must be non-negative");
}

/// Effective configuration in the same flat format; reloading it reproduces
/// the run.
inline void write_config(std::ostream& out, const RunConfig& cfg) {
    const auto& s = cfg.synth;
    const auto& t = cfg.train;
    const auto& a = cfg.analysis;
    out << "seed=" << s.seed << '\n'
        << "start_month=" << to_string(s.start) << '\n'
        << "months=" << s.months << '\n'
        << "entities_per_region=" << s.entities_per_region << '\n'
        << "lag_months=" << s.lag_months << '\n'
        << "noise_std=" << format_double(s.noise_std) << '\n'
        << "dip_schedule=" << detail::format_dip_schedule(s.dip_schedule) << '\n'
        << "event_emission_prob=" << format_double(s.event_emission_prob) << '\n'
        << "base_notch=" << (s.base_notch ? std::to_string(*s.base_notch) : "random") << '\n'
        << "lookback=" << cfg.preprocess.lookback << '\n'
        << "train_fraction=" << format_double(cfg.preprocess.train_fraction) << '\n'
        << "winsor_k=" << format_double(cfg.preprocess.winsor_k) << '\n'
        << "hidden_size=" << t.hidden_size << '\n'
        << "epochs=" << t.epochs << '\n'
        << "learning_rate=" << format_double(t.adam.learning_rate) << '\n'
        << "beta1=" << format_double(t.adam.beta1) << '\n'
        << "beta2=" << format_double(t.adam.beta2) << '\n'
        << "adam_epsilon=" << format_double(t.adam.epsilon) << '\n'
        << "grad_clip_norm=" << format_double(t.grad_clip_norm) << '\n'
        << "dip_window=" << a.dip_window << '\n'
        << "dip_threshold=" << format_double(a.dip_threshold) << '\n'
        << "match_tolerance=" << a.match_tolerance << '\n'
        << "max_lag=" << a.max_lag << '\n'
        << "allow_early_dates=" << (cfg.allow_early_dates ? "true" : "false") << '\n';
    if (!cfg.calendar.empty()) out << "calendar=" << cfg.calendar << '\n';
}

}  // namespace pubfin
