#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/format.hpp"
#include "pubfin/prng.hpp"
#include "pubfin/ratings.hpp"

namespace pubfin::synth {

struct DipSpec {
    Month month;
    double depth = 1.0;  // notches

    friend bool operator==(const DipSpec&, const DipSpec&) = default;
};

inline std::vector<DipSpec> default_dip_schedule() {
    return {{{2011, 8}, 1.0}, {{2013, 8}, 1.0}, {{2013, 10}, 1.0},
            {{2015, 8}, 1.0}, {{2018, 1}, 1.0}, {{2020, 3}, 1.0}};
}

struct SynthConfig {
    std::uint64_t seed = 42;
    Month start{2010, 11};
    int months = 122;
    int entities_per_region = 50;
    int lag_months = 3;
    double noise_std = 0.1;
    std::vector<DipSpec> dip_schedule = default_dip_schedule();
    double event_emission_prob = 1.0;
    std::optional<int> base_notch;  // fixed base grade for every entity; uniform in [8, 21] when unset
};

inline constexpr double kDriverPersistence = 0.8;
inline constexpr double kDriverInnovationStd = 0.3;

inline void validate(const SynthConfig& cfg) {
    if (cfg.months < 1) throw InvalidConfig("months must be at least 1");
    if (cfg.entities_per_region < 1) throw InvalidConfig("entities_per_region must be at least 1");
    if (cfg.lag_months < 0 || 4 * cfg.lag_months >= cfg.months)
        throw InvalidConfig("lag_months must satisfy 0 <= lag < months/4");
    if (!(cfg.noise_std >= 0.0)) throw InvalidConfig("noise_std must be non-negative");
    if (!(cfg.event_emission_prob >= 0.0 && cfg.event_emission_prob <= 1.0))
        throw InvalidConfig("event_emission_prob must lie in [0, 1]");
    if (cfg.base_notch && (*cfg.base_notch < 0 || *cfg.base_notch > kMaxNotch))
        throw InvalidConfig("base_notch must lie in [0, 21]");
    if (Date{std::chrono::year{cfg.start.year}, std::chrono::month{static_cast<unsigned>(cfg.start.month)},
             std::chrono::day{1}} < kDataStart)
        throw InvalidConfig("start month precedes 2010-11");
    const Month last = cfg.start.plus(cfg.months - 1);
    for (const auto& d : cfg.dip_schedule) {
        if (!(d.depth > 0.0)) throw InvalidConfig("dip depth at " + to_string(d.month) + " must be positive");
        if (d.month < cfg.start || d.month > last)
            throw InvalidConfig("dip month " + to_string(d.month) + " outside generated span " +
                                to_string(cfg.start) + ".." + to_string(last));
    }
}

struct GroundTruth {
    int true_lag = 0;
    std::vector<DipSpec> dips;
    std::vector<double> driver;  // latent US driver, one value per month
};

struct SynthOutput {
    std::vector<RatingEvent> events;
    GroundTruth truth;
};

/// Generates rating events from a latent AR(1) driver with scheduled dip
/// impulses. US entity notch = clamp(round(base + round(d[t]) + noise));
/// INTL entities follow d[t - lag] (0 before the lag). An event is emitted at
/// the first month and whenever the notch differs from the last emitted one
/// (with probability event_emission_prob).
///
/// PRNG draw order: one Gaussian per month for the driver; then per region
/// (US, INTL) and entity: the base grade (unless fixed), then per month one
/// Gaussian of noise, one uniform for the emission decision when the notch
/// changed (months after the first), and one day-of-month draw per emitted
/// event.
inline SynthOutput generate_panel(const SynthConfig& cfg) {
    validate(cfg);
    Prng rng(cfg.seed);
    const auto T = static_cast<std::size_t>(cfg.months);

    std::vector<double> impulse(T, 0.0);
    for (const auto& d : cfg.dip_schedule)
        impulse[static_cast<std::size_t>(months_between(cfg.start, d.month))] -= d.depth;

    SynthOutput out;
    out.truth.true_lag = cfg.lag_months;
    out.truth.dips = cfg.dip_schedule;
    auto& driver = out.truth.driver;
    driver.resize(T);
    double prev = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        driver[t] = kDriverPersistence * prev + kDriverInnovationStd * rng.next_gaussian() + impulse[t];
        prev = driver[t];
    }

    const auto L = static_cast<std::size_t>(cfg.lag_months);
    for (Region region : {Region::US, Region::INTL}) {
        for (int e = 0; e < cfg.entities_per_region; ++e) {
            char id[32];
            std::snprintf(id, sizeof(id), "%s-E%04d", region == Region::US ? "US" : "INTL", e);
            const int base = cfg.base_notch ? *cfg.base_notch : 8 + static_cast<int>(rng.next_below(14));
            std::optional<int> last_emitted;
            for (std::size_t t = 0; t < T; ++t) {
                double drv = 0.0;
                if (region == Region::US) drv = driver[t];
                else if (t >= L) drv = driver[t - L];
                const double noise = cfg.noise_std * rng.next_gaussian();
                const int notch = std::clamp(static_cast<int>(std::round(base + std::round(drv) + noise)), 0, kMaxNotch);

                bool emit = false;
                if (!last_emitted) emit = true;
                else if (notch != *last_emitted) emit = rng.next_uniform() < cfg.event_emission_prob;
                if (!emit) continue;

                const Month m = cfg.start.plus(static_cast<int>(t));
                const auto day = static_cast<unsigned>(1 + rng.next_below(28));
                out.events.push_back({id, region,
                                      Date{std::chrono::year{m.year}, std::chrono::month{static_cast<unsigned>(m.month)},
                                           std::chrono::day{day}},
                                      notch_to_grade(notch)});
                last_emitted = notch;
            }
        }
    }
    return out;
}

/// `true_lag=<int>` then one `dip=<YYYY-MM>,<depth>` line per scheduled dip.
inline void write_ground_truth(std::ostream& out, const GroundTruth& gt) {
    out << "true_lag=" << gt.true_lag << '\n';
    for (const auto& d : gt.dips) out << "dip=" << to_string(d.month) << ',' << format_double(d.depth) << '\n';
}

}  // namespace pubfin::synth
