#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/format.hpp"

namespace pubfin {

// ---------------------------------------------------------------------------
// Grades and the notch scale
// ---------------------------------------------------------------------------

/// S&P long-term grades. The enumerator value is the notch: D = 0 ... AAA = 21.
enum class Grade : std::uint8_t {
    D, C, CC, CCC_minus, CCC, CCC_plus, B_minus, B, B_plus, BB_minus, BB, BB_plus,
    BBB_minus, BBB, BBB_plus, A_minus, A, A_plus, AA_minus, AA, AA_plus, AAA,
};

inline constexpr int kGradeCount = 22;
inline constexpr int kMaxNotch = kGradeCount - 1;

namespace detail {
inline constexpr std::array<std::string_view, kGradeCount> kSymbolsByNotch = {
    "D",  "C",   "CC", "CCC-", "CCC", "CCC+", "B-",   "B",   "B+", "BB-", "BB",
    "BB+", "BBB-", "BBB", "BBB+", "A-", "A",    "A+", "AA-", "AA", "AA+", "AAA",
};
}  // namespace detail

constexpr int grade_to_notch(Grade g) noexcept { return static_cast<int>(g); }

inline Grade notch_to_grade(int notch) {
    if (notch < 0 || notch > kMaxNotch)
        throw OutOfRange("notch " + std::to_string(notch) + " outside [0, 21]");
    return static_cast<Grade>(notch);
}

constexpr std::string_view grade_symbol(Grade g) noexcept {
    return detail::kSymbolsByNotch[static_cast<std::size_t>(g)];
}

/// Case-insensitive match after trimming. Anything else (watch suffixes,
/// "u"/"sf" modifiers, outlooks) is rejected.
inline Grade parse_rating(std::string_view text) {
    const std::string_view t = trim(text);
    std::string upper(t);
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (int n = 0; n < kGradeCount; ++n)
        if (detail::kSymbolsByNotch[static_cast<std::size_t>(n)] == upper) return static_cast<Grade>(n);
    throw UnknownGrade(std::string(text));
}

// ---------------------------------------------------------------------------
// Calendar
// ---------------------------------------------------------------------------

using Date = std::chrono::year_month_day;

/// Calendar month; ordered by (year, month).
struct Month {
    int year = 1970;
    int month = 1;  // 1..12

    constexpr int ordinal() const noexcept { return year * 12 + (month - 1); }
    static constexpr Month from_ordinal(int ord) noexcept {
        const int y = ord >= 0 ? ord / 12 : (ord - 11) / 12;
        return Month{y, ord - y * 12 + 1};
    }
    static Month of(const Date& d) noexcept {
        return Month{static_cast<int>(d.year()), static_cast<int>(static_cast<unsigned>(d.month()))};
    }
    constexpr Month plus(int months) const noexcept { return from_ordinal(ordinal() + months); }

    friend constexpr bool operator==(Month a, Month b) noexcept { return a.ordinal() == b.ordinal(); }
    friend constexpr auto operator<=>(Month a, Month b) noexcept { return a.ordinal() <=> b.ordinal(); }
};

/// Signed number of months from `a` to `b`.
constexpr int months_between(Month a, Month b) noexcept { return b.ordinal() - a.ordinal(); }

inline std::string to_string(Month m) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", m.year, m.month);
    return buf;
}

inline std::string to_string(const Date& d) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

/// Strict `YYYY-MM`.
inline std::optional<Month> parse_month(std::string_view text) {
    text = trim(text);
    if (text.size() != 7 || text[4] != '-') return std::nullopt;
    int y = 0, m = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m)) return std::nullopt;
    if (m < 1 || m > 12) return std::nullopt;
    return Month{y, m};
}

/// Strict ISO-8601 `YYYY-MM-DD`, validated against the calendar.
inline std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d))
        return std::nullopt;
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

/// First day of the source data; earlier events are rejected unless overridden.
inline constexpr Date kDataStart{std::chrono::year{2010}, std::chrono::November, std::chrono::day{1}};

// ---------------------------------------------------------------------------
// Events, grid, series, panels
// ---------------------------------------------------------------------------

enum class Region { US, INTL };

constexpr std::string_view region_name(Region r) noexcept { return r == Region::US ? "US" : "INTL"; }

inline std::optional<Region> parse_region(std::string_view text) {
    text = trim(text);
    if (text == "US") return Region::US;
    if (text == "INTL") return Region::INTL;
    return std::nullopt;
}

struct RatingEvent {
    std::string entity_id;
    Region region = Region::US;
    Date date{};
    Grade grade = Grade::D;

    friend bool operator==(const RatingEvent&, const RatingEvent&) = default;
};

/// Inclusive run of consecutive calendar months.
class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(Month start, Month end) : start_(start) {
        if (end < start) throw DataError("time grid end precedes start");
        count_ = static_cast<std::size_t>(months_between(start, end)) + 1;
    }

    Month start() const noexcept { return start_; }
    Month end() const noexcept { return start_.plus(static_cast<int>(count_) - 1); }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    Month operator[](std::size_t i) const noexcept { return start_.plus(static_cast<int>(i)); }

    std::vector<Month> points() const {
        std::vector<Month> out;
        out.reserve(count_);
        for (std::size_t i = 0; i < count_; ++i) out.push_back((*this)[i]);
        return out;
    }

    /// Grid position of `m`, if it falls on the grid.
    std::optional<std::size_t> index_of(Month m) const noexcept {
        const int k = months_between(start_, m);
        if (k < 0 || static_cast<std::size_t>(k) >= count_) return std::nullopt;
        return static_cast<std::size_t>(k);
    }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
        return a.count_ == b.count_ && (a.count_ == 0 || a.start_ == b.start_);
    }

private:
    Month start_{};
    std::size_t count_ = 0;
};

struct EntitySeries {
    std::string entity_id;
    Region region = Region::US;
    std::vector<std::optional<int>> values;  // one per grid point
};

struct RegionPanel {
    Region region = Region::US;
    TimeGrid grid;
    std::vector<double> index;   // mean notch
    std::vector<double> change;  // first difference, change[0] == 0
    std::vector<int> coverage;   // contributing entities
};

/// Monthly grid from the earliest to the latest event month.
inline TimeGrid build_time_grid(std::span<const RatingEvent> events) {
    if (events.empty()) throw EmptyInput("no rating events");
    auto [lo, hi] = std::minmax_element(events.begin(), events.end(),
                                        [](const auto& a, const auto& b) { return a.date < b.date; });
    return TimeGrid(Month::of(lo->date), Month::of(hi->date));
}

/// Carries each entity's latest rating forward month by month. The value at
/// month m is the notch of the latest event dated on or before the end of m;
/// within one date the last event in input order wins.
inline EntitySeries forward_fill_entity(std::span<const RatingEvent> events, const TimeGrid& grid) {
    EntitySeries out;
    out.values.assign(grid.size(), std::nullopt);
    if (events.empty()) return out;

    out.entity_id = events.front().entity_id;
    out.region = events.front().region;
    for (const auto& e : events)
        if (e.entity_id != out.entity_id)
            throw MixedEntity("events for '" + out.entity_id + "' and '" + e.entity_id + "' mixed");

    std::vector<const RatingEvent*> sorted;
    sorted.reserve(events.size());
    for (const auto& e : events) sorted.push_back(&e);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const RatingEvent* a, const RatingEvent* b) { return a->date < b->date; });

    std::size_t next = 0;
    std::optional<int> current;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Month m = grid[i];
        while (next < sorted.size() && Month::of(sorted[next]->date) <= m) {
            current = grade_to_notch(sorted[next]->grade);
            ++next;
        }
        out.values[i] = current;
    }
    return out;
}

/// Unweighted mean notch across entities with data; leading months with no
/// coverage are trimmed off the panel.
inline RegionPanel aggregate_region(std::span<const EntitySeries> series, const TimeGrid& grid, Region region) {
    const std::size_t n = grid.size();
    std::vector<double> sum(n, 0.0);
    std::vector<int> count(n, 0);
    for (const auto& s : series) {
        if (s.region != region)
            throw MixedEntity("entity '" + s.entity_id + "' does not belong to region " +
                              std::string(region_name(region)));
        if (s.values.size() != n) throw LengthMismatch("entity series length differs from grid");
        for (std::size_t t = 0; t < n; ++t)
            if (s.values[t]) {
                sum[t] += *s.values[t];
                ++count[t];
            }
    }

    std::size_t head = 0;
    while (head < n && count[head] == 0) ++head;
    if (head == n) throw NoData("region " + std::string(region_name(region)) + " has no rated months");

    RegionPanel panel;
    panel.region = region;
    panel.grid = TimeGrid(grid[head], grid.end());
    for (std::size_t t = head; t < n; ++t) {
        panel.coverage.push_back(count[t]);
        panel.index.push_back(count[t] > 0 ? sum[t] / count[t] : panel.index.back());
    }
    panel.change.assign(panel.index.size(), 0.0);
    for (std::size_t t = 1; t < panel.index.size(); ++t) panel.change[t] = panel.index[t] - panel.index[t - 1];
    return panel;
}

/// Groups `events` by entity for one region, forward fills each entity on
/// `grid`, and aggregates.
inline RegionPanel build_region_panel(std::span<const RatingEvent> events, const TimeGrid& grid, Region region) {
    std::map<std::string, std::vector<RatingEvent>> by_entity;
    for (const auto& e : events)
        if (e.region == region) by_entity[e.entity_id].push_back(e);
    if (by_entity.empty()) throw NoData("no events for region " + std::string(region_name(region)));

    std::vector<EntitySeries> series;
    series.reserve(by_entity.size());
    for (const auto& [id, evs] : by_entity) series.push_back(forward_fill_entity(evs, grid));
    return aggregate_region(series, grid, region);
}

/// Both region panels on the grid spanned by all events.
inline std::pair<RegionPanel, RegionPanel> build_panels(std::span<const RatingEvent> events) {
    const TimeGrid grid = build_time_grid(events);
    return {build_region_panel(events, grid, Region::US), build_region_panel(events, grid, Region::INTL)};
}

}  // namespace pubfin
