#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/format.hpp"
#include "pubfin/ratings.hpp"

namespace pubfin {

struct IngestOptions {
    bool allow_early_dates = false;  // accept events before kDataStart
};

inline constexpr std::string_view kEventsHeader = "entity_id,region,date,rating";
inline constexpr std::string_view kPanelHeader = "month,region,index,change,coverage";

namespace detail {
inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        fields.push_back(trim(line.substr(pos, comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return fields;
}
}  // namespace detail

/// Reads the rating-event CSV. Duplicate (entity_id, date) rows keep the last
/// occurrence in file order; survivors keep their relative file order.
inline std::vector<RatingEvent> read_events_csv(std::istream& in, const IngestOptions& opts = {}) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInput("events file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // tolerate a UTF-8 byte-order mark
    std::string_view header = line;
    if (header.starts_with("\xEF\xBB\xBF")) header.remove_prefix(3);
    if (trim(header) != kEventsHeader)
        throw DataError("events header must be '" + std::string(kEventsHeader) + "', got '" + line + "'");

    std::vector<RatingEvent> rows;
    std::map<std::string, Region> entity_region;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 4) throw DataError(where() + "expected 4 fields, got " + std::to_string(fields.size()));

        RatingEvent e;
        e.entity_id = std::string(fields[0]);
        if (e.entity_id.empty()) throw DataError(where() + "empty entity_id");
        const auto region = parse_region(fields[1]);
        if (!region) throw DataError(where() + "region must be US or INTL, got '" + std::string(fields[1]) + "'");
        e.region = *region;
        const auto date = parse_date(fields[2]);
        if (!date) throw DataError(where() + "bad date '" + std::string(fields[2]) + "'");
        if (*date < kDataStart && !opts.allow_early_dates)
            throw DataError(where() + "date " + std::string(fields[2]) + " precedes 2010-11-01");
        e.date = *date;
        try {
            e.grade = parse_rating(fields[3]);
        } catch (const UnknownGrade& err) {
            throw DataError(where() + err.what());
        }

        const auto [it, inserted] = entity_region.emplace(e.entity_id, e.region);
        if (!inserted && it->second != e.region)
            throw MixedEntity(where() + "entity '" + e.entity_id + "' appears in both regions");
        rows.push_back(std::move(e));
    }

    std::map<std::pair<std::string, Date>, std::size_t> last_seen;
    for (std::size_t i = 0; i < rows.size(); ++i) last_seen[{rows[i].entity_id, rows[i].date}] = i;
    std::vector<RatingEvent> out;
    out.reserve(last_seen.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (last_seen[{rows[i].entity_id, rows[i].date}] == i) out.push_back(std::move(rows[i]));
    return out;
}

inline void write_events_csv(std::ostream& out, std::span<const RatingEvent> events) {
    out << kEventsHeader << '\n';
    for (const auto& e : events)
        out << e.entity_id << ',' << region_name(e.region) << ',' << to_string(e.date) << ','
            << grade_symbol(e.grade) << '\n';
}

inline void write_panel_rows(std::ostream& out, const RegionPanel& p) {
    for (std::size_t t = 0; t < p.grid.size(); ++t)
        out << to_string(p.grid[t]) << ',' << region_name(p.region) << ',' << format_double(p.index[t]) << ','
            << format_double(p.change[t]) << ',' << p.coverage[t] << '\n';
}

inline void write_panel_csv(std::ostream& out, std::span<const RegionPanel> panels) {
    out << kPanelHeader << '\n';
    for (const auto& p : panels) write_panel_rows(out, p);
}

}  // namespace pubfin
