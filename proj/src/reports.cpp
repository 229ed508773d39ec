#include "vitalog/reports.hpp"

#include <algorithm>
#include <cstdio>

#include "vitalog/algebra.hpp"

namespace vitalog {

namespace {

std::int64_t day_of(Timestamp ts) {
    std::int64_t d = ts / 86400;
    if (ts < 0 && ts % 86400 != 0) --d;
    return d;
}

// Monday = 0; day 0 (1970-01-01) was a Thursday.
int weekday_mon0(std::int64_t days) {
    return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

}  // namespace

IsoWeek iso_week_of(Timestamp ts) {
    std::int64_t days = day_of(ts);
    std::int64_t thursday = days - weekday_mon0(days) + 3;
    int y;
    unsigned m, d;
    civil_from_days(thursday, y, m, d);
    std::int64_t jan1 = days_from_civil(y, 1, 1);
    int week = static_cast<int>((thursday - jan1) / 7) + 1;
    return {y, week};
}

int iso_weeks_in_year(int year) {
    // The last ISO week of a year is the week containing Dec 28.
    return iso_week_of(days_from_civil(year, 12, 28) * 86400).week;
}

std::string iso_week_label(const IsoWeek& w) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-W%02d", w.year, w.week);
    return buf;
}

std::vector<WeeklyReportRow> report_weekly(const std::string& event_type,
                                           int year, const Store& store) {
    std::vector<WeeklyReportRow> rows;
    int weeks = iso_weeks_in_year(year);
    rows.reserve(static_cast<std::size_t>(weeks));
    for (int w = 1; w <= weeks; ++w) rows.push_back({{year, w}, 0, 0.0});

    // ISO year edges spill into the neighboring calendar years.
    Timestamp lo = (days_from_civil(year, 1, 1) - 7) * 86400;
    Timestamp hi = (days_from_civil(year + 1, 1, 1) + 7) * 86400;
    for (const EventRecord& e : store.query_events(event_type, Window{lo, hi})) {
        IsoWeek w = iso_week_of(e.interval.start);
        if (w.year != year) continue;
        WeeklyReportRow& row = rows[static_cast<std::size_t>(w.week - 1)];
        row.event_count += 1;
        row.total_minutes += static_cast<double>(e.interval.length()) / 60.0;
    }
    return rows;
}

std::vector<PolarRow> export_polar(const std::string& event_type, int year,
                                   const Store& store) {
    Timestamp year_start = days_from_civil(year, 1, 1) * 86400;
    Timestamp year_end = days_from_civil(year + 1, 1, 1) * 86400;
    std::vector<PolarRow> rows;
    for (const EventRecord& e :
         store.query_events(event_type, Window{year_start, year_end})) {
        Timestamp lo = std::max(e.interval.start, year_start);
        Timestamp hi = std::min(e.interval.end, year_end);
        while (lo < hi) {
            std::int64_t day = day_of(lo);
            Timestamp midnight = (day + 1) * 86400;
            Timestamp arc_end = std::min(hi, midnight);
            PolarRow row;
            row.day_index =
                static_cast<int>(day - days_from_civil(year, 1, 1)) + 1;
            row.start_fraction =
                static_cast<double>(lo - day * 86400) / 86400.0;
            row.end_fraction =
                arc_end == midnight
                    ? 1.0
                    : static_cast<double>(arc_end - day * 86400) / 86400.0;
            row.event_type = e.event_type;
            rows.push_back(std::move(row));
            lo = arc_end;
        }
    }
    std::sort(rows.begin(), rows.end(), [](const PolarRow& a, const PolarRow& b) {
        return a.day_index < b.day_index ||
               (a.day_index == b.day_index && a.start_fraction < b.start_fraction);
    });
    return rows;
}

std::string weekly_csv(const std::vector<WeeklyReportRow>& rows) {
    std::string out = "iso_week,event_count,total_minutes\n";
    for (const WeeklyReportRow& r : rows) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%zu,%.10g", r.event_count,
                      r.total_minutes);
        out += iso_week_label(r.week) + "," + buf + "\n";
    }
    return out;
}

std::string polar_csv(const std::vector<PolarRow>& rows) {
    std::string out = "day_index,start_fraction,end_fraction,event_type\n";
    for (const PolarRow& r : rows) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%d,%.8f,%.8f,", r.day_index,
                      r.start_fraction, r.end_fraction);
        out += buf + r.event_type + "\n";
    }
    return out;
}

}  // namespace vitalog
