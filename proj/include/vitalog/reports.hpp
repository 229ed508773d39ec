#pragma once

#include <string>
#include <vector>

#include "vitalog/store.hpp"

namespace vitalog {

struct IsoWeek {
    int year = 0;
    int week = 0;  // 1..53
    bool operator==(const IsoWeek& o) const = default;
    auto operator<=>(const IsoWeek& o) const = default;
};

// ISO-8601 week of the UTC date containing ts.
IsoWeek iso_week_of(Timestamp ts);
// Number of ISO weeks in the given ISO year (52 or 53).
int iso_weeks_in_year(int year);
// "2019-W23"
std::string iso_week_label(const IsoWeek& w);

struct WeeklyReportRow {
    IsoWeek week;
    std::size_t event_count = 0;
    double total_minutes = 0.0;
};

// One row per ISO week of the year, zero-filled. Events are bucketed by
// start; an event spanning a week boundary counts in its start week with its
// full duration.
std::vector<WeeklyReportRow> report_weekly(const std::string& event_type,
                                           int year, const Store& store);

struct PolarRow {
    int day_index = 0;           // day of year, 1..366
    double start_fraction = 0.0;  // fraction of day in [0, 1)
    double end_fraction = 0.0;    // (0, 1]
    std::string event_type;
};

// One row per event arc within the year; events crossing midnight split at
// each midnight. Sorted by (day_index, start_fraction).
std::vector<PolarRow> export_polar(const std::string& event_type, int year,
                                   const Store& store);

std::string weekly_csv(const std::vector<WeeklyReportRow>& rows);
std::string polar_csv(const std::vector<PolarRow>& rows);

}  // namespace vitalog
