#include "vitalog/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vitalog {

// Howard Hinnant's civil calendar algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, unsigned& month, unsigned& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = doy - (153 * mp + 2) / 5 + 1;
    month = mp + (mp < 10 ? 3 : -9);
    year = static_cast<int>(y + (month <= 2));
}

Timestamp parse_timestamp(const std::string& text) {
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%d-%2u-%2uT%2u:%2u:%2u%n", &y, &mo, &d, &h,
                    &mi, &s, &consumed) != 6) {
        throw DataError("invalid timestamp: '" + text + "'");
    }
    std::string rest = text.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest[0] == '.') {
        std::size_t i = 1;
        while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
        if (i == 1) throw DataError("invalid timestamp: '" + text + "'");
        rest = rest.substr(i);
    }
    if (rest != "Z" && rest != "+00:00")
        throw DataError("timestamp must be UTC ('Z'): '" + text + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60)
        throw DataError("timestamp field out of range: '" + text + "'");
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_timestamp(Timestamp ts) {
    std::int64_t days = ts / 86400;
    std::int64_t sod = ts % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int y;
    unsigned mo, d;
    civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y,
                  mo, d, static_cast<long long>(sod / 3600),
                  static_cast<long long>(sod / 60 % 60),
                  static_cast<long long>(sod % 60));
    return buf;
}

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
    for (const Interval& iv : intervals) {
        if (iv.start >= iv.end)
            throw DataError("interval start must precede end: [" +
                            format_timestamp(iv.start) + ", " +
                            format_timestamp(iv.end) + ")");
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) {
                  return a.start < b.start || (a.start == b.start && a.end < b.end);
              });
    for (const Interval& iv : intervals) {
        if (!intervals_.empty() && iv.start <= intervals_.back().end) {
            intervals_.back().end = std::max(intervals_.back().end, iv.end);
        } else {
            intervals_.push_back(iv);
        }
    }
}

bool IntervalSet::contains(Timestamp t) const {
    auto it = std::upper_bound(
        intervals_.begin(), intervals_.end(), t,
        [](Timestamp v, const Interval& iv) { return v < iv.start; });
    if (it == intervals_.begin()) return false;
    --it;
    return t < it->end;
}

Duration IntervalSet::total_duration() const {
    Duration total = 0;
    for (const Interval& iv : intervals_) total += iv.length();
    return total;
}

IntervalSet normalize(std::vector<Interval> intervals) {
    return IntervalSet(std::move(intervals));
}

Duration total_duration(const IntervalSet& s) { return s.total_duration(); }

void validate_sample(const Sample& s) {
    if (!std::isfinite(s.value))
        throw DataError("sample value must be finite (stream at " +
                        format_timestamp(s.timestamp) + ")");
    if (s.unit.empty())
        throw DataError("sample unit must be non-empty (at " +
                        format_timestamp(s.timestamp) + ")");
}

void validate_location(const LocationSample& s) {
    if (!std::isfinite(s.latitude) || s.latitude < -90.0 || s.latitude > 90.0)
        throw DataError("latitude out of range at " +
                        format_timestamp(s.timestamp));
    if (!std::isfinite(s.longitude) || s.longitude < -180.0 ||
        s.longitude > 180.0)
        throw DataError("longitude out of range at " +
                        format_timestamp(s.timestamp));
}

}  // namespace vitalog
