#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace vitalog {

// Seconds since the Unix epoch, UTC. All timestamps in the engine are stored
// at 1 s resolution; sub-second input is truncated on parse.
using Timestamp = std::int64_t;
// Span in seconds.
using Duration = std::int64_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (bad file row, unit mismatch, ...).
class DataError : public Error {
public:
    using Error::Error;
};

// Parses "2019-06-01T14:03:00Z". A fractional-second suffix is accepted and
// truncated. Throws DataError on anything else.
Timestamp parse_timestamp(const std::string& text);

std::string format_timestamp(Timestamp ts);

// Gregorian calendar helpers (proleptic, UTC only).
std::int64_t days_from_civil(int year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

struct Sample {
    Timestamp timestamp = 0;
    double value = 0.0;
    std::string unit;
    std::string source;
};

struct LocationSample {
    Timestamp timestamp = 0;
    double latitude = 0.0;
    double longitude = 0.0;
    std::string source;
};

// Half-open [start, end); start < end always.
struct Interval {
    Timestamp start = 0;
    Timestamp end = 0;

    Duration length() const { return end - start; }
    bool operator==(const Interval& o) const = default;
};

// Canonical set of half-open intervals: sorted by start, pairwise disjoint,
// no two adjacent (touching intervals are merged on construction). Two sets
// covering the same time points compare equal structurally.
class IntervalSet {
public:
    IntervalSet() = default;

    // Normalizes arbitrary input. Throws DataError if any interval has
    // start >= end.
    explicit IntervalSet(std::vector<Interval> intervals);

    const std::vector<Interval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }

    bool contains(Timestamp t) const;
    Duration total_duration() const;

    bool operator==(const IntervalSet& o) const = default;

    auto begin() const { return intervals_.begin(); }
    auto end() const { return intervals_.end(); }

private:
    std::vector<Interval> intervals_;
};

IntervalSet normalize(std::vector<Interval> intervals);
Duration total_duration(const IntervalSet& s);

using ParamValue = std::variant<double, std::string>;

struct EventRecord {
    std::string event_type;
    std::string event_name;
    Interval interval;
    std::map<std::string, ParamValue> parameters;
    std::set<std::string> stream_refs;
};

// Names a stored data stream or event type ("Heartrate", "Cycling", ...).
struct StreamRef {
    std::string id;
};

// Throws DataError unless the sample's value is finite and the unit non-empty.
void validate_sample(const Sample& s);
// Throws DataError unless coordinates are in range.
void validate_location(const LocationSample& s);

}  // namespace vitalog
