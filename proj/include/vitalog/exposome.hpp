#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vitalog/core.hpp"

namespace vitalog {

struct Station {
    std::string station_id;
    double latitude = 0.0;
    double longitude = 0.0;
};

struct StationReading {
    std::string station_id;
    Timestamp timestamp = 0;  // hour bucket start
    double pm25 = 0.0;        // ug/m3, finite and >= 0
};

// Immutable after load; lookups are read-only.
class StationTable {
public:
    StationTable() = default;
    // Throws DataError if a reading references an unknown station or a value
    // is negative/non-finite. Readings are bucketed by floor-to-hour.
    StationTable(std::vector<Station> stations,
                 std::vector<StationReading> readings);

    const std::vector<Station>& stations() const { return stations_; }
    // Per-station time-sorted readings.
    const std::vector<StationReading>& readings(const std::string& id) const;
    std::size_t reading_count() const { return reading_count_; }

    // Reading value for the hour bucket containing t, if any.
    std::optional<double> reading_at(const std::string& station_id,
                                     Timestamp t) const;

private:
    std::vector<Station> stations_;
    std::map<std::string, std::vector<StationReading>> by_station_;
    std::size_t reading_count_ = 0;
};

// Great-circle distance, Earth radius 6371.0 km.
double haversine_km(double lat1, double lon1, double lat2, double lon2);

// Station minimizing haversine distance; nothing if the minimum exceeds
// max_km or the table is empty. Ties break to the lexicographically smallest
// station_id.
std::optional<Station> nearest_station(double lat, double lon,
                                       const StationTable& table,
                                       double max_km = 50.0);

// For each location sample: nearest station, then that station's reading for
// the hour bucket containing the timestamp. Emits nothing for samples with no
// station within max_km or no reading in that hour. Output unit is ug/m3 and
// the source names the station.
std::vector<Sample> concentration_stream(std::span<const LocationSample> loc,
                                         const StationTable& table,
                                         double max_km = 50.0);

}  // namespace vitalog
