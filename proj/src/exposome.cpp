#include "vitalog/exposome.hpp"

#include <algorithm>
#include <cmath>

namespace vitalog {

namespace {
constexpr double kEarthRadiusKm = 6371.0;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

Timestamp hour_floor(Timestamp t) {
    Timestamp h = t / 3600;
    if (t < 0 && t % 3600 != 0) --h;
    return h * 3600;
}
}  // namespace

StationTable::StationTable(std::vector<Station> stations,
                           std::vector<StationReading> readings)
    : stations_(std::move(stations)) {
    for (const Station& s : stations_) {
        LocationSample probe{0, s.latitude, s.longitude, s.station_id};
        validate_location(probe);
        by_station_[s.station_id];
    }
    for (StationReading& r : readings) {
        auto it = by_station_.find(r.station_id);
        if (it == by_station_.end())
            throw DataError("reading references unknown station '" +
                            r.station_id + "'");
        if (!std::isfinite(r.pm25) || r.pm25 < 0.0)
            throw DataError("pm25 reading must be finite and non-negative "
                            "(station '" + r.station_id + "')");
        r.timestamp = hour_floor(r.timestamp);
        it->second.push_back(std::move(r));
    }
    for (auto& [id, rs] : by_station_) {
        std::sort(rs.begin(), rs.end(),
                  [](const StationReading& a, const StationReading& b) {
                      return a.timestamp < b.timestamp;
                  });
        reading_count_ += rs.size();
    }
}

const std::vector<StationReading>& StationTable::readings(
    const std::string& id) const {
    static const std::vector<StationReading> empty;
    auto it = by_station_.find(id);
    return it == by_station_.end() ? empty : it->second;
}

std::optional<double> StationTable::reading_at(const std::string& station_id,
                                               Timestamp t) const {
    auto it = by_station_.find(station_id);
    if (it == by_station_.end()) return std::nullopt;
    Timestamp bucket = hour_floor(t);
    const auto& rs = it->second;
    auto pos = std::lower_bound(rs.begin(), rs.end(), bucket,
                                [](const StationReading& r, Timestamp b) {
                                    return r.timestamp < b;
                                });
    if (pos == rs.end() || pos->timestamp != bucket) return std::nullopt;
    return pos->pm25;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
    double phi1 = lat1 * kDegToRad;
    double phi2 = lat2 * kDegToRad;
    double dphi = (lat2 - lat1) * kDegToRad;
    double dlam = (lon2 - lon1) * kDegToRad;
    double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
               std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) *
                   std::sin(dlam / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

std::optional<Station> nearest_station(double lat, double lon,
                                       const StationTable& table,
                                       double max_km) {
    std::optional<Station> best;
    double best_km = 0.0;
    for (const Station& s : table.stations()) {
        double km = haversine_km(lat, lon, s.latitude, s.longitude);
        if (!best || km < best_km ||
            (km == best_km && s.station_id < best->station_id)) {
            best = s;
            best_km = km;
        }
    }
    if (!best || best_km > max_km) return std::nullopt;
    return best;
}

std::vector<Sample> concentration_stream(std::span<const LocationSample> loc,
                                         const StationTable& table,
                                         double max_km) {
    std::vector<Sample> out;
    for (const LocationSample& p : loc) {
        auto station = nearest_station(p.latitude, p.longitude, table, max_km);
        if (!station) continue;
        auto value = table.reading_at(station->station_id, p.timestamp);
        if (!value) continue;
        out.push_back({p.timestamp, *value, "ug/m3", station->station_id});
    }
    return out;
}

}  // namespace vitalog
