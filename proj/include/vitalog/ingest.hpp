#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "vitalog/exposome.hpp"
#include "vitalog/store.hpp"

namespace vitalog {

// Records actually written, after store-level dedup; re-ingesting the same
// file therefore reports zeros.
struct IngestStats {
    std::size_t events = 0;
    std::map<std::string, std::size_t> samples;  // per stream

    std::size_t total_samples() const {
        std::size_t n = 0;
        for (const auto& [id, count] : samples) n += count;
        return n;
    }
};

// Per-second exercise export. One or more activity blocks:
//   #activity,<type>,<name>,<start>,<end>
//   timestamp,heartrate_bpm,power_w,cadence_rpm,altitude_m,lat,lon
//   <rows with empty cells for absent channels>
// Emits one EventRecord per block plus per-second samples; the sample source
// is the file stem. Errors name the offending line.
IngestStats ingest_exercise_csv(const std::filesystem::path& path, Store& store);

// Sparse daily-health export: header then rows `timestamp,stream,value,unit`.
// New streams are registered with the row's unit; a unit differing from the
// registry is an error.
IngestStats ingest_health_csv(const std::filesystem::path& path, Store& store);

// Location history: header then rows `timestamp,lat,lon,source`.
IngestStats ingest_location_csv(const std::filesystem::path& path, Store& store);

// stations.csv (station_id,lat,lon) + readings.csv
// (station_id,timestamp,pm25_ugm3) -> validated StationTable.
StationTable ingest_stations(const std::filesystem::path& stations_path,
                             const std::filesystem::path& readings_path);

}  // namespace vitalog
