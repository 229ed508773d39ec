#include "vitalog/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace vitalog {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t lineno,
                            const std::string& what) {
    throw DataError(path.filename().string() + ":" + std::to_string(lineno) +
                    ": " + what);
}

double parse_cell(const std::string& s, const std::filesystem::path& path,
                  std::size_t lineno) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size())
        fail_line(path, lineno, "bad number '" + s + "'");
    return out;
}

Timestamp parse_ts_cell(const std::string& s, const std::filesystem::path& path,
                        std::size_t lineno) {
    try {
        return parse_timestamp(s);
    } catch (const DataError& e) {
        fail_line(path, lineno, e.what());
    }
}

constexpr const char* kExerciseHeader =
    "timestamp,heartrate_bpm,power_w,cadence_rpm,altitude_m,lat,lon";

struct ExerciseColumn {
    std::string stream;
    std::string unit;
};

const std::vector<ExerciseColumn>& exercise_columns() {
    static const std::vector<ExerciseColumn> cols{
        {"Heartrate", "bpm"}, {"Power", "W"}, {"Cadence", "rpm"},
        {"Altitude", "m"},
    };
    return cols;
}

}  // namespace

IngestStats ingest_exercise_csv(const std::filesystem::path& path,
                                Store& store) {
    auto lines = read_lines(path);
    std::string source = path.stem().string();
    IngestStats stats;

    if (lines.empty() || lines[0].rfind("#activity,", 0) != 0)
        fail_line(path, 1, "missing activity header");

    store.register_stream("Heartrate", StreamKind::Real, "bpm");
    store.register_stream("Power", StreamKind::Real, "W");
    store.register_stream("Cadence", StreamKind::Real, "rpm");
    store.register_stream("Altitude", StreamKind::Real, "m");
    store.register_stream("Location", StreamKind::Location, "");

    std::size_t i = 0;
    while (i < lines.size()) {
        if (lines[i].empty()) {
            ++i;
            continue;
        }
        if (lines[i].rfind("#activity,", 0) != 0)
            fail_line(path, i + 1, "expected '#activity,...' block start");
        auto preamble = split_csv(lines[i]);
        if (preamble.size() != 5)
            fail_line(path, i + 1,
                      "activity header needs #activity,<type>,<name>,<start>,<end>");
        std::string event_type = preamble[1];
        std::string event_name = preamble[2];
        Timestamp ev_start = parse_ts_cell(preamble[3], path, i + 1);
        Timestamp ev_end = parse_ts_cell(preamble[4], path, i + 1);
        if (ev_start >= ev_end)
            fail_line(path, i + 1, "activity start must precede end");
        ++i;

        if (i >= lines.size() || lines[i] != kExerciseHeader)
            fail_line(path, i + 1, std::string("expected column header '") +
                                       kExerciseHeader + "'");
        ++i;

        std::map<std::string, std::vector<Sample>> per_stream;
        std::vector<LocationSample> locations;
        while (i < lines.size() && !lines[i].empty() &&
               lines[i].rfind("#activity,", 0) != 0) {
            auto cells = split_csv(lines[i]);
            if (cells.size() != 7)
                fail_line(path, i + 1, "expected 7 cells");
            Timestamp ts = parse_ts_cell(cells[0], path, i + 1);
            const auto& cols = exercise_columns();
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (cells[c + 1].empty()) continue;
                double v = parse_cell(cells[c + 1], path, i + 1);
                per_stream[cols[c].stream].push_back(
                    {ts, v, cols[c].unit, source});
            }
            if (!cells[5].empty() || !cells[6].empty()) {
                if (cells[5].empty() || cells[6].empty())
                    fail_line(path, i + 1, "lat and lon must both be present");
                LocationSample loc{ts, parse_cell(cells[5], path, i + 1),
                                   parse_cell(cells[6], path, i + 1), source};
                try {
                    validate_location(loc);
                } catch (const DataError& e) {
                    fail_line(path, i + 1, e.what());
                }
                locations.push_back(std::move(loc));
            }
            ++i;
        }

        EventRecord event;
        event.event_type = event_type;
        event.event_name = event_name;
        event.interval = {ev_start, ev_end};
        event.parameters["source"] = source;
        for (const auto& [stream, samples] : per_stream)
            event.stream_refs.insert(stream);
        if (!locations.empty()) event.stream_refs.insert("Location");

        for (const auto& [stream, samples] : per_stream)
            stats.samples[stream] += store.append_samples(stream, samples);
        if (!locations.empty())
            stats.samples["Location"] += store.append_locations("Location", locations);
        stats.events += store.append_events({&event, 1});
    }
    return stats;
}

IngestStats ingest_health_csv(const std::filesystem::path& path, Store& store) {
    auto lines = read_lines(path);
    std::string source = path.stem().string();
    IngestStats stats;
    if (lines.empty() || lines[0] != "timestamp,stream,value,unit")
        fail_line(path, 1, "expected header 'timestamp,stream,value,unit'");
    std::map<std::string, std::vector<Sample>> per_stream;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto cells = split_csv(lines[i]);
        if (cells.size() != 4) fail_line(path, i + 1, "expected 4 cells");
        Timestamp ts = parse_ts_cell(cells[0], path, i + 1);
        const std::string& stream = cells[1];
        double value = parse_cell(cells[2], path, i + 1);
        const std::string& unit = cells[3];
        if (unit.empty()) fail_line(path, i + 1, "unit must be non-empty");
        try {
            store.register_stream(stream, StreamKind::Real, unit);
        } catch (const Error& e) {
            fail_line(path, i + 1, e.what());
        }
        per_stream[stream].push_back({ts, value, unit, source});
    }
    for (auto& [stream, samples] : per_stream) {
        std::sort(samples.begin(), samples.end(),
                  [](const Sample& a, const Sample& b) {
                      return a.timestamp < b.timestamp;
                  });
        stats.samples[stream] += store.append_samples(stream, samples);
    }
    return stats;
}

IngestStats ingest_location_csv(const std::filesystem::path& path, Store& store) {
    auto lines = read_lines(path);
    IngestStats stats;
    if (lines.empty() || lines[0] != "timestamp,lat,lon,source")
        fail_line(path, 1, "expected header 'timestamp,lat,lon,source'");
    store.register_stream("Location", StreamKind::Location, "");
    std::vector<LocationSample> samples;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto cells = split_csv(lines[i]);
        if (cells.size() != 4) fail_line(path, i + 1, "expected 4 cells");
        LocationSample s{parse_ts_cell(cells[0], path, i + 1),
                         parse_cell(cells[1], path, i + 1),
                         parse_cell(cells[2], path, i + 1), cells[3]};
        try {
            validate_location(s);
        } catch (const DataError& e) {
            fail_line(path, i + 1, e.what());
        }
        samples.push_back(std::move(s));
    }
    std::sort(samples.begin(), samples.end(),
              [](const LocationSample& a, const LocationSample& b) {
                  return a.timestamp < b.timestamp;
              });
    stats.samples["Location"] += store.append_locations("Location", samples);
    return stats;
}

StationTable ingest_stations(const std::filesystem::path& stations_path,
                             const std::filesystem::path& readings_path) {
    auto slines = read_lines(stations_path);
    if (slines.empty() || slines[0] != "station_id,lat,lon")
        fail_line(stations_path, 1, "expected header 'station_id,lat,lon'");
    std::vector<Station> stations;
    for (std::size_t i = 1; i < slines.size(); ++i) {
        if (slines[i].empty()) continue;
        auto cells = split_csv(slines[i]);
        if (cells.size() != 3) fail_line(stations_path, i + 1, "expected 3 cells");
        stations.push_back({cells[0], parse_cell(cells[1], stations_path, i + 1),
                            parse_cell(cells[2], stations_path, i + 1)});
    }

    auto rlines = read_lines(readings_path);
    if (rlines.empty() || rlines[0] != "station_id,timestamp,pm25_ugm3")
        fail_line(readings_path, 1,
                  "expected header 'station_id,timestamp,pm25_ugm3'");
    std::vector<StationReading> readings;
    for (std::size_t i = 1; i < rlines.size(); ++i) {
        if (rlines[i].empty()) continue;
        auto cells = split_csv(rlines[i]);
        if (cells.size() != 3) fail_line(readings_path, i + 1, "expected 3 cells");
        readings.push_back({cells[0], parse_ts_cell(cells[1], readings_path, i + 1),
                            parse_cell(cells[2], readings_path, i + 1)});
    }
    return StationTable(std::move(stations), std::move(readings));
}

}  // namespace vitalog
