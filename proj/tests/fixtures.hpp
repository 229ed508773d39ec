#pragma once

// Deterministic synthetic fixtures shared by the unit and acceptance suites.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vitalog/core.hpp"
#include "vitalog/store.hpp"

namespace fixtures {

using namespace vitalog;

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("vitalog_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::vector<Sample> constant_series(Timestamp t0, Timestamp t1,
                                           Duration step, double value,
                                           const std::string& unit,
                                           const std::string& source) {
    std::vector<Sample> out;
    for (Timestamp t = t0; t < t1; t += step) out.push_back({t, value, unit, source});
    return out;
}

// One synthetic day with planted ground truth:
//   2 heart-rate runs above 140, one uphill cycling hour, one 30 s HR spike,
//   one 20 s power burst above 400 W.
struct SyntheticDay {
    Timestamp day_start = 0;
    std::vector<Sample> heartrate;           // 1 Hz, whole day
    std::vector<Sample> power;               // 1 Hz where present
    std::vector<Sample> altitude;            // 1 Hz, whole day
    EventRecord cycling;                     // the ride
    std::vector<Interval> vol_truth;         // expected VolOverload intervals
    std::vector<Interval> press_truth;       // expected PressOverload intervals
};

inline SyntheticDay make_synthetic_day(
    Timestamp day_start = parse_timestamp("2019-06-01T00:00:00Z")) {
    SyntheticDay day;
    day.day_start = day_start;
    const Timestamp B = day_start;

    const Interval hr_run1{B + 28800, B + 29100};   // 08:00, 5 min at 150
    const Interval hr_run2{B + 61200, B + 61500};   // 17:00, 5 min at 155
    const Interval ride{B + 36000, B + 39600};      // 10:00-11:00
    const Interval spike{B + 50400, B + 50430};     // 14:00, 30 s at 130
    const Interval burst{B + 68400, B + 68420};     // 19:00, 20 s at 450 W

    for (Timestamp t = B; t < B + 86400; ++t) {
        double hr = 80.0;
        if (t >= hr_run1.start && t < hr_run1.end) hr = 150.0;
        else if (t >= hr_run2.start && t < hr_run2.end) hr = 155.0;
        else if (t >= ride.start && t < ride.end) hr = 100.0;
        else if (t >= spike.start && t < spike.end) hr = 130.0;
        day.heartrate.push_back({t, hr, "bpm", "fixture"});

        // Altitude ramps at +0.5 m/s from one minute before the ride to one
        // minute after it, so the detected climb strictly contains the ride.
        double alt = 100.0;
        Timestamp ramp_start = ride.start - 60;
        Timestamp ramp_end = ride.end + 60;
        if (t >= ramp_start && t < ramp_end)
            alt = 100.0 + 0.5 * static_cast<double>(t - ramp_start);
        else if (t >= ramp_end)
            alt = 100.0 + 0.5 * static_cast<double>(ramp_end - ramp_start);
        day.altitude.push_back({t, alt, "m", "fixture"});
    }

    for (Timestamp t = ride.start; t < ride.end; ++t)
        day.power.push_back({t, 200.0, "W", "fixture"});
    for (Timestamp t = burst.start - 60; t < burst.end + 60; ++t) {
        double w = (t >= burst.start && t < burst.end) ? 450.0 : 0.0;
        day.power.push_back({t, w, "W", "fixture"});
    }

    day.cycling.event_type = "Cycling";
    day.cycling.event_name = "ride-" + format_timestamp(ride.start);
    day.cycling.interval = ride;
    day.cycling.stream_refs = {"Heartrate", "Power", "Altitude"};

    day.vol_truth = {hr_run1, ride, hr_run2};
    day.press_truth = {spike, burst};
    return day;
}

inline void load_day(Store& store, const SyntheticDay& day) {
    store.register_stream("Heartrate", StreamKind::Real, "bpm");
    store.register_stream("Power", StreamKind::Real, "W");
    store.register_stream("Altitude", StreamKind::Real, "m");
    store.append_samples("Heartrate", day.heartrate);
    store.append_samples("Power", day.power);
    store.append_samples("Altitude", day.altitude);
    store.append_events({&day.cycling, 1});
}

inline const char* kVolOverloadText =
    "VolOverload := (HR > 140) OR (Cycling AND detect-climb(Altitude))";
inline const char* kPressOverloadText =
    "PressOverload := detect-spike(HR) OR (Power > 400 W)";

// A sparser 30-day stream for continuous-retrieval checks: samples every
// 30 s, with runs, rides, spikes and bursts on a repeating weekly-ish grid.
struct SyntheticMonth {
    Timestamp start = 0;
    Timestamp end = 0;
    std::vector<Sample> heartrate;
    std::vector<Sample> power;
    std::vector<Sample> altitude;
    std::vector<EventRecord> cycling;
};

inline SyntheticMonth make_synthetic_month(
    Timestamp start = parse_timestamp("2019-03-01T00:00:00Z"), int days = 30) {
    SyntheticMonth m;
    m.start = start;
    m.end = start + static_cast<Timestamp>(days) * 86400;
    const Duration step = 30;

    for (int d = 0; d < days; ++d) {
        const Timestamp B = start + static_cast<Timestamp>(d) * 86400;
        const bool run_day = d % 2 == 0;
        const bool ride_day = d % 3 == 0;
        const bool spike_day = d % 2 == 1;
        const bool burst_day = d % 5 == 0;

        const Interval run{B + 7 * 3600, B + 7 * 3600 + 1800};
        const Interval ride{B + 10 * 3600, B + 11 * 3600};
        const Interval spike{B + 14 * 3600, B + 14 * 3600 + 60};
        const Interval burst{B + 19 * 3600, B + 19 * 3600 + 60};

        for (Timestamp t = B; t < B + 86400; t += step) {
            double hr = 80.0;
            if (run_day && t >= run.start && t < run.end) hr = 150.0;
            else if (ride_day && t >= ride.start && t < ride.end) hr = 100.0;
            else if (spike_day && t >= spike.start && t < spike.end) hr = 130.0;
            m.heartrate.push_back({t, hr, "bpm", "fixture"});
        }

        if (ride_day) {
            Timestamp ramp_start = ride.start - 600;
            Timestamp ramp_end = ride.end + 600;
            for (Timestamp t = ramp_start; t < ramp_end + 600; t += step) {
                double alt = t < ramp_end
                                 ? 100.0 + 0.5 * static_cast<double>(
                                               std::max<Timestamp>(0, t - ramp_start))
                                 : 100.0 + 0.5 * static_cast<double>(ramp_end -
                                                                     ramp_start);
                m.altitude.push_back({t, alt, "m", "fixture"});
            }
            EventRecord e;
            e.event_type = "Cycling";
            e.event_name = "ride-" + format_timestamp(ride.start);
            e.interval = ride;
            e.stream_refs = {"Altitude"};
            m.cycling.push_back(std::move(e));
        }

        if (burst_day) {
            for (Timestamp t = burst.start - 120; t < burst.end + 120; t += step) {
                double w = (t >= burst.start && t < burst.end) ? 450.0 : 0.0;
                m.power.push_back({t, w, "W", "fixture"});
            }
        }
    }
    return m;
}

}  // namespace fixtures
