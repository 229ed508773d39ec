#pragma once

#include <span>
#include <string>

#include "vitalog/core.hpp"

namespace vitalog {

enum class CmpOp { Gt, Ge, Lt, Le };

std::string to_string(CmpOp op);

// Threshold event detection over a sample-and-hold signal: each sample's
// value holds until the next sample or for max_gap seconds, whichever is
// shorter (the final sample holds for max_gap). Data gaps wider than max_gap
// therefore split runs.
struct ThresholdSpec {
    StreamRef stream;
    CmpOp op = CmpOp::Gt;
    double value = 0.0;
    std::string unit;             // empty: accept the samples' unit as-is
    Duration min_duration = 0;    // runs shorter than this are dropped
    Duration max_gap = 60;        // hold cap in seconds
};

struct SpikeSpec {
    Duration baseline_window = 120;    // trailing median window, seconds
    double delta = 25.0;               // exceedance over baseline, value units
    Duration max_spike_duration = 60;  // longer exceedances are not spikes
};

struct ClimbSpec {
    Duration smoothing_window = 30;  // centered mean window, seconds
    double min_ascent_rate = 0.2;    // m/s on the smoothed signal
    double min_total_gain = 10.0;    // meters of net smoothed gain
    Duration max_gap = 30;           // merge qualifying runs this close
};

// Maximal intervals where the held signal satisfies the predicate.
// Throws DataError on unsorted input or a unit mismatch with spec.unit.
IntervalSet threshold_events(std::span<const Sample> samples,
                             const ThresholdSpec& spec);

// Intervals where the value exceeds the trailing-window median baseline by at
// least delta. The baseline at a sample is the median of strictly earlier
// samples within baseline_window (the sample itself is excluded, so the first
// sample never exceeds). Exceedance runs longer than max_spike_duration are
// dropped: that is sustained effort, not a spike.
IntervalSet detect_spike(std::span<const Sample> hr, const SpikeSpec& spec);

// Intervals where the ascent rate of the smoothed altitude signal is at least
// min_ascent_rate. The altitude is smoothed by a centered mean over
// smoothing_window; a qualifying rate at sample i covers the segment
// [t(i-1), t(i)). Runs separated by at most max_gap merge, and merged runs
// whose net smoothed gain falls short of min_total_gain are dropped.
IntervalSet detect_climb(std::span<const Sample> altitude,
                         const ClimbSpec& spec);

// Normalized union of the intervals of all events with matching event_type.
IntervalSet events_to_intervalset(std::span<const EventRecord> events,
                                  const std::string& event_type);

// Time covered by the sample-and-hold signal regardless of value.
IntervalSet coverage_intervals(std::span<const Sample> samples, Duration max_gap);

bool cmp_apply(CmpOp op, double value, double threshold);

}  // namespace vitalog
