#include "vitalog/detectors.hpp"

#include <algorithm>
#include <deque>

namespace vitalog {

std::string to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
    }
    return "?";
}

bool cmp_apply(CmpOp op, double value, double threshold) {
    switch (op) {
        case CmpOp::Gt: return value > threshold;
        case CmpOp::Ge: return value >= threshold;
        case CmpOp::Lt: return value < threshold;
        case CmpOp::Le: return value <= threshold;
    }
    return false;
}

namespace {

void require_sorted(std::span<const Sample> samples, const char* what) {
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].timestamp < samples[i - 1].timestamp)
            throw DataError(std::string(what) + ": samples not sorted at " +
                            format_timestamp(samples[i].timestamp));
    }
}

// Hold span of sample i, capped at `cap` seconds. `trailing_cap` applies when
// there is no next sample.
Interval hold_span(std::span<const Sample> samples, std::size_t i, Duration cap,
                   Duration trailing_cap) {
    Timestamp start = samples[i].timestamp;
    Timestamp end;
    if (i + 1 < samples.size())
        end = std::min(samples[i + 1].timestamp, start + cap);
    else
        end = start + trailing_cap;
    return {start, end};
}

}  // namespace

IntervalSet threshold_events(std::span<const Sample> samples,
                             const ThresholdSpec& spec) {
    require_sorted(samples, "threshold_events");
    std::vector<Interval> runs;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        if (!spec.unit.empty() && s.unit != spec.unit)
            throw DataError("threshold_events: unit mismatch, expected '" +
                            spec.unit + "' got '" + s.unit + "' at " +
                            format_timestamp(s.timestamp));
        if (!cmp_apply(spec.op, s.value, spec.value)) continue;
        Interval h = hold_span(samples, i, spec.max_gap, spec.max_gap);
        if (h.start < h.end) runs.push_back(h);
    }
    IntervalSet merged{std::move(runs)};
    if (spec.min_duration <= 0) return merged;
    std::vector<Interval> kept;
    for (const Interval& iv : merged)
        if (iv.length() >= spec.min_duration) kept.push_back(iv);
    return IntervalSet(std::move(kept));
}

IntervalSet detect_spike(std::span<const Sample> hr, const SpikeSpec& spec) {
    require_sorted(hr, "detect_spike");
    std::vector<Interval> runs;
    std::deque<double> window;  // values of samples in [t - baseline, t)
    std::size_t lo = 0;
    std::vector<double> scratch;
    for (std::size_t i = 0; i < hr.size(); ++i) {
        while (lo < i && hr[lo].timestamp < hr[i].timestamp - spec.baseline_window)
            ++lo;
        scratch.clear();
        for (std::size_t j = lo; j < i; ++j) scratch.push_back(hr[j].value);
        double baseline;
        if (scratch.empty()) {
            baseline = hr[i].value;
        } else {
            std::sort(scratch.begin(), scratch.end());
            std::size_t n = scratch.size();
            baseline = (n % 2 == 1)
                           ? scratch[n / 2]
                           : 0.5 * (scratch[n / 2 - 1] + scratch[n / 2]);
        }
        if (scratch.empty() || hr[i].value < baseline + spec.delta) continue;
        Interval h = hold_span(hr, i, spec.max_spike_duration, 1);
        if (h.start < h.end) runs.push_back(h);
    }
    IntervalSet merged{std::move(runs)};
    std::vector<Interval> kept;
    for (const Interval& iv : merged)
        if (iv.length() <= spec.max_spike_duration) kept.push_back(iv);
    return IntervalSet(std::move(kept));
}

IntervalSet detect_climb(std::span<const Sample> altitude,
                         const ClimbSpec& spec) {
    require_sorted(altitude, "detect_climb");
    const std::size_t n = altitude.size();
    if (n < 2) return {};

    // Centered mean over [t - W/2, t + W/2].
    const Duration half = spec.smoothing_window / 2;
    std::vector<double> smoothed(n);
    std::size_t lo = 0, hi = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        while (hi < n && altitude[hi].timestamp <= altitude[i].timestamp + half) {
            acc += altitude[hi].value;
            ++hi;
        }
        while (lo < hi && altitude[lo].timestamp < altitude[i].timestamp - half) {
            acc -= altitude[lo].value;
            ++lo;
        }
        smoothed[i] = acc / static_cast<double>(hi - lo);
    }

    // Segments across data gaps wider than max_gap never qualify.
    std::vector<Interval> segments;
    for (std::size_t i = 1; i < n; ++i) {
        Duration dt = altitude[i].timestamp - altitude[i - 1].timestamp;
        if (dt <= 0 || dt > spec.max_gap) continue;
        double rate = (smoothed[i] - smoothed[i - 1]) / static_cast<double>(dt);
        if (rate >= spec.min_ascent_rate)
            segments.push_back({altitude[i - 1].timestamp, altitude[i].timestamp});
    }
    IntervalSet qualifying{std::move(segments)};

    std::vector<Interval> merged;
    for (const Interval& iv : qualifying) {
        if (!merged.empty() && iv.start - merged.back().end <= spec.max_gap)
            merged.back().end = iv.end;
        else
            merged.push_back(iv);
    }

    std::vector<Interval> kept;
    for (const Interval& iv : merged) {
        // Net smoothed gain between the first and last sample in the interval.
        auto first = std::lower_bound(
            altitude.begin(), altitude.end(), iv.start,
            [](const Sample& s, Timestamp t) { return s.timestamp < t; });
        auto last = std::upper_bound(
            altitude.begin(), altitude.end(), iv.end,
            [](Timestamp t, const Sample& s) { return t < s.timestamp; });
        if (first == altitude.end() || last == altitude.begin()) continue;
        std::size_t fi = static_cast<std::size_t>(first - altitude.begin());
        std::size_t li = static_cast<std::size_t>(last - altitude.begin()) - 1;
        if (li <= fi) continue;
        if (smoothed[li] - smoothed[fi] >= spec.min_total_gain)
            kept.push_back(iv);
    }
    return IntervalSet(std::move(kept));
}

IntervalSet coverage_intervals(std::span<const Sample> samples,
                               Duration max_gap) {
    require_sorted(samples, "coverage_intervals");
    std::vector<Interval> runs;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        Interval h = hold_span(samples, i, max_gap, max_gap);
        if (h.start < h.end) runs.push_back(h);
    }
    return IntervalSet(std::move(runs));
}

IntervalSet events_to_intervalset(std::span<const EventRecord> events,
                                  const std::string& event_type) {
    std::vector<Interval> out;
    for (const EventRecord& e : events)
        if (e.event_type == event_type) out.push_back(e.interval);
    return IntervalSet(std::move(out));
}

}  // namespace vitalog
