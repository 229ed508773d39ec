#include "vitalog/physio.hpp"

#include <algorithm>

namespace vitalog {

void SubjectProfile::validate() const {
    if (body_mass <= 0.0) throw DataError("profile: body_mass must be > 0");
    if (rr_anchors.size() < 2)
        throw DataError("profile: need at least two rr_anchors");
    for (std::size_t i = 1; i < rr_anchors.size(); ++i) {
        if (rr_anchors[i].first <= rr_anchors[i - 1].first ||
            rr_anchors[i].second <= rr_anchors[i - 1].second)
            throw DataError(
                "profile: rr_anchors must be strictly increasing in both "
                "coordinates");
    }
}

double lerp_anchors(const std::vector<std::pair<double, double>>& anchors,
                    double x) {
    if (anchors.empty()) throw DataError("empty anchor table");
    if (x <= anchors.front().first) return anchors.front().second;
    if (x >= anchors.back().first) return anchors.back().second;
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (x <= anchors[i].first) {
            const auto& [x0, y0] = anchors[i - 1];
            const auto& [x1, y1] = anchors[i];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    return anchors.back().second;
}

double breathing_rate_at(double hr_bpm, const SubjectProfile& profile) {
    return lerp_anchors(profile.rr_anchors, hr_bpm);
}

double tidal_volume_at(double hr_bpm, const SubjectProfile& profile) {
    double hr_lo = profile.rr_anchors.front().first;
    double hr_hi = profile.rr_anchors.back().first;
    double t = (hr_bpm - hr_lo) / (hr_hi - hr_lo);
    t = std::clamp(t, 0.0, 1.0);
    double per_kg =
        profile.vt_rest_per_kg + t * (profile.vt_max_per_kg - profile.vt_rest_per_kg);
    return profile.body_mass * per_kg;
}

std::vector<Sample> breathing_rate(std::span<const Sample> hr,
                                   const SubjectProfile& profile) {
    profile.validate();
    std::vector<Sample> out;
    out.reserve(hr.size());
    for (const Sample& s : hr)
        out.push_back({s.timestamp, breathing_rate_at(s.value, profile),
                       "breaths/min", s.source});
    return out;
}

std::vector<Sample> tidal_volume(std::span<const Sample> hr,
                                 const SubjectProfile& profile) {
    profile.validate();
    std::vector<Sample> out;
    out.reserve(hr.size());
    for (const Sample& s : hr)
        out.push_back(
            {s.timestamp, tidal_volume_at(s.value, profile), "L", s.source});
    return out;
}

namespace {

// Sample-and-hold lookup: value of the latest sample at or before t, valid
// until the next sample or for max_gap seconds. Returns false when t is not
// covered. `idx` is a monotone cursor over increasing t.
bool held_value(std::span<const Sample> stream, Timestamp t, Duration max_gap,
                std::size_t& idx, double& out) {
    while (idx + 1 < stream.size() && stream[idx + 1].timestamp <= t) ++idx;
    if (stream.empty() || stream[idx].timestamp > t) return false;
    Timestamp valid_until = stream[idx].timestamp + max_gap;
    if (idx + 1 < stream.size())
        valid_until = std::min(valid_until, stream[idx + 1].timestamp);
    if (t >= valid_until) return false;
    out = stream[idx].value;
    return true;
}

}  // namespace

std::vector<Sample> pm25_intake_rate(std::span<const Sample> rr,
                                     std::span<const Sample> vt,
                                     std::span<const Sample> conc,
                                     Duration max_gap) {
    for (const Sample& s : rr)
        if (s.unit != "breaths/min")
            throw DataError("pm25_intake_rate: rr stream unit must be "
                            "breaths/min, got '" + s.unit + "'");
    for (const Sample& s : vt)
        if (s.unit != "L")
            throw DataError("pm25_intake_rate: vt stream unit must be L, got '" +
                            s.unit + "'");
    for (const Sample& s : conc)
        if (s.unit != "ug/m3")
            throw DataError("pm25_intake_rate: conc stream unit must be ug/m3, "
                            "got '" + s.unit + "'");
    std::vector<Sample> out;
    std::size_t vi = 0, ci = 0;
    for (const Sample& s : rr) {
        double v = 0.0, c = 0.0;
        if (!held_value(vt, s.timestamp, max_gap, vi, v)) continue;
        if (!held_value(conc, s.timestamp, max_gap, ci, c)) continue;
        out.push_back({s.timestamp, s.value * v * c * 0.001, "ug/min", s.source});
    }
    return out;
}

std::vector<Sample> spo2_from_altitude(
    std::span<const Sample> altitude,
    const std::vector<std::pair<double, double>>& anchors) {
    std::vector<Sample> out;
    out.reserve(altitude.size());
    for (const Sample& s : altitude)
        out.push_back({s.timestamp, lerp_anchors(anchors, s.value), "%", s.source});
    return out;
}

}  // namespace vitalog
