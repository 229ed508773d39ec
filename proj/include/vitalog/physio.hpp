#pragma once

#include <span>
#include <utility>
#include <vector>

#include "vitalog/core.hpp"

namespace vitalog {

// Piecewise-linear physiological models. The anchor tables are deliberately
// explicit configuration: every derived value is reproducible from the
// numbers below, and replacing a model only means swapping a table.
struct SubjectProfile {
    double body_mass = 70.0;         // kg
    double vt_rest_per_kg = 0.007;   // L/kg at the first HR anchor
    double vt_max_per_kg = 0.030;    // L/kg at the last HR anchor
    // (HR bpm -> breaths/min), strictly increasing in both coordinates.
    std::vector<std::pair<double, double>> rr_anchors{
        {60, 12}, {120, 20}, {150, 30}, {190, 40}};

    void validate() const;  // throws DataError on a malformed profile
};

// (altitude m -> SpO2 %), monotone non-increasing.
inline const std::vector<std::pair<double, double>> kDefaultSpo2Anchors{
    {0, 98}, {1500, 97}, {2500, 95}, {3500, 93}, {4500, 88}, {5500, 84}};

// Piecewise-linear interpolation over anchors, clamped at both ends.
double lerp_anchors(const std::vector<std::pair<double, double>>& anchors,
                    double x);

double breathing_rate_at(double hr_bpm, const SubjectProfile& profile);
double tidal_volume_at(double hr_bpm, const SubjectProfile& profile);

// Per-sample transforms; timestamps and sources carry over.
std::vector<Sample> breathing_rate(std::span<const Sample> hr,
                                   const SubjectProfile& profile);
std::vector<Sample> tidal_volume(std::span<const Sample> hr,
                                 const SubjectProfile& profile);

// intake (ug/min) = rr (breaths/min) * vt (L) * conc (ug/m3) * 0.001 (L->m3).
// vt and conc are aligned to the rr timestamps by sample-and-hold with the
// max_gap cap; rr timestamps with no aligned value emit nothing.
std::vector<Sample> pm25_intake_rate(std::span<const Sample> rr,
                                     std::span<const Sample> vt,
                                     std::span<const Sample> conc,
                                     Duration max_gap = 60);

std::vector<Sample> spo2_from_altitude(
    std::span<const Sample> altitude,
    const std::vector<std::pair<double, double>>& anchors = kDefaultSpo2Anchors);

}  // namespace vitalog
