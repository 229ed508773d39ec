#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vitalog/detectors.hpp"
#include "vitalog/physio.hpp"

namespace vitalog {

// Engine-wide tunables. Everything here can be set from a key-value config
// file; defaults match the documented detector and model parameters.
struct Config {
    Duration threshold_max_gap = 60;  // sample-and-hold cap, seconds
    SpikeSpec spike;
    ClimbSpec climb;
    SubjectProfile profile;
    std::vector<std::pair<double, double>> spo2_anchors = kDefaultSpo2Anchors;
    double station_max_km = 50.0;
};

// Parses `key = value` lines; '#' starts a comment. Anchor lists are
// comma-separated x:y pairs. Unknown keys are rejected so typos surface.
Config load_config(const std::filesystem::path& path);

Config parse_config(const std::string& text);

}  // namespace vitalog
