#include "vitalog/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace vitalog {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& value, const std::string& key) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [p, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || p != end)
        throw DataError("config: bad numeric value '" + value + "' for " + key);
    return out;
}

Duration parse_seconds(const std::string& value, const std::string& key) {
    return static_cast<Duration>(parse_double(value, key));
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& value,
                                                   const std::string& key) {
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw DataError("config: expected x:y pairs for " + key);
        out.emplace_back(parse_double(trim(item.substr(0, colon)), key),
                         parse_double(trim(item.substr(colon + 1)), key));
    }
    if (out.size() < 2) throw DataError("config: need at least two pairs for " + key);
    return out;
}

}  // namespace

Config parse_config(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config line " + std::to_string(lineno) +
                            ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "threshold.max_gap") cfg.threshold_max_gap = parse_seconds(value, key);
        else if (key == "spike.baseline_window") cfg.spike.baseline_window = parse_seconds(value, key);
        else if (key == "spike.delta") cfg.spike.delta = parse_double(value, key);
        else if (key == "spike.max_duration") cfg.spike.max_spike_duration = parse_seconds(value, key);
        else if (key == "climb.smoothing_window") cfg.climb.smoothing_window = parse_seconds(value, key);
        else if (key == "climb.min_ascent_rate") cfg.climb.min_ascent_rate = parse_double(value, key);
        else if (key == "climb.min_total_gain") cfg.climb.min_total_gain = parse_double(value, key);
        else if (key == "climb.max_gap") cfg.climb.max_gap = parse_seconds(value, key);
        else if (key == "profile.body_mass") cfg.profile.body_mass = parse_double(value, key);
        else if (key == "profile.vt_rest_per_kg") cfg.profile.vt_rest_per_kg = parse_double(value, key);
        else if (key == "profile.vt_max_per_kg") cfg.profile.vt_max_per_kg = parse_double(value, key);
        else if (key == "profile.rr_anchors") cfg.profile.rr_anchors = parse_pairs(value, key);
        else if (key == "spo2.anchors") cfg.spo2_anchors = parse_pairs(value, key);
        else if (key == "exposome.max_km") cfg.station_max_km = parse_double(value, key);
        else throw DataError("config line " + std::to_string(lineno) +
                             ": unknown key '" + key + "'");
    }
    cfg.profile.validate();
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace vitalog
