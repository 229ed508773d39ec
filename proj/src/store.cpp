#include "vitalog/store.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "vitalog/algebra.hpp"
#include "vitalog/detectors.hpp"
#include "vitalog/eval.hpp"
#include "vitalog/physio.hpp"

namespace vitalog {

using nlohmann::json;

namespace {

constexpr Timestamp kTimeMin = std::numeric_limits<Timestamp>::min() / 4;

bool valid_identifier(const std::string& id) {
    if (id.empty() || !std::isalpha(static_cast<unsigned char>(id[0])))
        return false;
    for (char c : id)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
            return false;
    return true;
}

void check_field(const std::string& value, const char* what) {
    if (value.find(',') != std::string::npos ||
        value.find('\n') != std::string::npos)
        throw DataError(std::string(what) + " must not contain commas or "
                        "newlines: '" + value + "'");
}

// Complete '\n'-terminated lines; a truncated trailing fragment is dropped.
std::vector<std::string> complete_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (true) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) break;  // drop unterminated tail
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::string format_value(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "0";
    return std::string(buf, p);
}

double parse_value(const std::string& s, const std::filesystem::path& path) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw DataError("corrupt record in " + path.string() + ": bad number '" +
                        s + "'");
    return out;
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

json param_to_json(const ParamValue& v) {
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    return std::get<std::string>(v);
}

json event_to_json(const EventRecord& e) {
    json j;
    j["event_type"] = e.event_type;
    j["event_name"] = e.event_name;
    j["start"] = format_timestamp(e.interval.start);
    j["end"] = format_timestamp(e.interval.end);
    json params = json::object();
    for (const auto& [k, v] : e.parameters) params[k] = param_to_json(v);
    j["parameters"] = params;
    j["stream_refs"] = e.stream_refs;
    return j;
}

EventRecord event_from_json(const json& j) {
    EventRecord e;
    e.event_type = j.at("event_type").get<std::string>();
    e.event_name = j.at("event_name").get<std::string>();
    e.interval.start = parse_timestamp(j.at("start").get<std::string>());
    e.interval.end = parse_timestamp(j.at("end").get<std::string>());
    for (const auto& [k, v] : j.at("parameters").items()) {
        if (v.is_number())
            e.parameters[k] = v.get<double>();
        else
            e.parameters[k] = v.get<std::string>();
    }
    for (const auto& s : j.at("stream_refs"))
        e.stream_refs.insert(s.get<std::string>());
    return e;
}

}  // namespace

const std::map<std::string, std::string>& derived_stream_units() {
    static const std::map<std::string, std::string> units{
        {"BreathingRate", "breaths/min"}, {"TidalVolume", "L"},
        {"SpO2", "%"},                    {"PM25", "ug/m3"},
        {"PM25Intake", "ug/min"},
    };
    return units;
}

struct Store::StreamData {
    std::vector<Sample> samples;
    std::vector<LocationSample> locations;
    std::vector<EventRecord> events;
    std::set<std::pair<Timestamp, std::string>> sample_keys;
    std::set<std::tuple<std::string, Timestamp, Timestamp>> event_keys;
    Timestamp watermark = kTimeMin;
};

struct Store::DefinitionState {
    Definition def;
    std::shared_ptr<const EvaluationPlan> plan;
    Timestamp frontier = kTimeMin;          // kTimeMin: not started yet
    Timestamp complete_through = kTimeMin;  // inputs complete below this
    bool dirty = false;
};

Store::Store(std::filesystem::path dir, Config config)
    : dir_(std::move(dir)), config_(std::move(config)) {
    std::filesystem::create_directories(dir_ / "streams");
    std::filesystem::create_directories(dir_ / "events");
    load_existing();
    bool fresh = false;
    for (const auto& [name, unit] : derived_stream_units()) {
        if (!registry_.count(name)) {
            StreamInfo info;
            info.kind = StreamKind::Real;
            info.unit = unit;
            info.derived = true;
            registry_[name] = std::move(info);
            fresh = true;
        }
    }
    if (!aliases_.count("HR")) {
        aliases_["HR"] = "Heartrate";
        fresh = true;
    }
    if (fresh) persist_registry();
}

Store::~Store() = default;

void Store::load_existing() {
    auto registry_path = dir_ / "registry.json";
    if (std::filesystem::exists(registry_path)) {
        std::ifstream in(registry_path);
        json j = json::parse(in, nullptr, true);
        for (const auto& [id, obj] : j.at("streams").items()) {
            StreamInfo info;
            std::string kind = obj.at("kind").get<std::string>();
            info.kind = kind == "real"       ? StreamKind::Real
                        : kind == "location" ? StreamKind::Location
                                             : StreamKind::Event;
            info.unit = obj.value("unit", std::string{});
            info.derived = obj.value("derived", false);
            for (const auto& s : obj.value("sources", json::array()))
                info.sources.insert(s.get<std::string>());
            registry_[id] = std::move(info);
        }
        for (const auto& [alias, canonical] : j.value("aliases", json::object()).items())
            aliases_[alias] = canonical.get<std::string>();
        for (const auto& d : j.value("definitions", json::array())) {
            auto defs = parse(d.at("text").get<std::string>());
            auto state = std::make_unique<DefinitionState>();
            state->def = defs.at(0);
            definitions_.push_back(std::move(state));
        }
        json state_obj = j.value("state", json::object());
        for (auto& st : definitions_) {
            if (state_obj.contains(st->def.name)) {
                st->frontier = state_obj[st->def.name].value("frontier", kTimeMin);
                st->complete_through =
                    state_obj[st->def.name].value("complete_through", kTimeMin);
            }
        }
    }

    for (const auto& [id, info] : registry_) {
        if (info.derived) continue;
        if (info.kind == StreamKind::Event) {
            auto path = dir_ / "events" / (id + ".jsonl");
            if (!std::filesystem::exists(path)) continue;
            StreamData& data = stream_data(id);
            for (const std::string& line : complete_lines(path)) {
                if (line.empty()) continue;
                EventRecord e = event_from_json(json::parse(line));
                data.events.push_back(e);
                data.event_keys.insert(
                    {e.event_name, e.interval.start, e.interval.end});
                data.watermark = std::max(data.watermark, e.interval.end);
            }
            std::sort(data.events.begin(), data.events.end(),
                      [](const EventRecord& a, const EventRecord& b) {
                          return std::tie(a.interval.start, a.interval.end,
                                          a.event_name) <
                                 std::tie(b.interval.start, b.interval.end,
                                          b.event_name);
                      });
        } else {
            auto path = dir_ / "streams" / (id + ".csv");
            if (!std::filesystem::exists(path)) continue;
            StreamData& data = stream_data(id);
            auto lines = complete_lines(path);
            for (std::size_t i = 1; i < lines.size(); ++i) {  // skip header
                const std::string& line = lines[i];
                if (line.empty()) continue;
                auto fields = split_csv(line);
                if (fields.size() != 4)
                    throw DataError("corrupt record in " + path.string());
                Timestamp ts = parse_timestamp(fields[0]);
                if (info.kind == StreamKind::Real) {
                    Sample s{ts, parse_value(fields[1], path), fields[2],
                             fields[3]};
                    data.samples.push_back(std::move(s));
                } else {
                    LocationSample s{ts, parse_value(fields[1], path),
                                     parse_value(fields[2], path), fields[3]};
                    data.locations.push_back(std::move(s));
                }
                data.sample_keys.insert({ts, fields[3]});
                data.watermark = std::max(data.watermark, ts);
            }
            std::sort(data.samples.begin(), data.samples.end(),
                      [](const Sample& a, const Sample& b) {
                          return std::tie(a.timestamp, a.source) <
                                 std::tie(b.timestamp, b.source);
                      });
            std::sort(data.locations.begin(), data.locations.end(),
                      [](const LocationSample& a, const LocationSample& b) {
                          return std::tie(a.timestamp, a.source) <
                                 std::tie(b.timestamp, b.source);
                      });
        }
    }

    auto stations_path = dir_ / "stations.csv";
    auto readings_path = dir_ / "station_readings.csv";
    if (std::filesystem::exists(stations_path) &&
        std::filesystem::exists(readings_path)) {
        std::vector<Station> stations;
        auto slines = complete_lines(stations_path);
        for (std::size_t i = 1; i < slines.size(); ++i) {
            auto f = split_csv(slines[i]);
            if (f.size() != 3)
                throw DataError("corrupt record in " + stations_path.string());
            stations.push_back(
                {f[0], parse_value(f[1], stations_path), parse_value(f[2], stations_path)});
        }
        std::vector<StationReading> readings;
        auto rlines = complete_lines(readings_path);
        for (std::size_t i = 1; i < rlines.size(); ++i) {
            auto f = split_csv(rlines[i]);
            if (f.size() != 3)
                throw DataError("corrupt record in " + readings_path.string());
            readings.push_back(
                {f[0], parse_timestamp(f[1]), parse_value(f[2], readings_path)});
        }
        stations_ = StationTable(std::move(stations), std::move(readings));
        has_stations_ = true;
    }

    // Compile persisted definitions once the registry is in place.
    for (auto& st : definitions_)
        st->plan = std::make_shared<EvaluationPlan>(compile(st->def, *this));
}

void Store::persist_registry() const {
    json j;
    json streams = json::object();
    for (const auto& [id, info] : registry_) {
        json obj;
        obj["kind"] = info.kind == StreamKind::Real       ? "real"
                      : info.kind == StreamKind::Location ? "location"
                                                          : "event";
        obj["unit"] = info.unit;
        obj["derived"] = info.derived;
        obj["sources"] = info.sources;
        streams[id] = obj;
    }
    j["streams"] = streams;
    j["aliases"] = aliases_;
    json defs = json::array();
    json state = json::object();
    for (const auto& st : definitions_) {
        defs.push_back({{"name", st->def.name}, {"text", format(st->def)}});
        state[st->def.name] = {{"frontier", st->frontier},
                               {"complete_through", st->complete_through}};
    }
    j["definitions"] = defs;
    j["state"] = state;
    std::ofstream out(dir_ / "registry.json");
    out << j.dump(2) << "\n";
}

Store::StreamData& Store::stream_data(const std::string& canonical) {
    auto& slot = data_[canonical];
    if (!slot) slot = std::make_unique<StreamData>();
    return *slot;
}

const Store::StreamData* Store::find_stream_data(
    const std::string& canonical) const {
    auto it = data_.find(canonical);
    return it == data_.end() ? nullptr : it->second.get();
}

void Store::register_stream(const std::string& id, StreamKind kind,
                            const std::string& unit) {
    if (!valid_identifier(id))
        throw DataError("stream id must be an identifier: '" + id + "'");
    check_field(unit, "unit");
    auto it = registry_.find(id);
    if (it != registry_.end()) {
        if (it->second.kind != kind)
            throw KindMismatch("stream '" + id + "' already registered with a "
                               "different kind");
        if (kind == StreamKind::Real && it->second.unit != unit)
            throw DataError("stream '" + id + "' already registered with unit '" +
                            it->second.unit + "', not '" + unit + "'");
        return;
    }
    StreamInfo info;
    info.kind = kind;
    info.unit = unit;
    registry_[id] = std::move(info);
    persist_registry();
}

void Store::register_alias(const std::string& alias,
                           const std::string& canonical) {
    if (!valid_identifier(alias))
        throw DataError("alias must be an identifier: '" + alias + "'");
    auto it = aliases_.find(alias);
    if (it != aliases_.end() && it->second != canonical)
        throw DataError("alias '" + alias + "' already maps to '" + it->second +
                        "'");
    if (registry_.count(alias))
        throw DataError("alias '" + alias + "' collides with a registered id");
    aliases_[alias] = canonical;
    persist_registry();
}

std::optional<std::string> Store::resolve_stream(const std::string& name) const {
    std::string canonical = name;
    auto alias = aliases_.find(name);
    if (alias != aliases_.end()) canonical = alias->second;
    auto it = registry_.find(canonical);
    if (it == registry_.end() || it->second.kind == StreamKind::Event)
        return std::nullopt;
    return canonical;
}

const StreamInfo* Store::stream_info(const std::string& name) const {
    std::string canonical = name;
    auto alias = aliases_.find(name);
    if (alias != aliases_.end()) canonical = alias->second;
    auto it = registry_.find(canonical);
    return it == registry_.end() ? nullptr : &it->second;
}

bool Store::has_event_type(const std::string& name) const {
    auto it = registry_.find(name);
    return it != registry_.end() && it->second.kind == StreamKind::Event;
}

std::vector<std::string> Store::stream_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, info] : registry_) out.push_back(id);
    return out;
}

std::string Store::require_stream(const std::string& id, StreamKind kind) const {
    auto canonical = resolve_stream(id);
    if (!canonical) {
        if (has_event_type(id))
            throw KindMismatch("'" + id + "' is an event type, not a stream");
        throw UnknownStream(id);
    }
    const StreamInfo& info = registry_.at(*canonical);
    if (info.kind != kind)
        throw KindMismatch("stream '" + id + "' has the wrong kind for this "
                           "operation");
    return *canonical;
}

std::size_t Store::append_samples(const std::string& id,
                                  std::span<const Sample> samples) {
    std::string canonical = require_stream(id, StreamKind::Real);
    StreamInfo& info = registry_.at(canonical);
    if (info.derived)
        throw KindMismatch("cannot append to derived stream '" + canonical + "'");
    StreamData& data = stream_data(canonical);

    auto path = dir_ / "streams" / (canonical + ".csv");
    bool existed = std::filesystem::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!existed) out << "timestamp,value,unit,source\n";

    std::size_t written = 0;
    bool sources_changed = false;
    for (const Sample& s : samples) {
        validate_sample(s);
        check_field(s.unit, "unit");
        check_field(s.source, "source");
        if (!info.unit.empty() && s.unit != info.unit)
            throw DataError("unit mismatch for stream '" + canonical +
                            "': registered '" + info.unit + "', got '" + s.unit +
                            "'");
        if (!data.sample_keys.insert({s.timestamp, s.source}).second) continue;
        data.samples.push_back(s);
        data.watermark = std::max(data.watermark, s.timestamp);
        out << format_timestamp(s.timestamp) << ',' << format_value(s.value)
            << ',' << s.unit << ',' << s.source << '\n';
        if (info.sources.insert(s.source).second) sources_changed = true;
        ++written;
    }
    out.flush();
    std::sort(data.samples.begin(), data.samples.end(),
              [](const Sample& a, const Sample& b) {
                  return std::tie(a.timestamp, a.source) <
                         std::tie(b.timestamp, b.source);
              });
    if (sources_changed) persist_registry();
    return written;
}

std::size_t Store::append_locations(const std::string& id,
                                    std::span<const LocationSample> samples) {
    std::string canonical = require_stream(id, StreamKind::Location);
    StreamInfo& info = registry_.at(canonical);
    StreamData& data = stream_data(canonical);

    auto path = dir_ / "streams" / (canonical + ".csv");
    bool existed = std::filesystem::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!existed) out << "timestamp,lat,lon,source\n";

    std::size_t written = 0;
    bool sources_changed = false;
    for (const LocationSample& s : samples) {
        validate_location(s);
        check_field(s.source, "source");
        if (!data.sample_keys.insert({s.timestamp, s.source}).second) continue;
        data.locations.push_back(s);
        data.watermark = std::max(data.watermark, s.timestamp);
        out << format_timestamp(s.timestamp) << ',' << format_value(s.latitude)
            << ',' << format_value(s.longitude) << ',' << s.source << '\n';
        if (info.sources.insert(s.source).second) sources_changed = true;
        ++written;
    }
    out.flush();
    std::sort(data.locations.begin(), data.locations.end(),
              [](const LocationSample& a, const LocationSample& b) {
                  return std::tie(a.timestamp, a.source) <
                         std::tie(b.timestamp, b.source);
              });
    if (sources_changed) persist_registry();
    return written;
}

void Store::mark_dependents_dirty(const std::string& event_type) {
    for (auto& st : definitions_)
        if (st->plan->input_event_types.count(event_type)) st->dirty = true;
}

std::size_t Store::append_events(std::span<const EventRecord> events) {
    std::size_t written = 0;
    for (const EventRecord& e : events) {
        if (e.event_type.empty())
            throw DataError("event_type must be non-empty");
        if (!valid_identifier(e.event_type))
            throw DataError("event_type must be an identifier: '" +
                            e.event_type + "'");
        if (e.interval.start >= e.interval.end)
            throw DataError("event interval start must precede end (" +
                            e.event_type + ")");
        if (resolve_stream(e.event_type))
            throw DataError("event type '" + e.event_type +
                            "' collides with a stream id");
        if (!registry_.count(e.event_type)) {
            StreamInfo info;
            info.kind = StreamKind::Event;
            registry_[e.event_type] = std::move(info);
            persist_registry();
        }
        StreamData& data = stream_data(e.event_type);
        if (!data.event_keys
                 .insert({e.event_name, e.interval.start, e.interval.end})
                 .second)
            continue;
        auto pos = std::upper_bound(
            data.events.begin(), data.events.end(), e,
            [](const EventRecord& a, const EventRecord& b) {
                return std::tie(a.interval.start, a.interval.end, a.event_name) <
                       std::tie(b.interval.start, b.interval.end, b.event_name);
            });
        data.events.insert(pos, e);
        data.watermark = std::max(data.watermark, e.interval.end);

        auto path = dir_ / "events" / (e.event_type + ".jsonl");
        std::ofstream out(path, std::ios::app);
        out << event_to_json(e).dump() << '\n';
        out.flush();

        mark_dependents_dirty(e.event_type);
        ++written;
    }
    return written;
}

std::vector<Sample> Store::query_samples(const std::string& id,
                                         const Window& window) const {
    auto canonical = resolve_stream(id);
    if (!canonical) throw UnknownStream(id);
    const StreamInfo& info = registry_.at(*canonical);
    if (info.kind != StreamKind::Real)
        throw KindMismatch("stream '" + id + "' is not real-valued");
    return samples_for_eval(*canonical, window.start, window.end);
}

std::vector<LocationSample> Store::query_locations(const std::string& id,
                                                   const Window& window) const {
    std::string canonical = require_stream(id, StreamKind::Location);
    const StreamData* data = find_stream_data(canonical);
    std::vector<LocationSample> out;
    if (!data) return out;
    auto lo = std::lower_bound(data->locations.begin(), data->locations.end(),
                               window.start,
                               [](const LocationSample& s, Timestamp t) {
                                   return s.timestamp < t;
                               });
    for (auto it = lo; it != data->locations.end() && it->timestamp < window.end;
         ++it)
        out.push_back(*it);
    return out;
}

std::vector<EventRecord> Store::query_events(const std::string& event_type,
                                             const Window& window) const {
    const StreamData* data = find_stream_data(event_type);
    std::vector<EventRecord> out;
    if (!data) return out;
    for (const EventRecord& e : data->events) {
        if (e.interval.start >= window.end) break;
        if (e.interval.end > window.start) out.push_back(e);
    }
    return out;
}

Timestamp Store::watermark(const std::string& id) const {
    const StreamData* data = find_stream_data(id);
    return data ? data->watermark : kTimeMin;
}

std::vector<Sample> Store::raw_range(const std::string& id, Timestamp from,
                                     Timestamp to) const {
    const StreamData* data = find_stream_data(id);
    std::vector<Sample> out;
    if (!data) return out;
    auto lo = std::lower_bound(
        data->samples.begin(), data->samples.end(), from,
        [](const Sample& s, Timestamp t) { return s.timestamp < t; });
    for (auto i = lo; i != data->samples.end() && i->timestamp < to; ++i)
        out.push_back(*i);
    return out;
}

std::vector<Sample> Store::samples_for_eval(const std::string& canonical,
                                            Timestamp from, Timestamp to) const {
    auto it = registry_.find(canonical);
    if (it == registry_.end()) throw UnknownStream(canonical);
    const StreamInfo& info = it->second;
    const Config& cfg = config_;

    if (!info.derived) {
        const StreamData* data = find_stream_data(canonical);
        std::vector<Sample> out;
        if (!data) return out;
        auto lo = std::lower_bound(
            data->samples.begin(), data->samples.end(), from,
            [](const Sample& s, Timestamp t) { return s.timestamp < t; });
        for (auto i = lo; i != data->samples.end() && i->timestamp < to; ++i)
            out.push_back(*i);
        return out;
    }

    if (canonical == "BreathingRate")
        return breathing_rate(raw_range("Heartrate", from, to), cfg.profile);
    if (canonical == "TidalVolume")
        return tidal_volume(raw_range("Heartrate", from, to), cfg.profile);
    if (canonical == "SpO2")
        return spo2_from_altitude(raw_range("Altitude", from, to),
                                  cfg.spo2_anchors);
    if (canonical == "PM25") {
        const StreamData* loc = find_stream_data("Location");
        if (!loc || !has_stations_) return {};
        std::vector<LocationSample> in;
        auto lo = std::lower_bound(
            loc->locations.begin(), loc->locations.end(), from,
            [](const LocationSample& s, Timestamp t) { return s.timestamp < t; });
        for (auto i = lo; i != loc->locations.end() && i->timestamp < to; ++i)
            in.push_back(*i);
        return concentration_stream(in, stations_, cfg.station_max_km);
    }
    if (canonical == "PM25Intake") {
        auto hr = raw_range("Heartrate", from, to);
        auto rr = breathing_rate(hr, cfg.profile);
        auto vt = tidal_volume(hr, cfg.profile);
        auto conc =
            samples_for_eval("PM25", from - cfg.threshold_max_gap, to);
        return pm25_intake_rate(rr, vt, conc, cfg.threshold_max_gap);
    }
    throw UnknownStream(canonical);
}

// -- continuous evaluation ----------------------------------------------------

void Store::register_definition(const Definition& def) {
    if (!valid_identifier(def.name))
        throw DataError("definition name must be an identifier: '" + def.name +
                        "'");
    for (const auto& st : definitions_)
        if (st->def.name == def.name) throw DuplicateDefinition(def.name);
    if (resolve_stream(def.name))
        throw DataError("definition name '" + def.name +
                        "' collides with a stream id");
    if (has_event_type(def.name))
        throw DataError("definition name '" + def.name +
                        "' collides with an existing event type");
    auto state = std::make_unique<DefinitionState>();
    state->def = def;
    state->plan = std::make_shared<EvaluationPlan>(compile(def, *this));
    StreamInfo info;
    info.kind = StreamKind::Event;
    registry_[def.name] = std::move(info);
    definitions_.push_back(std::move(state));
    persist_registry();
}

std::vector<Definition> Store::definitions() const {
    std::vector<Definition> out;
    for (const auto& st : definitions_) out.push_back(st->def);
    return out;
}

const EvaluationPlan* Store::plan(const std::string& name) const {
    for (const auto& st : definitions_)
        if (st->def.name == name) return st->plan.get();
    return nullptr;
}

Timestamp Store::definition_watermark(const DefinitionState& state) const {
    Timestamp wm = std::numeric_limits<Timestamp>::max();
    for (const std::string& id : state.plan->input_streams)
        wm = std::min(wm, watermark(id));
    for (const std::string& type : state.plan->input_event_types) {
        bool produced = false;
        for (const auto& other : definitions_) {
            if (other->def.name == type) {
                wm = std::min(wm, other->complete_through);
                produced = true;
                break;
            }
        }
        if (!produced) wm = std::min(wm, watermark(type));
    }
    if (wm == std::numeric_limits<Timestamp>::max()) return kTimeMin;
    return wm;
}

std::optional<Timestamp> Store::earliest_input_data(
    const DefinitionState& state) const {
    std::optional<Timestamp> first;
    auto consider = [&first](Timestamp t) {
        if (!first || t < *first) first = t;
    };
    for (const std::string& id : state.plan->input_streams) {
        const StreamData* data = find_stream_data(id);
        if (!data) continue;
        if (!data->samples.empty()) consider(data->samples.front().timestamp);
        if (!data->locations.empty())
            consider(data->locations.front().timestamp);
    }
    for (const std::string& type : state.plan->input_event_types) {
        const StreamData* data = find_stream_data(type);
        if (data && !data->events.empty())
            consider(data->events.front().interval.start);
    }
    return first;
}

std::vector<EventRecord> Store::process_definition(DefinitionState& state,
                                                   bool flushing,
                                                   Timestamp flush_horizon) {
    const EvaluationPlan& plan = *state.plan;
    Timestamp wm = flushing ? flush_horizon : definition_watermark(state);
    if (wm == kTimeMin) return {};
    Timestamp complete = flushing ? flush_horizon : wm - plan.lookback;

    Timestamp start = state.frontier;
    if (start == kTimeMin) {
        auto first = earliest_input_data(state);
        if (!first) return {};
        start = *first;
    }
    if (start >= wm) return {};

    EvalResult sets = evaluate_sets(plan, Window{start, wm}, *this);
    EvalResult finalized;
    finalized.leaves = sets.leaves;
    std::vector<Interval> done;
    Timestamp new_frontier = complete;
    for (const Interval& iv : sets.result) {
        if (iv.end <= complete) {
            done.push_back(iv);
        } else {
            new_frontier = std::min(new_frontier, iv.start);
            break;  // intervals are sorted; the rest are unfinalized too
        }
    }
    finalized.result = IntervalSet(std::move(done));
    new_frontier = std::max(new_frontier, start);

    std::vector<EventRecord> events = materialize_events(plan, finalized);
    std::vector<EventRecord> emitted;
    for (const EventRecord& e : events)
        if (append_events(std::span<const EventRecord>(&e, 1)) == 1)
            emitted.push_back(e);

    state.frontier = std::max(state.frontier == kTimeMin ? start : state.frontier,
                              new_frontier);
    state.complete_through = std::max(state.complete_through, complete);
    return emitted;
}

std::vector<EventRecord> Store::run_pending() {
    std::vector<EventRecord> out;
    bool any = true;
    int guard = 0;
    while (any && ++guard < 1000) {
        any = false;
        for (auto& st : definitions_) {
            if (!st->dirty) continue;
            st->dirty = false;
            auto emitted = process_definition(*st, false, 0);
            out.insert(out.end(), emitted.begin(), emitted.end());
            any = any || !emitted.empty();
        }
    }
    persist_registry();
    return out;
}

std::vector<EventRecord> Store::advance(const std::string& id,
                                        std::span<const Sample> samples) {
    append_samples(id, samples);
    auto canonical = resolve_stream(id);
    for (auto& st : definitions_)
        if (canonical && st->plan->input_streams.count(*canonical))
            st->dirty = true;
    return run_pending();
}

std::vector<EventRecord> Store::advance_locations(
    const std::string& id, std::span<const LocationSample> samples) {
    append_locations(id, samples);
    auto canonical = resolve_stream(id);
    for (auto& st : definitions_)
        if (canonical && st->plan->input_streams.count(*canonical))
            st->dirty = true;
    return run_pending();
}

std::vector<EventRecord> Store::advance_events(
    std::span<const EventRecord> events) {
    append_events(events);  // marks dependents dirty
    return run_pending();
}

std::vector<EventRecord> Store::process_pending() { return run_pending(); }

std::vector<EventRecord> Store::flush() {
    Timestamp global_max = kTimeMin;
    for (const auto& [id, data] : data_)
        global_max = std::max(global_max, data->watermark);
    if (global_max == kTimeMin) return {};
    Duration total_lookback = 1;
    for (const auto& st : definitions_) total_lookback += st->plan->lookback;
    Timestamp horizon = global_max + total_lookback + 1;
    std::vector<EventRecord> out;
    for (auto& st : definitions_) {
        st->dirty = false;
        auto emitted = process_definition(*st, true, horizon);
        out.insert(out.end(), emitted.begin(), emitted.end());
    }
    persist_registry();
    return out;
}

std::vector<std::string> Store::pending_definitions() const {
    std::vector<std::string> out;
    for (const auto& st : definitions_)
        if (st->dirty) out.push_back(st->def.name);
    return out;
}

void Store::load_stations(StationTable table) {
    stations_ = std::move(table);
    has_stations_ = true;
    std::ofstream s(dir_ / "stations.csv");
    s << "station_id,lat,lon\n";
    for (const Station& st : stations_.stations()) {
        check_field(st.station_id, "station_id");
        s << st.station_id << ',' << format_value(st.latitude) << ','
          << format_value(st.longitude) << '\n';
    }
    std::ofstream r(dir_ / "station_readings.csv");
    r << "station_id,timestamp,pm25_ugm3\n";
    for (const Station& st : stations_.stations())
        for (const StationReading& reading : stations_.readings(st.station_id))
            r << reading.station_id << ',' << format_timestamp(reading.timestamp)
              << ',' << format_value(reading.pm25) << '\n';
}

}  // namespace vitalog
