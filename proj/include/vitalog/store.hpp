#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vitalog/config.hpp"
#include "vitalog/core.hpp"
#include "vitalog/exposome.hpp"
#include "vitalog/pattern.hpp"

namespace vitalog {

struct EvaluationPlan;
struct Window;

class UnknownStream : public Error {
public:
    explicit UnknownStream(const std::string& id)
        : Error("unknown stream: '" + id + "'"), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class KindMismatch : public Error {
public:
    using Error::Error;
};

class UnresolvedReference : public Error {
public:
    explicit UnresolvedReference(const std::string& name)
        : Error("unresolved reference: '" + name + "'"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

enum class StreamKind { Real, Location, Event };

struct StreamInfo {
    StreamKind kind = StreamKind::Real;
    std::string unit;
    std::set<std::string> sources;
    bool derived = false;  // computed at query time from other streams
};

// Append-only persistence and registry for data streams and events, with
// time-range queries and continuous-evaluation state.
//
// Directory layout: registry.json, streams/<id>.csv, events/<type>.jsonl,
// plus stations.csv / station_readings.csv once station data is loaded.
// Records are immutable once written; duplicates are dropped idempotently.
// Single writer per store instance; reads are unsynchronized const access.
class Store {
public:
    // Opens an existing store directory or creates a fresh one. An unfinished
    // trailing line in any segment file (crash truncation) is ignored.
    explicit Store(std::filesystem::path dir, Config config = {});
    ~Store();

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    const Config& config() const { return config_; }
    const std::filesystem::path& dir() const { return dir_; }

    // -- registry ------------------------------------------------------------

    void register_stream(const std::string& id, StreamKind kind,
                         const std::string& unit);
    void register_alias(const std::string& alias, const std::string& canonical);
    // Canonical id for a registered stream (resolving aliases); empty optional
    // when the name is not a stream.
    std::optional<std::string> resolve_stream(const std::string& name) const;
    const StreamInfo* stream_info(const std::string& name) const;
    bool has_event_type(const std::string& name) const;
    std::vector<std::string> stream_ids() const;

    // -- ingestion -----------------------------------------------------------

    // Returns the number of records actually written (duplicates by
    // (stream, source, timestamp) are dropped).
    std::size_t append_samples(const std::string& id,
                               std::span<const Sample> samples);
    std::size_t append_locations(const std::string& id,
                                 std::span<const LocationSample> samples);
    // Duplicates by (event_type, event_name, start, end) are dropped.
    // Registered continuous definitions reading an appended event type are
    // scheduled for re-evaluation (see pending_definitions / advance).
    std::size_t append_events(std::span<const EventRecord> events);

    // -- queries -------------------------------------------------------------

    // Samples with timestamp in [window.start, window.end), sorted by
    // (timestamp, source). Derived streams are computed on demand.
    std::vector<Sample> query_samples(const std::string& id,
                                      const Window& window) const;
    std::vector<LocationSample> query_locations(const std::string& id,
                                                const Window& window) const;
    // Events whose interval intersects the window, sorted by start.
    std::vector<EventRecord> query_events(const std::string& event_type,
                                          const Window& window) const;

    Timestamp watermark(const std::string& id) const;

    // -- continuous evaluation -----------------------------------------------

    // Compiles and persists a definition as a continuous query; its name
    // becomes an event type. Throws on compile errors or duplicate names.
    void register_definition(const Definition& def);
    std::vector<Definition> definitions() const;
    const EvaluationPlan* plan(const std::string& name) const;

    // Ingests the increment, advances watermarks, recomputes affected
    // definitions, and returns the newly finalized events (events whose end
    // is at least one lookback before the watermark; they are persisted with
    // event_type = definition name and never revised).
    std::vector<EventRecord> advance(const std::string& id,
                                     std::span<const Sample> samples);
    std::vector<EventRecord> advance_locations(
        const std::string& id, std::span<const LocationSample> samples);
    std::vector<EventRecord> advance_events(std::span<const EventRecord> events);

    // Runs every definition scheduled by earlier appends.
    std::vector<EventRecord> process_pending();

    // Treats all inputs as complete and finalizes everything outstanding.
    std::vector<EventRecord> flush();

    // Definitions currently scheduled for re-evaluation.
    std::vector<std::string> pending_definitions() const;

    // -- station reference data ----------------------------------------------

    void load_stations(StationTable table);
    const StationTable& stations() const { return stations_; }

    // Samples for evaluation: derived streams computed, raw streams queried.
    std::vector<Sample> samples_for_eval(const std::string& canonical_id,
                                         Timestamp from, Timestamp to) const;

private:
    struct StreamData;
    struct DefinitionState;

    StreamData& stream_data(const std::string& canonical);
    const StreamData* find_stream_data(const std::string& canonical) const;
    std::vector<Sample> raw_range(const std::string& id, Timestamp from,
                                  Timestamp to) const;
    std::string require_stream(const std::string& id, StreamKind kind) const;
    void load_existing();
    void persist_registry() const;
    void open_stream_file(StreamData& data, const std::string& canonical);
    void mark_dependents_dirty(const std::string& event_type);
    std::vector<EventRecord> run_pending();
    std::vector<EventRecord> process_definition(DefinitionState& state,
                                                bool flushing,
                                                Timestamp flush_horizon);
    Timestamp definition_watermark(const DefinitionState& state) const;
    std::optional<Timestamp> earliest_input_data(const DefinitionState& state) const;

    std::filesystem::path dir_;
    Config config_;
    std::map<std::string, StreamInfo> registry_;
    std::map<std::string, std::string> aliases_;
    std::map<std::string, std::unique_ptr<StreamData>> data_;
    std::vector<std::unique_ptr<DefinitionState>> definitions_;
    StationTable stations_;
    bool has_stations_ = false;
};

// Built-in derived stream names (computed from raw streams at query time).
const std::map<std::string, std::string>& derived_stream_units();

}  // namespace vitalog
