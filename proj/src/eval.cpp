#include "vitalog/eval.hpp"

#include <algorithm>

#include "vitalog/detectors.hpp"
#include "vitalog/physio.hpp"

namespace vitalog {

namespace {

// Raw streams feeding a derived stream, and the extra hold alignment the
// derivation itself needs.
struct DerivedSpec {
    std::vector<std::string> raw_inputs;
    Duration extra_lookback = 0;
};

void check_kwarg_known(const DetectorCallNode& n,
                       std::initializer_list<const char*> known) {
    for (const auto& [key, value] : n.kwargs) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return key == k;
            }) == known.end())
            throw DataError("unknown argument '" + key + "' for " + n.name);
    }
}

void apply_spike_kwargs(const DetectorCallNode& n, SpikeSpec& spec) {
    check_kwarg_known(n, {"baseline_window", "delta", "max_duration"});
    for (const auto& [key, value] : n.kwargs) {
        if (key == "baseline_window") spec.baseline_window = static_cast<Duration>(value);
        else if (key == "delta") spec.delta = value;
        else if (key == "max_duration") spec.max_spike_duration = static_cast<Duration>(value);
    }
}

void apply_climb_kwargs(const DetectorCallNode& n, ClimbSpec& spec) {
    check_kwarg_known(n, {"smoothing_window", "min_ascent_rate", "min_total_gain",
                          "max_gap"});
    for (const auto& [key, value] : n.kwargs) {
        if (key == "smoothing_window") spec.smoothing_window = static_cast<Duration>(value);
        else if (key == "min_ascent_rate") spec.min_ascent_rate = value;
        else if (key == "min_total_gain") spec.min_total_gain = value;
        else if (key == "max_gap") spec.max_gap = static_cast<Duration>(value);
    }
}

DerivedSpec derived_spec(const std::string& canonical, const Config& cfg) {
    if (canonical == "BreathingRate" || canonical == "TidalVolume")
        return {{"Heartrate"}, 0};
    if (canonical == "SpO2") return {{"Altitude"}, 0};
    if (canonical == "PM25") return {{"Location"}, 0};
    if (canonical == "PM25Intake")
        return {{"Heartrate", "Location"}, cfg.threshold_max_gap};
    return {{canonical}, 0};
}

class Compiler {
public:
    Compiler(const Store& store, EvaluationPlan& plan)
        : store_(store), plan_(plan) {}

    Duration walk(const PatternPtr& node) {
        return std::visit([this](const auto& n) { return visit(n); }, node->node);
    }

private:
    Duration leaf_stream(const std::string& name, Duration base) {
        auto canonical = store_.resolve_stream(name);
        if (!canonical) throw UnresolvedReference(name);
        const StreamInfo* info = store_.stream_info(*canonical);
        if (info->kind != StreamKind::Real)
            throw DataError("'" + name + "' is not a real-valued stream");
        DerivedSpec spec = derived_spec(*canonical, store_.config());
        for (const std::string& raw : spec.raw_inputs)
            plan_.input_streams.insert(raw);
        return base + spec.extra_lookback;
    }

    Duration visit(const ComparisonNode& n) {
        auto canonical = store_.resolve_stream(n.stream);
        if (!canonical) throw UnresolvedReference(n.stream);
        const StreamInfo* info = store_.stream_info(*canonical);
        if (!n.unit.empty() && n.unit != info->unit)
            throw DataError("unit mismatch in comparison: stream '" + n.stream +
                            "' has unit '" + info->unit + "', definition says '" +
                            n.unit + "'");
        return leaf_stream(n.stream, store_.config().threshold_max_gap);
    }

    Duration visit(const DetectorCallNode& n) {
        const Config& cfg = store_.config();
        Duration base;
        if (n.name == "detect-spike") {
            SpikeSpec spec = cfg.spike;
            apply_spike_kwargs(n, spec);
            // Finalization also needs the hold cap to be inside the lookback.
            base = std::max(spec.baseline_window, spec.max_spike_duration);
        } else if (n.name == "detect-climb") {
            ClimbSpec spec = cfg.climb;
            apply_climb_kwargs(n, spec);
            base = spec.smoothing_window + spec.max_gap;
        } else {
            throw UnknownDetector(0, 0, n.name);
        }
        return leaf_stream(n.stream, base);
    }

    Duration visit(const EventRefNode& n) {
        bool is_event = store_.has_event_type(n.name);
        auto as_stream = store_.resolve_stream(n.name);
        if (is_event && as_stream)
            throw DataError("ambiguous reference '" + n.name +
                            "': both an event type and a stream");
        if (is_event) {
            plan_.input_event_types.insert(n.name);
            return 0;
        }
        if (as_stream) {
            // Bare data-stream reference: times where the stream has held
            // coverage.
            return leaf_stream(n.name, store_.config().threshold_max_gap);
        }
        throw UnresolvedReference(n.name);
    }

    Duration visit(const NotNode& n) { return walk(n.child); }

    Duration visit(const AndNode& n) {
        Duration max = 0;
        for (const auto& c : n.children) max = std::max(max, walk(c));
        return max;
    }

    Duration visit(const OrNode& n) {
        Duration max = 0;
        for (const auto& c : n.children) max = std::max(max, walk(c));
        return max;
    }

    Duration visit(const DelayNode& n) { return n.delay + walk(n.child); }

    const Store& store_;
    EvaluationPlan& plan_;
};

}  // namespace

EvaluationPlan compile(const Definition& def, const Store& store) {
    EvaluationPlan plan;
    plan.definition = def;
    Compiler compiler(store, plan);
    plan.lookback = std::max<Duration>(1, compiler.walk(def.body));
    return plan;
}

namespace {

class Evaluator {
public:
    Evaluator(const EvaluationPlan& plan, const Store& store,
              std::vector<std::pair<std::string, IntervalSet>>& leaves)
        : plan_(plan), store_(store), leaves_(leaves) {}

    IntervalSet eval(const PatternPtr& node, const Window& w) {
        return std::visit([&](const auto& n) { return visit(n, w); }, node->node);
    }

private:
    IntervalSet record_leaf(std::string key, IntervalSet set) {
        leaves_.emplace_back(std::move(key), set);
        return set;
    }

    std::vector<Sample> expanded_samples(const std::string& name, const Window& w,
                                         Duration need) const {
        auto canonical = store_.resolve_stream(name);
        if (!canonical) throw UnresolvedReference(name);
        return store_.samples_for_eval(*canonical, w.start - need, w.end);
    }

    IntervalSet visit(const ComparisonNode& n, const Window& w) {
        const Config& cfg = store_.config();
        ThresholdSpec spec;
        spec.stream = {n.stream};
        spec.op = n.op;
        spec.value = n.value;
        spec.max_gap = cfg.threshold_max_gap;
        auto samples = expanded_samples(n.stream, w, spec.max_gap);
        std::string key = n.stream + " " + to_string(n.op) + " " +
                          format_number(n.value);
        return record_leaf(std::move(key),
                           clip(threshold_events(samples, spec), w));
    }

    IntervalSet visit(const DetectorCallNode& n, const Window& w) {
        const Config& cfg = store_.config();
        IntervalSet set;
        if (n.name == "detect-spike") {
            SpikeSpec spec = cfg.spike;
            apply_spike_kwargs(n, spec);
            auto samples = expanded_samples(n.stream, w, spec.baseline_window);
            set = detect_spike(samples, spec);
        } else {
            ClimbSpec spec = cfg.climb;
            apply_climb_kwargs(n, spec);
            auto samples = expanded_samples(
                n.stream, w, spec.smoothing_window + spec.max_gap);
            set = detect_climb(samples, spec);
        }
        return record_leaf(n.name + "(" + n.stream + ")", clip(set, w));
    }

    IntervalSet visit(const EventRefNode& n, const Window& w) {
        if (store_.has_event_type(n.name)) {
            auto events = store_.query_events(n.name, w);
            std::vector<Interval> ivals;
            for (const EventRecord& e : events) ivals.push_back(e.interval);
            return record_leaf(n.name, clip(IntervalSet(std::move(ivals)), w));
        }
        // Bare data-stream reference: held coverage.
        const Config& cfg = store_.config();
        auto samples = expanded_samples(n.name, w, cfg.threshold_max_gap);
        return record_leaf(
            n.name, clip(coverage_intervals(samples, cfg.threshold_max_gap), w));
    }

    IntervalSet visit(const NotNode& n, const Window& w) {
        return complement(eval(n.child, w), w);
    }

    IntervalSet visit(const AndNode& n, const Window& w) {
        IntervalSet acc = eval(n.children[0], w);
        for (std::size_t i = 1; i < n.children.size(); ++i)
            acc = intersect(acc, eval(n.children[i], w));
        return acc;
    }

    IntervalSet visit(const OrNode& n, const Window& w) {
        IntervalSet acc = eval(n.children[0], w);
        for (std::size_t i = 1; i < n.children.size(); ++i)
            acc = unite(acc, eval(n.children[i], w));
        return acc;
    }

    IntervalSet visit(const DelayNode& n, const Window& w) {
        Window shifted{w.start - n.delay, w.end - n.delay};
        std::size_t mark = leaves_.size();
        IntervalSet child = eval(n.child, shifted);
        // Report leaf coverage in root time coordinates.
        for (std::size_t i = mark; i < leaves_.size(); ++i)
            leaves_[i].second = delay(leaves_[i].second, n.delay, w);
        return delay(child, n.delay, w);
    }

    const EvaluationPlan& plan_;
    const Store& store_;
    std::vector<std::pair<std::string, IntervalSet>>& leaves_;
};

}  // namespace

EvalResult evaluate_sets(const EvaluationPlan& plan, const Window& window,
                         const Store& store) {
    EvalResult out;
    Evaluator evaluator(plan, store, out.leaves);
    out.result = evaluator.eval(plan.definition.body, window);
    return out;
}

std::vector<EventRecord> materialize_events(const EvaluationPlan& plan,
                                            const EvalResult& sets) {
    std::vector<EventRecord> events;
    for (const Interval& iv : sets.result) {
        EventRecord e;
        e.event_type = plan.definition.name;
        e.event_name = plan.definition.name + "/" + format_timestamp(iv.start);
        e.interval = iv;
        e.parameters["definition"] = plan.definition.name;
        for (const auto& [key, set] : sets.leaves) {
            Duration overlap =
                intersect(set, IntervalSet({iv})).total_duration();
            if (overlap > 0) e.parameters["leaf:" + key] = static_cast<double>(overlap);
        }
        for (const std::string& s : plan.input_streams) e.stream_refs.insert(s);
        for (const std::string& s : plan.input_event_types) e.stream_refs.insert(s);
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<EventRecord> evaluate(const EvaluationPlan& plan,
                                  const Window& window, const Store& store) {
    return materialize_events(plan, evaluate_sets(plan, window, store));
}

}  // namespace vitalog
