#pragma once

#include <set>
#include <string>
#include <vector>

#include "vitalog/algebra.hpp"
#include "vitalog/pattern.hpp"
#include "vitalog/store.hpp"

namespace vitalog {

// A compiled definition: the AST with every leaf resolved against the store
// registry, plus the input sets and lookback that continuous mode needs.
//
// lookback is the maximum over root-to-leaf paths of (sum of DELAY durations
// on the path + the leaf's own window requirement):
//   comparison leaf      max_gap
//   detect-spike leaf    baseline_window
//   detect-climb leaf    smoothing_window + max_gap
//   event reference      0
// plus any derived-stream alignment need, floored at 1 s.
struct EvaluationPlan {
    Definition definition;
    Duration lookback = 1;
    std::set<std::string> input_streams;      // canonical raw stream ids
    std::set<std::string> input_event_types;  // event types read by leaves
};

// Resolves every stream/event reference; throws UnresolvedReference for
// unknown names, DataError for ambiguous ones or unit mismatches.
EvaluationPlan compile(const Definition& def, const Store& store);

// Interval-set evaluation over a window, with per-leaf sets in root time
// coordinates (delays applied) for coverage reporting.
struct EvalResult {
    IntervalSet result;
    std::vector<std::pair<std::string, IntervalSet>> leaves;
};

EvalResult evaluate_sets(const EvaluationPlan& plan, const Window& window,
                         const Store& store);

// One EventRecord per result interval: event_type is the definition name,
// parameters carry the definition name and per-leaf coverage seconds, and
// stream_refs name every input.
std::vector<EventRecord> materialize_events(const EvaluationPlan& plan,
                                            const EvalResult& sets);

// Batch evaluation: one EventRecord per output interval of the definition
// over the window. Deterministic for fixed store contents.
std::vector<EventRecord> evaluate(const EvaluationPlan& plan,
                                  const Window& window, const Store& store);

}  // namespace vitalog
