#pragma once

#include "vitalog/core.hpp"

namespace vitalog {

// Every evaluation is relative to exactly one window; it bounds the NOT
// complement and clips DELAY output.
struct Window {
    Timestamp start = 0;
    Timestamp end = 0;

    Window() = default;
    Window(Timestamp s, Timestamp e) : start(s), end(e) {
        if (s >= e) throw DataError("window start must precede end");
    }
    Duration length() const { return end - start; }
    bool operator==(const Window& o) const = default;
};

// Intersection of two canonical sets.
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);

// Union of two canonical sets (adjacent intervals merge).
IntervalSet unite(const IntervalSet& a, const IntervalSet& b);

// Complement of a within w; time points outside w never appear.
IntervalSet complement(const IntervalSet& a, const Window& w);

// Every interval shifted forward by d, then clipped to w and re-normalized.
// d < 0 is rejected.
IntervalSet delay(const IntervalSet& a, Duration d, const Window& w);

// a restricted to w.
IntervalSet clip(const IntervalSet& a, const Window& w);

}  // namespace vitalog
