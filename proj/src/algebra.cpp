#include "vitalog/algebra.hpp"

#include <algorithm>

namespace vitalog {

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> out;
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        Timestamp lo = std::max(ia->start, ib->start);
        Timestamp hi = std::min(ia->end, ib->end);
        if (lo < hi) out.push_back({lo, hi});
        if (ia->end < ib->end)
            ++ia;
        else
            ++ib;
    }
    return IntervalSet(std::move(out));
}

IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return IntervalSet(std::move(out));
}

IntervalSet complement(const IntervalSet& a, const Window& w) {
    std::vector<Interval> out;
    Timestamp cursor = w.start;
    for (const Interval& iv : a) {
        if (iv.end <= w.start) continue;
        if (iv.start >= w.end) break;
        Timestamp lo = std::max(iv.start, w.start);
        if (cursor < lo) out.push_back({cursor, lo});
        cursor = std::max(cursor, std::min(iv.end, w.end));
    }
    if (cursor < w.end) out.push_back({cursor, w.end});
    return IntervalSet(std::move(out));
}

IntervalSet delay(const IntervalSet& a, Duration d, const Window& w) {
    if (d < 0) throw DataError("delay duration must be non-negative");
    std::vector<Interval> out;
    for (const Interval& iv : a) {
        Timestamp lo = std::max(iv.start + d, w.start);
        Timestamp hi = std::min(iv.end + d, w.end);
        if (lo < hi) out.push_back({lo, hi});
    }
    return IntervalSet(std::move(out));
}

IntervalSet clip(const IntervalSet& a, const Window& w) {
    std::vector<Interval> out;
    for (const Interval& iv : a) {
        Timestamp lo = std::max(iv.start, w.start);
        Timestamp hi = std::min(iv.end, w.end);
        if (lo < hi) out.push_back({lo, hi});
    }
    return IntervalSet(std::move(out));
}

}  // namespace vitalog
