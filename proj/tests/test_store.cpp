#include <doctest.h>

#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "vitalog/algebra.hpp"
#include "vitalog/eval.hpp"

using namespace vitalog;
using fixtures::TempDir;

namespace {

std::vector<Sample> three_samples() {
    return {{100, 60.0, "bpm", "a"}, {200, 61.0, "bpm", "a"},
            {300, 62.0, "bpm", "a"}};
}

}  // namespace

TEST_CASE("append is idempotent") {
    TempDir tmp("append");
    Store store(tmp.path());
    store.register_stream("Heartrate", StreamKind::Real, "bpm");
    auto samples = three_samples();
    CHECK(store.append_samples("Heartrate", samples) == 3);
    CHECK(store.append_samples("Heartrate", samples) == 0);
    CHECK(store.query_samples("Heartrate", Window{0, 1000}).size() == 3);
}

TEST_CASE("append to unregistered stream fails") {
    TempDir tmp("unknown");
    Store store(tmp.path());
    auto samples = three_samples();
    CHECK_THROWS_AS(store.append_samples("Nope", samples), UnknownStream);
}

TEST_CASE("kind and unit mismatches are rejected") {
    TempDir tmp("kind");
    Store store(tmp.path());
    store.register_stream("Heartrate", StreamKind::Real, "bpm");
    std::vector<Sample> wrong{{0, 1.0, "W", "a"}};
    CHECK_THROWS_AS(store.append_samples("Heartrate", wrong), DataError);
    std::vector<LocationSample> locs{{0, 1.0, 2.0, "a"}};
    CHECK_THROWS_AS(store.append_locations("Heartrate", locs), KindMismatch);
    CHECK_THROWS_AS(store.append_samples("PM25", three_samples()), KindMismatch);
    std::vector<Sample> nan{{0, std::nan(""), "bpm", "a"}};
    CHECK_THROWS_AS(store.append_samples("Heartrate", nan), DataError);
}

TEST_CASE("out-of-order and multi-source appends query back sorted") {
    TempDir tmp("sorted");
    Store store(tmp.path());
    store.register_stream("Heartrate", StreamKind::Real, "bpm");
    std::mt19937 rng(5);
    std::vector<Sample> all;
    for (int batch = 0; batch < 20; ++batch) {
        std::vector<Sample> chunk;
        for (int i = 0; i < 50; ++i) {
            Timestamp t = static_cast<Timestamp>(rng() % 10000);
            chunk.push_back({t, static_cast<double>(rng() % 200), "bpm",
                             batch % 2 ? "watch" : "strap"});
        }
        store.append_samples("Heartrate", chunk);
        all.insert(all.end(), chunk.begin(), chunk.end());
    }
    // In-memory oracle: dedup by (timestamp, source) keeping first, then sort.
    std::set<std::pair<Timestamp, std::string>> seen;
    std::vector<Sample> expected;
    for (const Sample& s : all)
        if (seen.insert({s.timestamp, s.source}).second) expected.push_back(s);
    std::sort(expected.begin(), expected.end(),
              [](const Sample& a, const Sample& b) {
                  return std::tie(a.timestamp, a.source) <
                         std::tie(b.timestamp, b.source);
              });
    auto got = store.query_samples("Heartrate", Window{0, 20000});
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].timestamp == expected[i].timestamp);
        CHECK(got[i].source == expected[i].source);
        CHECK(got[i].value == expected[i].value);
    }

    SUBCASE("random windows match a filter oracle") {
        for (int trial = 0; trial < 50; ++trial) {
            Timestamp a = static_cast<Timestamp>(rng() % 10000);
            Timestamp b = a + 1 + static_cast<Timestamp>(rng() % 3000);
            auto win = store.query_samples("Heartrate", Window{a, b});
            std::size_t want = 0;
            for (const Sample& s : expected)
                if (s.timestamp >= a && s.timestamp < b) ++want;
            CHECK(win.size() == want);
        }
    }
}

TEST_CASE("event append dedup and validation") {
    TempDir tmp("events");
    Store store(tmp.path());
    EventRecord e;
    e.event_type = "Cycling";
    e.event_name = "ride1";
    e.interval = {1000, 2000};
    CHECK(store.append_events({&e, 1}) == 1);
    CHECK(store.append_events({&e, 1}) == 0);

    EventRecord bad = e;
    bad.event_name = "bad";
    bad.interval = {2000, 2000};
    CHECK_THROWS_AS(store.append_events({&bad, 1}), DataError);

    auto got = store.query_events("Cycling", Window{0, 5000});
    REQUIRE(got.size() == 1);
    CHECK(got[0].event_name == "ride1");
    // Intersection semantics.
    CHECK(store.query_events("Cycling", Window{1999, 5000}).size() == 1);
    CHECK(store.query_events("Cycling", Window{2000, 5000}).empty());
    CHECK(store.query_events("Nothing", Window{0, 5000}).empty());
}

TEST_CASE("appending an input event schedules dependent definitions") {
    TempDir tmp("wake");
    Store store(tmp.path());
    store.register_stream("Altitude", StreamKind::Real, "m");
    // Register the event type by appending a first event, then the definition.
    EventRecord seed;
    seed.event_type = "Cycling";
    seed.event_name = "seed";
    seed.interval = {0, 10};
    store.append_events({&seed, 1});
    store.register_definition(parse("UphillCycle := Cycling AND detect-climb(Altitude)")[0]);
    CHECK(store.pending_definitions().empty());

    EventRecord e;
    e.event_type = "Cycling";
    e.event_name = "ride2";
    e.interval = {5000, 6000};
    store.append_events({&e, 1});
    auto pending = store.pending_definitions();
    REQUIRE(pending.size() == 1);
    CHECK(pending[0] == "UphillCycle");

    EventRecord other;
    other.event_type = "Meal";
    other.event_name = "lunch";
    other.interval = {7000, 7600};
    store.process_pending();
    store.append_events({&other, 1});
    CHECK(store.pending_definitions().empty());
}

TEST_CASE("definition registration errors") {
    TempDir tmp("defs");
    Store store(tmp.path());
    store.register_stream("Heartrate", StreamKind::Real, "bpm");
    store.register_definition(parse("A := Heartrate > 100")[0]);
    CHECK_THROWS_AS(store.register_definition(parse("A := Heartrate > 120")[0]),
                    DuplicateDefinition);
    CHECK_THROWS_AS(store.register_definition(parse("B := Nowhere > 1")[0]),
                    UnresolvedReference);
    CHECK_THROWS_AS(store.register_definition(parse("Heartrate := A")[0]),
                    DataError);
}

TEST_CASE("advance withholds events inside the lookback horizon") {
    TempDir tmp("withhold");
    Store store(tmp.path());
    store.register_stream("Heartrate", StreamKind::Real, "bpm");
    // 1 h lookback via DELAY(... , 1h) around a comparison leaf (60 s hold).
    store.register_definition(parse("Lagged := DELAY(Heartrate > 100, 59m)")[0]);
    const EvaluationPlan* plan = store.plan("Lagged");
    REQUIRE(plan);
    CHECK(plan->lookback == 3600);

    // A qualifying run [1000, 1300), then quiet until t=2000.
    std::vector<Sample> first;
    for (Timestamp t = 500; t < 2000; t += 50)
        first.push_back({t, (t >= 1000 && t < 1300) ? 150.0 : 80.0, "bpm", "f"});
    auto emitted = store.advance("Heartrate", first);
    // Watermark 1950: the delayed event ends 300 + 3540 = 3840+... nothing
    // can be final yet.
    CHECK(emitted.empty());

    // Advance watermark far beyond the event end plus lookback.
    std::vector<Sample> second;
    for (Timestamp t = 2000; t <= 9000; t += 50)
        second.push_back({t, 80.0, "bpm", "f"});
    auto later = store.advance("Heartrate", second);
    REQUIRE(later.size() == 1);
    CHECK(later[0].event_type == "Lagged");
    CHECK(later[0].interval == Interval{1000 + 3540, 1300 + 3540});

    // Nothing new on a further advance with no qualifying data.
    std::vector<Sample> third{{9500, 80.0, "bpm", "f"}};
    CHECK(store.advance("Heartrate", third).empty());
}

TEST_CASE("chunked feeding equals one batch for a synthetic day") {
    auto day = fixtures::make_synthetic_day();

    auto run = [&](Duration chunk) {
        TempDir tmp("chunk" + std::to_string(chunk));
        Store store(tmp.path());
        store.register_stream("Heartrate", StreamKind::Real, "bpm");
        store.register_stream("Power", StreamKind::Real, "W");
        store.register_stream("Altitude", StreamKind::Real, "m");
        EventRecord seed;  // registers the Cycling event type
        seed.event_type = "Cycling";
        seed.event_name = "seed";
        seed.interval = {day.day_start - 7200, day.day_start - 3600};
        store.append_events({&seed, 1});
        store.register_definition(parse(fixtures::kVolOverloadText)[0]);
        store.register_definition(parse(fixtures::kPressOverloadText)[0]);

        std::vector<EventRecord> finalized;
        for (Timestamp c = day.day_start; c < day.day_start + 86400; c += chunk) {
            Timestamp c1 = c + chunk;
            auto slice = [&](const std::vector<Sample>& in) {
                std::vector<Sample> out;
                for (const Sample& s : in)
                    if (s.timestamp >= c && s.timestamp < c1) out.push_back(s);
                return out;
            };
            for (auto&& [id, data] :
                 {std::pair{"Heartrate", &day.heartrate},
                  std::pair{"Power", &day.power},
                  std::pair{"Altitude", &day.altitude}}) {
                auto part = slice(*data);
                if (!part.empty()) {
                    auto out = store.advance(id, part);
                    finalized.insert(finalized.end(), out.begin(), out.end());
                }
            }
            if (day.cycling.interval.end >= c && day.cycling.interval.end < c1) {
                auto out = store.advance_events({&day.cycling, 1});
                finalized.insert(finalized.end(), out.begin(), out.end());
            }
        }
        auto rest = store.flush();
        finalized.insert(finalized.end(), rest.begin(), rest.end());

        std::vector<std::tuple<std::string, Timestamp, Timestamp>> keys;
        for (const EventRecord& e : finalized)
            keys.emplace_back(e.event_type, e.interval.start, e.interval.end);
        std::sort(keys.begin(), keys.end());
        return keys;
    };

    auto hourly = run(3600);
    auto whole = run(86400);
    CHECK(hourly == whole);

    // The day's planted truth comes out of the continuous path too. (The seed
    // cycling event has no altitude data, so it contributes nothing.)
    std::vector<std::tuple<std::string, Timestamp, Timestamp>> want;
    for (const Interval& iv : day.vol_truth)
        want.emplace_back("VolOverload", iv.start, iv.end);
    for (const Interval& iv : day.press_truth)
        want.emplace_back("PressOverload", iv.start, iv.end);
    std::sort(want.begin(), want.end());
    for (const auto& k : want) {
        CAPTURE(std::get<0>(k));
        bool found = false;
        for (const auto& g : hourly) {
            if (std::get<0>(g) == std::get<0>(k) &&
                std::llabs(std::get<1>(g) - std::get<1>(k)) <= 1 &&
                std::llabs(std::get<2>(g) - std::get<2>(k)) <= 1)
                found = true;
        }
        CHECK(found);
    }
    CHECK(hourly.size() == want.size());
}

TEST_CASE("store round-trips through reopen") {
    TempDir tmp("reopen");
    {
        Store store(tmp.path());
        store.register_stream("Heartrate", StreamKind::Real, "bpm");
        std::vector<Sample> s{{100, 61.25, "bpm", "watch"},
                              {160, 59.5, "bpm", "watch"}};
        store.append_samples("Heartrate", s);
        EventRecord e;
        e.event_type = "Cycling";
        e.event_name = "ride1";
        e.interval = {1000, 2000};
        e.parameters["distance_km"] = 42.5;
        e.parameters["note"] = "hilly";
        e.stream_refs = {"Heartrate"};
        store.append_events({&e, 1});
        store.register_definition(parse("A := Heartrate > 100")[0]);
    }
    Store reopened(tmp.path());
    auto samples = reopened.query_samples("Heartrate", Window{0, 1000});
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].value == 61.25);
    CHECK(samples[0].source == "watch");
    CHECK(samples[1].value == 59.5);
    auto events = reopened.query_events("Cycling", Window{0, 5000});
    REQUIRE(events.size() == 1);
    CHECK(std::get<double>(events[0].parameters.at("distance_km")) == 42.5);
    CHECK(std::get<std::string>(events[0].parameters.at("note")) == "hilly");
    CHECK(events[0].stream_refs.count("Heartrate") == 1);
    REQUIRE(reopened.definitions().size() == 1);
    CHECK(reopened.definitions()[0].name == "A");

    // Appending the same records again writes nothing.
    std::vector<Sample> dup{{100, 61.25, "bpm", "watch"}};
    CHECK(reopened.append_samples("Heartrate", dup) == 0);
}

TEST_CASE("truncated trailing line is ignored on reopen") {
    TempDir tmp("crash");
    {
        Store store(tmp.path());
        store.register_stream("Heartrate", StreamKind::Real, "bpm");
        store.append_samples("Heartrate", three_samples());
    }
    // Simulate a crash mid-write: a partial last line without newline.
    {
        std::ofstream f(tmp.path() / "streams" / "Heartrate.csv",
                        std::ios::app);
        f << "2019-06-01T00:00:00Z,99";
    }
    Store reopened(tmp.path());
    auto samples = reopened.query_samples("Heartrate", Window{0, 1000000000});
    CHECK(samples.size() == 3);
}
