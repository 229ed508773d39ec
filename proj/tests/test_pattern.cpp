#include <doctest.h>

#include <random>

#include "vitalog/pattern.hpp"

using namespace vitalog;

namespace {

PatternPtr mk(PatternNode n) { return std::make_shared<PatternNode>(std::move(n)); }

PatternPtr cmp(const std::string& stream, CmpOp op, double v,
               const std::string& unit = "") {
    return mk({ComparisonNode{stream, op, v, unit}});
}

PatternPtr ev(const std::string& name) { return mk({EventRefNode{name}}); }

PatternPtr det(const std::string& name, const std::string& stream) {
    return mk({DetectorCallNode{name, stream, {}}});
}

// Random AST generator for round-trip checks.
PatternPtr random_pattern(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> leaf_pick(0, 2);
    std::uniform_int_distribution<int> node_pick(0, 6);
    std::uniform_int_distribution<int> kid_count(2, 4);
    std::uniform_int_distribution<int> number(0, 500);
    std::uniform_int_distribution<int> dur(1, 100000);
    static const std::vector<std::string> streams{"Heartrate", "Power",
                                                  "Altitude", "PM25"};
    static const std::vector<std::string> events{"Cycling", "Running", "Sleep"};
    static const std::vector<CmpOp> ops{CmpOp::Gt, CmpOp::Ge, CmpOp::Lt,
                                        CmpOp::Le};
    int pick = depth <= 0 ? leaf_pick(rng) : node_pick(rng);
    switch (pick) {
        case 0:
            return cmp(streams[rng() % streams.size()], ops[rng() % 4],
                       number(rng) + (rng() % 2 ? 0.5 : 0.0));
        case 1:
            return ev(events[rng() % events.size()]);
        case 2: {
            DetectorCallNode call;
            call.name = rng() % 2 ? "detect-spike" : "detect-climb";
            call.stream = streams[rng() % streams.size()];
            if (rng() % 2) call.kwargs["max_gap"] = number(rng);
            if (rng() % 3 == 0) call.kwargs["delta"] = number(rng) + 0.25;
            return mk({std::move(call)});
        }
        case 3:
            return mk({NotNode{random_pattern(rng, depth - 1)}});
        case 4: {
            AndNode n;
            int kids = kid_count(rng);
            for (int i = 0; i < kids; ++i)
                n.children.push_back(random_pattern(rng, depth - 1));
            return mk({std::move(n)});
        }
        case 5: {
            OrNode n;
            int kids = kid_count(rng);
            for (int i = 0; i < kids; ++i)
                n.children.push_back(random_pattern(rng, depth - 1));
            return mk({std::move(n)});
        }
        default:
            return mk({DelayNode{random_pattern(rng, depth - 1), dur(rng)}});
    }
}

}  // namespace

TEST_CASE("parses the exposure-event definition") {
    auto defs = parse("E := (Heartrate > 120) AND (PM25 > 10)");
    REQUIRE(defs.size() == 1);
    CHECK(defs[0].name == "E");
    PatternPtr want = mk({AndNode{{cmp("Heartrate", CmpOp::Gt, 120),
                                   cmp("PM25", CmpOp::Gt, 10)}}});
    CHECK(pattern_equal(defs[0].body, want));
}

TEST_CASE("parses the uphill-cycling definition") {
    auto defs = parse("U := Cycling AND detect-climb(Altitude)");
    REQUIRE(defs.size() == 1);
    PatternPtr want =
        mk({AndNode{{ev("Cycling"), det("detect-climb", "Altitude")}}});
    CHECK(pattern_equal(defs[0].body, want));
}

TEST_CASE("unicode operator spellings parse identically") {
    auto a = parse("E := (Heartrate > 120) ∧ (PM25 > 10)");
    auto b = parse("E := (Heartrate > 120) AND (PM25 > 10)");
    CHECK(pattern_equal(a[0].body, b[0].body));

    auto c = parse("V := (HR > 140) ∨ (Cycling ∧ detect-climb(Altitude))");
    auto d = parse("V := (HR > 140) OR (Cycling AND detect-climb(Altitude))");
    CHECK(pattern_equal(c[0].body, d[0].body));

    auto e = parse("N := ¬ Cycling");
    auto f = parse("N := NOT Cycling");
    CHECK(pattern_equal(e[0].body, f[0].body));
}

TEST_CASE("comparison accepts a unit suffix") {
    auto defs = parse("P := detect-spike(HR) OR (Power > 400 W)");
    PatternPtr want = mk({OrNode{{det("detect-spike", "HR"),
                                  cmp("Power", CmpOp::Gt, 400, "W")}}});
    CHECK(pattern_equal(defs[0].body, want));
}

TEST_CASE("precedence: NOT binds tighter than AND, AND tighter than OR") {
    auto defs = parse("X := NOT A AND B OR C");
    PatternPtr want = mk({OrNode{
        {mk({AndNode{{mk({NotNode{ev("A")}}), ev("B")}}}), ev("C")}}});
    CHECK(pattern_equal(defs[0].body, want));
}

TEST_CASE("AND/OR chains flatten to n-ary nodes") {
    auto defs = parse("X := A AND B AND C AND D");
    auto* n = std::get_if<AndNode>(&defs[0].body->node);
    REQUIRE(n);
    CHECK(n->children.size() == 4);

    auto defs2 = parse("Y := A OR B OR C");
    auto* o = std::get_if<OrNode>(&defs2[0].body->node);
    REQUIRE(o);
    CHECK(o->children.size() == 3);
}

TEST_CASE("delay parses durations") {
    auto defs = parse("X := DELAY(Meal, 1h)");
    auto* d = std::get_if<DelayNode>(&defs[0].body->node);
    REQUIRE(d);
    CHECK(d->delay == 3600);
    CHECK(pattern_equal(d->child, ev("Meal")));

    auto* d2 = std::get_if<DelayNode>(&parse("X := DELAY(A, 90s)")[0].body->node);
    REQUIRE(d2);
    CHECK(d2->delay == 90);
    auto* d3 = std::get_if<DelayNode>(&parse("X := DELAY(A, 2d)")[0].body->node);
    REQUIRE(d3);
    CHECK(d3->delay == 172800);
}

TEST_CASE("comments and multiple definitions") {
    auto defs = parse(
        "# cardio definitions\n"
        "A := Heartrate > 100  # inline comment\n"
        "B := A AND Cycling\n");
    CHECK(defs.size() == 2);
    CHECK(defs[1].name == "B");
}

TEST_CASE("syntax errors carry position and expectations") {
    try {
        parse("E := AND Heartrate");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 6);
        CHECK(!e.expected().empty());
    }

    try {
        parse("A := X\nB := (Y > 5");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("malformed inputs are rejected with positions") {
    static const char* bad[] = {
        "",
        ":= X",
        "E :=",
        "E := ()",
        "E := (A",
        "E := A OR",
        "E := A AND AND B",
        "E := > 5",
        "E := Heartrate >",
        "E := Heartrate > > 5",
        "E := DELAY(A)",
        "E := DELAY(A, )",
        "E := DELAY(A, 5x)",
        "E := DELAY(A, h)",
        "E := NOT",
        "E := A B",
        "E := 42",
        "E = A",
        "E := detect-climb()",
        "E := detect-climb(Altitude, x)",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse(text), SyntaxError);
    }
}

TEST_CASE("duplicate definitions and unknown detectors") {
    CHECK_THROWS_AS(parse("A := X\nA := Y"), DuplicateDefinition);
    CHECK_THROWS_AS(parse("A := detect-everything(HR)"), UnknownDetector);
    CHECK_THROWS_AS(parse("A := frobnicate(HR)"), UnknownDetector);
}

TEST_CASE("format produces canonical, fully parenthesized text") {
    Definition d{"A", mk({AndNode{{ev("a"), ev("b")}}})};
    CHECK(format(d) == "A := (a) AND (b)");
    Definition d2{"X", mk({DelayNode{ev("Meal"), 3600}})};
    CHECK(format(d2) == "X := DELAY(Meal, 1h)");
}

TEST_CASE("parse-format round trip on 500 random ASTs") {
    std::mt19937 rng(2024);
    for (int i = 0; i < 500; ++i) {
        Definition d{"Def" + std::to_string(i), random_pattern(rng, 4)};
        std::string text = format(d);
        CAPTURE(text);
        auto parsed = parse(text);
        REQUIRE(parsed.size() == 1);
        CHECK(parsed[0].name == d.name);
        CHECK(pattern_equal(parsed[0].body, d.body));
        // parse . format . parse is parse (idempotence).
        auto reparsed = parse(format(parsed[0]));
        CHECK(pattern_equal(reparsed[0].body, parsed[0].body));
    }
}
