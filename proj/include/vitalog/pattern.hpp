#pragma once

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "vitalog/core.hpp"
#include "vitalog/detectors.hpp"

namespace vitalog {

struct PatternNode;
using PatternPtr = std::shared_ptr<const PatternNode>;

// Stream comparison leaf, e.g. "Heartrate > 120". The optional unit suffix
// ("Power > 400 W") is validated against the stream's registered unit at
// compile time.
struct ComparisonNode {
    std::string stream;
    CmpOp op = CmpOp::Gt;
    double value = 0.0;
    std::string unit;  // empty when no suffix given
};

// Detector invocation leaf, e.g. "detect-climb(Altitude, min_ascent_rate=0.5)".
struct DetectorCallNode {
    std::string name;
    std::string stream;
    std::map<std::string, double> kwargs;
};

// Bare identifier leaf; resolves against the registry at compile time.
struct EventRefNode {
    std::string name;
};

struct NotNode {
    PatternPtr child;
};

struct AndNode {
    std::vector<PatternPtr> children;  // >= 2
};

struct OrNode {
    std::vector<PatternPtr> children;  // >= 2
};

struct DelayNode {
    PatternPtr child;
    Duration delay = 0;  // seconds, > 0
};

struct PatternNode {
    std::variant<ComparisonNode, DetectorCallNode, EventRefNode, NotNode,
                 AndNode, OrNode, DelayNode>
        node;
};

bool pattern_equal(const PatternPtr& a, const PatternPtr& b);

struct Definition {
    std::string name;  // new event_type
    PatternPtr body;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, int column, const std::string& message,
                std::vector<std::string> expected = {});
    int line() const { return line_; }
    int column() const { return column_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    int line_;
    int column_;
    std::vector<std::string> expected_;
};

class DuplicateDefinition : public Error {
public:
    explicit DuplicateDefinition(const std::string& name)
        : Error("duplicate definition: '" + name + "'"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class UnknownDetector : public Error {
public:
    UnknownDetector(int line, int column, const std::string& name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// Detector names the parser accepts.
const std::vector<std::string>& registered_detectors();

// Parses a definition file. Operator precedence NOT > AND > OR; AND/OR chains
// flatten to n-ary nodes. ASCII and Unicode operator spellings both accepted;
// "#" starts a comment. Throws SyntaxError / DuplicateDefinition /
// UnknownDetector.
std::vector<Definition> parse(const std::string& text);

// Canonical text with fully parenthesized children; parse(format(d)) yields a
// structurally identical AST.
std::string format(const Definition& d);

std::string format_pattern(const PatternPtr& node);

// "3600" -> "1h" etc.: the largest unit that divides evenly.
std::string format_duration(Duration seconds);

// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace vitalog
