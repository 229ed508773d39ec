#include "vitalog/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>

namespace vitalog {

namespace {

enum class Tok {
    Ident,
    DetectorIdent,  // contains '-'
    Number,
    Assign,         // :=
    Cmp,            // > >= < <=
    LParen,
    RParen,
    Comma,
    Equals,
    KwAnd,
    KwOr,
    KwNot,
    KwDelay,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::DetectorIdent: return "detector name";
        case Tok::Number: return "number";
        case Tok::Assign: return "':='";
        case Tok::Cmp: return "comparison operator";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Equals: return "'='";
        case Tok::KwAnd: return "'AND'";
        case Tok::KwOr: return "'OR'";
        case Tok::KwNot: return "'NOT'";
        case Tok::KwDelay: return "'DELAY'";
        case Tok::End: return "end of input";
    }
    return "?";
}

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_ws_and_comments();
        current_ = Token{};
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= text_.size()) {
            current_.kind = Tok::End;
            return;
        }
        char c = text_[pos_];
        // Unicode operator spellings.
        if (starts_with("\xE2\x88\xA7")) {  // U+2227 AND
            current_.kind = Tok::KwAnd;
            consume(3);
            return;
        }
        if (starts_with("\xE2\x88\xA8")) {  // U+2228 OR
            current_.kind = Tok::KwOr;
            consume(3);
            return;
        }
        if (starts_with("\xC2\xAC")) {  // U+00AC NOT
            current_.kind = Tok::KwNot;
            consume(2);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::string word;
            bool has_dash = false;
            while (pos_ < text_.size()) {
                char w = text_[pos_];
                if (std::isalnum(static_cast<unsigned char>(w)) || w == '_') {
                    word.push_back(w);
                    consume(1);
                } else if (w == '-' && pos_ + 1 < text_.size() &&
                           std::isalpha(static_cast<unsigned char>(text_[pos_ + 1]))) {
                    has_dash = true;
                    word.push_back(w);
                    consume(1);
                } else {
                    break;
                }
            }
            if (word == "AND") current_.kind = Tok::KwAnd;
            else if (word == "OR") current_.kind = Tok::KwOr;
            else if (word == "NOT") current_.kind = Tok::KwNot;
            else if (word == "DELAY") current_.kind = Tok::KwDelay;
            else current_.kind = has_dash ? Tok::DetectorIdent : Tok::Ident;
            current_.text = std::move(word);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '.')) {
                num.push_back(text_[pos_]);
                consume(1);
            }
            double value = 0.0;
            auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
            if (ec != std::errc{} || p != num.data() + num.size())
                throw SyntaxError(current_.line, current_.column,
                                  "malformed number '" + num + "'");
            current_.kind = Tok::Number;
            current_.text = std::move(num);
            current_.number = value;
            return;
        }
        switch (c) {
            case ':':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                    current_.kind = Tok::Assign;
                    consume(2);
                    return;
                }
                break;
            case '>':
            case '<': {
                current_.kind = Tok::Cmp;
                current_.text.push_back(c);
                consume(1);
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    current_.text.push_back('=');
                    consume(1);
                }
                return;
            }
            case '(': current_.kind = Tok::LParen; consume(1); return;
            case ')': current_.kind = Tok::RParen; consume(1); return;
            case ',': current_.kind = Tok::Comma; consume(1); return;
            case '=': current_.kind = Tok::Equals; consume(1); return;
            default: break;
        }
        throw SyntaxError(line_, column_,
                          std::string("unexpected character '") + c + "'");
    }

    bool starts_with(const char* s) const {
        std::size_t n = std::strlen(s);
        return text_.compare(pos_, n, s) == 0;
    }

    void consume(std::size_t n) {
        pos_ += n;
        column_ += static_cast<int>(n);
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++pos_;
                ++line_;
                column_ = 1;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                consume(1);
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    Token current_;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    std::vector<Definition> parse_file() {
        std::vector<Definition> defs;
        while (lex_.peek().kind != Tok::End) {
            Definition d = parse_definition();
            for (const Definition& seen : defs)
                if (seen.name == d.name) throw DuplicateDefinition(d.name);
            defs.push_back(std::move(d));
        }
        if (defs.empty()) {
            const Token& t = lex_.peek();
            throw SyntaxError(t.line, t.column, "expected at least one definition",
                              {tok_name(Tok::Ident)});
        }
        return defs;
    }

private:
    [[noreturn]] void fail(const Token& got,
                           std::vector<std::string> expected) {
        std::string msg = "unexpected " + std::string(tok_name(got.kind));
        if (!got.text.empty()) msg += " '" + got.text + "'";
        throw SyntaxError(got.line, got.column, msg, std::move(expected));
    }

    Token expect(Tok kind) {
        if (lex_.peek().kind != kind) fail(lex_.peek(), {tok_name(kind)});
        return lex_.take();
    }

    Definition parse_definition() {
        Token name = expect(Tok::Ident);
        expect(Tok::Assign);
        return {name.text, parse_or()};
    }

    PatternPtr parse_or() {
        std::vector<PatternPtr> children{parse_and()};
        while (lex_.peek().kind == Tok::KwOr) {
            lex_.take();
            children.push_back(parse_and());
        }
        if (children.size() == 1) return children[0];
        return std::make_shared<PatternNode>(PatternNode{OrNode{std::move(children)}});
    }

    PatternPtr parse_and() {
        std::vector<PatternPtr> children{parse_unary()};
        while (lex_.peek().kind == Tok::KwAnd) {
            lex_.take();
            children.push_back(parse_unary());
        }
        if (children.size() == 1) return children[0];
        return std::make_shared<PatternNode>(PatternNode{AndNode{std::move(children)}});
    }

    PatternPtr parse_unary() {
        if (lex_.peek().kind == Tok::KwNot) {
            lex_.take();
            return std::make_shared<PatternNode>(PatternNode{NotNode{parse_unary()}});
        }
        if (lex_.peek().kind == Tok::KwDelay) {
            lex_.take();
            expect(Tok::LParen);
            PatternPtr child = parse_or();
            expect(Tok::Comma);
            Duration d = parse_duration();
            expect(Tok::RParen);
            return std::make_shared<PatternNode>(PatternNode{DelayNode{child, d}});
        }
        return parse_primary();
    }

    Duration parse_duration() {
        Token num = expect(Tok::Number);
        Token unit = expect(Tok::Ident);
        Duration mult;
        if (unit.text == "s") mult = 1;
        else if (unit.text == "m") mult = 60;
        else if (unit.text == "h") mult = 3600;
        else if (unit.text == "d") mult = 86400;
        else fail(unit, {"'s'", "'m'", "'h'", "'d'"});
        auto seconds = static_cast<Duration>(std::llround(num.number * static_cast<double>(mult)));
        if (seconds <= 0)
            throw SyntaxError(num.line, num.column, "duration must be positive");
        return seconds;
    }

    PatternPtr parse_primary() {
        const Token& t = lex_.peek();
        switch (t.kind) {
            case Tok::LParen: {
                lex_.take();
                PatternPtr inner = parse_or();
                expect(Tok::RParen);
                return inner;
            }
            case Tok::DetectorIdent:
                return parse_detector_call();
            case Tok::Ident: {
                Token ident = lex_.take();
                if (lex_.peek().kind == Tok::Cmp) {
                    Token op = lex_.take();
                    Token num = expect(Tok::Number);
                    ComparisonNode cmp;
                    cmp.stream = ident.text;
                    cmp.op = parse_cmp_op(op);
                    cmp.value = num.number;
                    // Optional unit suffix ("Power > 400 W").
                    if (lex_.peek().kind == Tok::Ident)
                        cmp.unit = lex_.take().text;
                    return std::make_shared<PatternNode>(PatternNode{cmp});
                }
                if (lex_.peek().kind == Tok::LParen) {
                    // An identifier followed by '(' is a detector call.
                    return parse_detector_call_named(ident);
                }
                return std::make_shared<PatternNode>(
                    PatternNode{EventRefNode{ident.text}});
            }
            default:
                fail(t, {"'('", tok_name(Tok::Ident), "'NOT'", "'DELAY'"});
        }
    }

    CmpOp parse_cmp_op(const Token& op) {
        if (op.text == ">") return CmpOp::Gt;
        if (op.text == ">=") return CmpOp::Ge;
        if (op.text == "<") return CmpOp::Lt;
        return CmpOp::Le;
    }

    PatternPtr parse_detector_call() {
        Token name = lex_.take();
        return parse_detector_call_named(name);
    }

    PatternPtr parse_detector_call_named(const Token& name) {
        const auto& known = registered_detectors();
        if (std::find(known.begin(), known.end(), name.text) == known.end())
            throw UnknownDetector(name.line, name.column, name.text);
        expect(Tok::LParen);
        DetectorCallNode call;
        call.name = name.text;
        call.stream = expect(Tok::Ident).text;
        while (lex_.peek().kind == Tok::Comma) {
            lex_.take();
            Token key = expect(Tok::Ident);
            expect(Tok::Equals);
            Token value = expect(Tok::Number);
            call.kwargs[key.text] = value.number;
        }
        expect(Tok::RParen);
        return std::make_shared<PatternNode>(PatternNode{std::move(call)});
    }

    Lexer lex_;
};

struct EqualVisitor {
    const PatternNode& other;

    bool operator()(const ComparisonNode& a) const {
        auto* b = std::get_if<ComparisonNode>(&other.node);
        return b && a.stream == b->stream && a.op == b->op &&
               a.value == b->value && a.unit == b->unit;
    }
    bool operator()(const DetectorCallNode& a) const {
        auto* b = std::get_if<DetectorCallNode>(&other.node);
        return b && a.name == b->name && a.stream == b->stream &&
               a.kwargs == b->kwargs;
    }
    bool operator()(const EventRefNode& a) const {
        auto* b = std::get_if<EventRefNode>(&other.node);
        return b && a.name == b->name;
    }
    bool operator()(const NotNode& a) const {
        auto* b = std::get_if<NotNode>(&other.node);
        return b && pattern_equal(a.child, b->child);
    }
    bool operator()(const AndNode& a) const {
        auto* b = std::get_if<AndNode>(&other.node);
        if (!b || a.children.size() != b->children.size()) return false;
        for (std::size_t i = 0; i < a.children.size(); ++i)
            if (!pattern_equal(a.children[i], b->children[i])) return false;
        return true;
    }
    bool operator()(const OrNode& a) const {
        auto* b = std::get_if<OrNode>(&other.node);
        if (!b || a.children.size() != b->children.size()) return false;
        for (std::size_t i = 0; i < a.children.size(); ++i)
            if (!pattern_equal(a.children[i], b->children[i])) return false;
        return true;
    }
    bool operator()(const DelayNode& a) const {
        auto* b = std::get_if<DelayNode>(&other.node);
        return b && a.delay == b->delay && pattern_equal(a.child, b->child);
    }
};

struct FormatVisitor {
    std::string operator()(const ComparisonNode& n) const {
        std::string out = n.stream + " " + to_string(n.op) + " " + format_number(n.value);
        if (!n.unit.empty()) out += " " + n.unit;
        return out;
    }
    std::string operator()(const DetectorCallNode& n) const {
        std::string out = n.name + "(" + n.stream;
        for (const auto& [k, v] : n.kwargs) out += ", " + k + " = " + format_number(v);
        out += ")";
        return out;
    }
    std::string operator()(const EventRefNode& n) const { return n.name; }
    std::string operator()(const NotNode& n) const {
        return "NOT (" + format_pattern(n.child) + ")";
    }
    std::string operator()(const AndNode& n) const { return join(n.children, " AND "); }
    std::string operator()(const OrNode& n) const { return join(n.children, " OR "); }
    std::string operator()(const DelayNode& n) const {
        return "DELAY(" + format_pattern(n.child) + ", " +
               format_duration(n.delay) + ")";
    }

    static std::string join(const std::vector<PatternPtr>& children,
                            const char* sep) {
        std::string out;
        for (std::size_t i = 0; i < children.size(); ++i) {
            if (i) out += sep;
            out += "(" + format_pattern(children[i]) + ")";
        }
        return out;
    }
};

}  // namespace

namespace {
std::string syntax_message(int line, int column, const std::string& message,
                           const std::vector<std::string>& expected) {
    std::string out = "syntax error at " + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + message;
    if (!expected.empty()) {
        out += " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) out += ", ";
            out += expected[i];
        }
        out += ")";
    }
    return out;
}
}  // namespace

SyntaxError::SyntaxError(int line, int column, const std::string& message,
                         std::vector<std::string> expected)
    : Error(syntax_message(line, column, message, expected)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

UnknownDetector::UnknownDetector(int line, int column, const std::string& name)
    : Error("unknown detector '" + name + "' at " + std::to_string(line) + ":" +
            std::to_string(column)),
      name_(name) {}

const std::vector<std::string>& registered_detectors() {
    static const std::vector<std::string> names{"detect-spike", "detect-climb"};
    return names;
}

bool pattern_equal(const PatternPtr& a, const PatternPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return std::visit(EqualVisitor{*b}, a->node);
}

std::vector<Definition> parse(const std::string& text) {
    return Parser(text).parse_file();
}

std::string format_pattern(const PatternPtr& node) {
    return std::visit(FormatVisitor{}, node->node);
}

std::string format(const Definition& d) {
    return d.name + " := " + format_pattern(d.body);
}

std::string format_duration(Duration seconds) {
    if (seconds % 86400 == 0) return std::to_string(seconds / 86400) + "d";
    if (seconds % 3600 == 0) return std::to_string(seconds / 3600) + "h";
    if (seconds % 60 == 0) return std::to_string(seconds / 60) + "m";
    return std::to_string(seconds) + "s";
}

std::string format_number(double v) {
    // Fixed notation: the DSL grammar has no exponent form.
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
    if (ec != std::errc{}) return "0";
    return std::string(buf, p);
}

}  // namespace vitalog
