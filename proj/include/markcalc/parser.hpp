#pragma once

#include "markcalc/term.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace markcalc {

/// Byte range [start, end) into the parsed text.
struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, SourceSpan span, std::vector<std::string> expected = {})
        : std::runtime_error(msg), span_(span), expected_(std::move(expected)) {}

    const SourceSpan& span() const { return span_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    SourceSpan span_;
    std::vector<std::string> expected_;
};

template <Calculus C>
struct ParseResult {
    Term<C> term;
    /// Span of every node created by the parser, keyed by Term::id().
    std::unordered_map<const void*, SourceSpan> spans;
};

namespace detail {

enum class Tok {
    End,
    Ident,
    Number,
    Lt,
    Gt,
    Comma,
    Dot,
    Plus,
    Bars,
    Slash,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Arrow,
};

inline const char* tok_name(Tok t) {
    switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Plus: return "'+'";
    case Tok::Bars: return "'||'";
    case Tok::Slash: return "'/'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Arrow: return "'->'";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string_view text;
    SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_ident_start = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto is_ident_char = [&](char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); };
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    while (i < src.size()) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                ++i;
            continue;
        }
        const std::size_t start = i;
        auto push = [&](Tok k, std::size_t len) {
            out.push_back({k, src.substr(start, len), {start, start + len}});
            i = start + len;
        };
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && is_ident_char(src[j]))
                ++j;
            push(Tok::Ident, j - i);
            continue;
        }
        if (is_digit(c)) {
            std::size_t j = i;
            while (j < src.size() && is_digit(src[j]))
                ++j;
            if (j + 1 < src.size() && src[j] == '.' && is_digit(src[j + 1])) {
                ++j;
                while (j < src.size() && is_digit(src[j]))
                    ++j;
            }
            push(Tok::Number, j - i);
            continue;
        }
        switch (c) {
        case '<': push(Tok::Lt, 1); continue;
        case '>': push(Tok::Gt, 1); continue;
        case ',': push(Tok::Comma, 1); continue;
        case '.': push(Tok::Dot, 1); continue;
        case '+': push(Tok::Plus, 1); continue;
        case '/': push(Tok::Slash, 1); continue;
        case '[': push(Tok::LBrack, 1); continue;
        case ']': push(Tok::RBrack, 1); continue;
        case '{': push(Tok::LBrace, 1); continue;
        case '}': push(Tok::RBrace, 1); continue;
        case '(': push(Tok::LParen, 1); continue;
        case ')': push(Tok::RParen, 1); continue;
        case '|':
            if (i + 1 < src.size() && src[i + 1] == '|') {
                push(Tok::Bars, 2);
                continue;
            }
            break;
        case '-':
            if (i + 1 < src.size() && src[i + 1] == '>') {
                push(Tok::Arrow, 2);
                continue;
            }
            break;
        default:
            break;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", {i, i + 1});
    }
    out.push_back({Tok::End, {}, {src.size(), src.size()}});
    return out;
}

template <Calculus C>
class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

    ParseResult<C> run() {
        Term<C> t = choice();
        if (peek().kind != Tok::End)
            fail({"'+'", "'||'", "'/'", "'['", "end of input"});
        return {t, std::move(spans_)};
    }

private:
    static constexpr bool kIt = std::is_same_v<C, It>;

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string msg = "syntax error at byte " + std::to_string(t.span.start) + ": found " +
                          (t.kind == Tok::End ? std::string("end of input") : "'" + std::string(t.text) + "'") +
                          ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i)
            msg += (i ? (i + 1 == expected.size() ? " or " : ", ") : "") + expected[i];
        throw ParseError(msg, t.span, std::move(expected));
    }

    const Token& expect(Tok k) {
        if (peek().kind != k)
            fail({tok_name(k)});
        return next();
    }

    Term<C> mark(Term<C> t, std::size_t start) {
        const std::size_t end = pos_ > 0 ? toks_[pos_ - 1].span.end : start;
        spans_.emplace(t.id(), SourceSpan{start, std::max(start, end)});
        return t;
    }

    Term<C> choice() {
        const std::size_t start = peek().span.start;
        Term<C> t = par();
        while (peek().kind == Tok::Plus) {
            next();
            t = mark(Term<C>::choice(t, par()), start);
        }
        return t;
    }

    Term<C> par() {
        const std::size_t start = peek().span.start;
        Term<C> t = postfix();
        while (peek().kind == Tok::Bars) {
            next();
            NameSet s = nameset();
            t = mark(Term<C>::par(t, postfix(), std::move(s)), start);
        }
        return t;
    }

    Term<C> postfix() {
        const std::size_t start = peek().span.start;
        Term<C> t = prefix();
        for (;;) {
            if (peek().kind == Tok::Slash) {
                next();
                t = mark(Term<C>::hide(t, nameset()), start);
            } else if (peek().kind == Tok::LBrack) {
                next();
                t = mark(Term<C>::relabel(t, relabeling()), start);
            } else {
                return t;
            }
        }
    }

    Term<C> prefix() {
        const Token& first = peek();
        const std::size_t start = first.span.start;
        if constexpr (kIt) {
            if (first.kind == Tok::Lt) {
                next();
                ActionName a = action_name();
                expect(Tok::Comma);
                Rate r = rate();
                expect(Tok::Gt);
                expect(Tok::Dot);
                return mark(Term<C>::prefix(std::move(a), r, prefix()), start);
            }
        } else {
            if (first.kind == Tok::Ident && peek(1).kind == Tok::Dot && first.text != "rec") {
                ActionName a = action_name();
                expect(Tok::Dot);
                return mark(Term<C>::act(std::move(a), prefix()), start);
            }
            if (first.kind == Tok::LParen && peek(1).kind == Tok::Number) {
                next();
                Rate r = rate();
                expect(Tok::RParen);
                expect(Tok::Dot);
                return mark(Term<C>::delay(r, prefix()), start);
            }
        }
        return atom();
    }

    Term<C> atom() {
        const Token& t = peek();
        const std::size_t start = t.span.start;
        if (t.kind == Tok::LParen) {
            next();
            Term<C> inner = choice();
            expect(Tok::RParen);
            return inner;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "nil") {
                next();
                return mark(Term<C>::nil(), start);
            }
            if (t.text == "rec") {
                next();
                std::string x = variable();
                expect(Tok::Dot);
                return mark(Term<C>::rec(std::move(x), choice()), start);
            }
            if (t.text == "tau")
                throw ParseError("'tau' is reserved and cannot be used as a variable", t.span);
            std::string x(next().text);
            return mark(Term<C>::var(std::move(x)), start);
        }
        if constexpr (kIt)
            fail({"'nil'", "'<'", "'rec'", "variable", "'('"});
        else
            fail({"'nil'", "action name", "'(' rate ')'", "'rec'", "variable", "'('"});
    }

    std::string variable() {
        const Token& t = peek();
        if (t.kind != Tok::Ident)
            fail({"variable"});
        if (t.text == "nil" || t.text == "rec" || t.text == "tau")
            throw ParseError("'" + std::string(t.text) + "' is reserved", t.span);
        return std::string(next().text);
    }

    ActionName action_name() {
        const Token& t = peek();
        if (t.kind != Tok::Ident)
            fail({"action name"});
        next();
        if (t.text == kTauName)
            return ActionName::tau();
        if (!is_visible_identifier(t.text))
            throw ParseError("invalid action name '" + std::string(t.text) + "'", t.span);
        return ActionName::visible(std::string(t.text));
    }

    std::string visible_name() {
        const Token& t = peek();
        if (t.kind != Tok::Ident)
            fail({"visible action name"});
        next();
        if (t.text == kTauName)
            throw ParseError("action visibility violated: tau is not a visible name", t.span);
        if (!is_visible_identifier(t.text))
            throw ParseError("invalid action name '" + std::string(t.text) + "'", t.span);
        return std::string(t.text);
    }

    Rate rate() {
        const Token& num = peek();
        if (num.kind != Tok::Number)
            fail({"rate"});
        next();
        std::string text(num.text);
        SourceSpan span = num.span;
        if (peek().kind == Tok::Slash && peek(1).kind == Tok::Number) {
            next();
            const Token& den = next();
            text += "/" + std::string(den.text);
            span.end = den.span.end;
        }
        Rate r;
        if (!Rate::parse(text, r))
            throw ParseError("invalid rate literal '" + text + "'", span);
        if (!r.is_positive())
            throw ParseError("rate must be positive", span);
        return r;
    }

    NameSet nameset() {
        expect(Tok::LBrace);
        NameSet s;
        if (peek().kind != Tok::RBrace) {
            s.insert(visible_name());
            while (peek().kind == Tok::Comma) {
                next();
                s.insert(visible_name());
            }
        }
        expect(Tok::RBrace);
        return s;
    }

    Relabeling relabeling() {
        Relabeling phi;
        auto pair = [&] {
            const std::size_t start = peek().span.start;
            std::string from = visible_name();
            expect(Tok::Arrow);
            std::string to = visible_name();
            if (phi.pairs().count(from))
                throw ParseError("relabeling maps '" + from + "' twice", {start, toks_[pos_ - 1].span.end});
            phi.add(from, to);
        };
        if (peek().kind != Tok::RBrack) {
            pair();
            while (peek().kind == Tok::Comma) {
                next();
                pair();
            }
        }
        expect(Tok::RBrack);
        return phi;
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::unordered_map<const void*, SourceSpan> spans_;
};

// Binding levels, loosest first.
enum Level { kChoice = 1, kPar = 2, kPostfix = 3, kPrefix = 4, kAtom = 5 };

inline int level_of(Kind k) {
    switch (k) {
    case Kind::Choice: return kChoice;
    case Kind::Par: return kPar;
    case Kind::Hide:
    case Kind::Relab: return kPostfix;
    case Kind::Prefix:
    case Kind::ActPrefix:
    case Kind::TimePrefix: return kPrefix;
    case Kind::Rec: return 0;
    default: return kAtom;
    }
}

inline std::string names_text(const NameSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& n : s) {
        out += (first ? "" : ",") + n;
        first = false;
    }
    return out + "}";
}

// `rightmost`: nothing follows this term at any enclosing level, so a
// trailing `rec` body may extend to the end.
template <Calculus C>
void print_into(std::string& out, const Term<C>& t, int ctx, bool rightmost) {
    const int lvl = level_of(t.kind());
    const bool paren = (t.kind() == Kind::Rec) ? !rightmost : lvl < ctx;
    if (paren) {
        out += '(';
        rightmost = true;
    }
    switch (t.kind()) {
    case Kind::Nil:
        out += "nil";
        break;
    case Kind::Var:
        out += t.var_name();
        break;
    case Kind::Prefix:
        out += "<" + t.name().str() + "," + t.rate().to_string() + ">.";
        print_into(out, t.body(), kPrefix, rightmost);
        break;
    case Kind::ActPrefix:
        out += t.name().str() + ".";
        print_into(out, t.body(), kPrefix, rightmost);
        break;
    case Kind::TimePrefix:
        out += "(" + t.rate().to_string() + ").";
        print_into(out, t.body(), kPrefix, rightmost);
        break;
    case Kind::Choice:
        print_into(out, t.left(), kChoice, false);
        out += " + ";
        print_into(out, t.right(), kPar, rightmost);
        break;
    case Kind::Par:
        print_into(out, t.left(), kPar, false);
        out += " ||" + names_text(t.names()) + " ";
        print_into(out, t.right(), kPostfix, rightmost);
        break;
    case Kind::Hide:
        print_into(out, t.body(), kPostfix, false);
        out += " / " + names_text(t.names());
        break;
    case Kind::Relab: {
        print_into(out, t.body(), kPostfix, false);
        out += "[";
        bool first = true;
        for (const auto& [from, to] : t.relabeling().pairs()) {
            out += (first ? "" : ",") + from + "->" + to;
            first = false;
        }
        out += "]";
        break;
    }
    case Kind::Rec: {
        out += "rec " + t.var_name() + ".";
        // Binary bodies are bracketed for readability even though the body
        // would extend to the right anyway.
        const bool wrap = is_binary(t.body().kind());
        if (wrap)
            out += '(';
        print_into(out, t.body(), kChoice, true);
        if (wrap)
            out += ')';
        break;
    }
    }
    if (paren)
        out += ')';
}

} // namespace detail

inline ParseResult<It> parse_it_with_spans(std::string_view text) { return detail::Parser<It>(text).run(); }
inline ParseResult<Ot> parse_ot_with_spans(std::string_view text) { return detail::Parser<Ot>(text).run(); }

/// Parses an ITMPC term. Only syntax is checked; see check_well_formed.
inline ItTerm parse_it(std::string_view text) { return parse_it_with_spans(text).term; }
inline OtTerm parse_ot(std::string_view text) { return parse_ot_with_spans(text).term; }

template <Calculus C>
ParseResult<C> parse_with_spans(std::string_view text) {
    return detail::Parser<C>(text).run();
}

template <Calculus C>
Term<C> parse(std::string_view text) {
    return parse_with_spans<C>(text).term;
}

/// Canonical text with the fewest parentheses needed to parse back to t.
template <Calculus C>
std::string print(const Term<C>& t) {
    std::string out;
    detail::print_into(out, t, detail::kChoice, true);
    return out;
}

inline std::string print_it(const ItTerm& t) { return print(t); }
inline std::string print_ot(const OtTerm& t) { return print(t); }

} // namespace markcalc
