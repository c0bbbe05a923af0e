#ifndef NMR_PARSER_HPP
#define NMR_PARSER_HPP

// Text formats.
//
//   .elp   head :- a, not b, -c(X), not -d(X+1).     facts: head.
//   .dl    b.                        fact
//          a1 & a2 -> b.             implication (with contrapositives)
//          a1 & a2 => b.             implication, direct rule only
//          a1 & a2 : b.              normal default
//          a1 & a2 : b [c1, c2].     semi-normal default
//          name :: <statement>       optional label on any rule statement
//
// '%' starts a line comment. '-' is strong negation and binds tighter than
// 'not'.

#include "nmr/term.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

namespace nmr {

struct SourceSpan {
    std::string file;
    int line = 1;
    int column = 1;
};

class ParseError : public std::runtime_error {
public:
    ParseError(SourceSpan span, const std::string &message)
        : std::runtime_error(span.file + ":" + std::to_string(span.line) + ":" +
                             std::to_string(span.column) + ": " + message),
          span_(std::move(span)), message_(message) {}

    const SourceSpan &span() const { return span_; }
    const std::string &message() const { return message_; }

private:
    SourceSpan span_;
    std::string message_;
};

struct ParseOptions {
    std::string file = "<input>";
    int max_depth = 3;
};

namespace detail {

enum class Tok {
    Ident, Var, Int, LParen, RParen, Comma, Dot, If, Colon, Label, Amp, Arrow, DArrow,
    LBracket, RBracket, Minus, Plus, Not, End
};

struct Token {
    Tok kind;
    std::string text;
    int line, column;
};

class Lexer {
public:
    Lexer(std::string_view text, std::string file) : src_(text), file_(std::move(file)) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip();
            int l = line_, c = col_;
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", l, c});
                return out;
            }
            char ch = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                std::string w;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    w += advance();
                Tok k = (std::isupper(static_cast<unsigned char>(w[0])) || w[0] == '_') ? Tok::Var
                                                                                        : Tok::Ident;
                if (w == "not" && (pos_ >= src_.size() || src_[pos_] != '(')) k = Tok::Not;
                out.push_back({k, w, l, c});
            } else if (std::isdigit(static_cast<unsigned char>(ch))) {
                std::string w;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    w += advance();
                out.push_back({Tok::Int, w, l, c});
            } else {
                out.push_back(punct(l, c));
            }
        }
    }

private:
    char advance() {
        char ch = src_[pos_++];
        if (ch == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return ch;
    }

    void skip() {
        while (pos_ < src_.size()) {
            char ch = src_[pos_];
            if (ch == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                advance();
            } else {
                break;
            }
        }
    }

    bool next_is(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    Token punct(int l, int c) {
        auto two = [&](Tok k, const char *t) {
            advance();
            advance();
            return Token{k, t, l, c};
        };
        if (next_is(":-")) return two(Tok::If, ":-");
        if (next_is("::")) return two(Tok::Label, "::");
        if (next_is("->")) return two(Tok::Arrow, "->");
        if (next_is("=>")) return two(Tok::DArrow, "=>");
        char ch = advance();
        switch (ch) {
        case '(': return {Tok::LParen, "(", l, c};
        case ')': return {Tok::RParen, ")", l, c};
        case ',': return {Tok::Comma, ",", l, c};
        case '.': return {Tok::Dot, ".", l, c};
        case ':': return {Tok::Colon, ":", l, c};
        case '&': return {Tok::Amp, "&", l, c};
        case '[': return {Tok::LBracket, "[", l, c};
        case ']': return {Tok::RBracket, "]", l, c};
        case '-': return {Tok::Minus, "-", l, c};
        case '+': return {Tok::Plus, "+", l, c};
        default: break;
        }
        throw ParseError({file_, l, c}, std::string("unexpected character '") + ch + "'");
    }

    std::string_view src_;
    std::string file_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class Parser {
public:
    Parser(std::string_view text, ParseOptions opts)
        : opts_(std::move(opts)), toks_(Lexer(text, opts_.file).run()) {}

    bool at_end() const { return peek().kind == Tok::End; }

    // .elp statement
    Rule rule() {
        Rule r;
        r.head = literal();
        if (accept(Tok::If)) {
            do {
                if (accept(Tok::Not))
                    r.body_neg.push_back(literal());
                else
                    r.body_pos.push_back(literal());
            } while (accept(Tok::Comma));
        }
        expect(Tok::Dot, "'.'");
        return r;
    }

    // .dl statement; returns either a fact or a rule
    void dl_statement(DefaultTheory &out) {
        std::string label;
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::Label) {
            label = next().text;
            next();
        }
        DefaultRule d;
        d.label = label;
        if (accept(Tok::Colon)) {
            default_tail(d);
            out.rules.push_back(std::move(d));
            return;
        }
        std::vector<Literal> conj{literal()};
        while (accept(Tok::Amp)) conj.push_back(literal());

        if (accept(Tok::Dot)) {
            if (conj.size() != 1 || !label.empty())
                fail(previous(), "a conjunction is not a statement; write one fact per line");
            out.facts.push_back(std::move(conj.front()));
            return;
        }
        d.prerequisites = std::move(conj);
        bool directed = peek().kind == Tok::DArrow;
        if (accept(Tok::Arrow) || accept(Tok::DArrow)) {
            d.contrapositives = !directed;
            d.kind = DefaultRule::Kind::Implication;
            d.consequent = literal();
            expect(Tok::Dot, "'.'");
        } else if (accept(Tok::Colon)) {
            default_tail(d);
        } else {
            fail(peek(), "expected '.', '->', '=>' or ':'");
        }
        out.rules.push_back(std::move(d));
    }

private:
    void default_tail(DefaultRule &d) {
        d.consequent = literal();
        d.kind = DefaultRule::Kind::NormalDefault;
        if (peek().kind == Tok::LBracket) {
            const Token &open = next();
            if (peek().kind == Tok::RBracket) fail(open, "empty constraint list");
            do d.constraints.push_back(literal());
            while (accept(Tok::Comma));
            expect(Tok::RBracket, "']'");
            d.kind = DefaultRule::Kind::SemiNormalDefault;
        }
        expect(Tok::Dot, "'.'");
    }

    Literal literal() {
        Literal l;
        if (accept(Tok::Minus)) l.strong_negation = true;
        const Token &t = peek();
        if (t.kind != Tok::Ident) fail(t, "expected a predicate name");
        l.predicate = next().text;
        if (accept(Tok::LParen)) {
            do l.args.push_back(term(1));
            while (accept(Tok::Comma));
            expect(Tok::RParen, "')'");
        }
        return l;
    }

    Term term(int depth) {
        const Token &t = peek();
        switch (t.kind) {
        case Tok::Var: {
            next();
            return offset_suffix(Term::variable(t.text));
        }
        case Tok::Int: return offset_suffix(Term::integer(integer(next())));
        case Tok::Minus: {
            next();
            const Token &n = peek();
            if (n.kind != Tok::Int) fail(n, "expected an integer after '-'");
            return offset_suffix(Term::integer(-integer(next())));
        }
        case Tok::Ident: {
            next();
            if (!accept(Tok::LParen)) return Term::constant(t.text);
            if (depth > opts_.max_depth)
                fail(t, "term nesting exceeds depth limit " + std::to_string(opts_.max_depth));
            std::vector<Term> args;
            do args.push_back(term(depth + 1));
            while (accept(Tok::Comma));
            expect(Tok::RParen, "')'");
            return Term::application(t.text, std::move(args));
        }
        default: fail(t, "expected a term");
        }
    }

    Term offset_suffix(Term base) {
        if (peek().kind != Tok::Plus && peek().kind != Tok::Minus) return base;
        bool minus = next().kind == Tok::Minus;
        const Token &n = peek();
        if (n.kind != Tok::Int) fail(n, "expected an integer offset");
        std::int64_t k = integer(next());
        return Term::offset(std::move(base), minus ? -k : k);
    }

    std::int64_t integer(const Token &t) {
        try {
            return std::stoll(t.text);
        } catch (const std::out_of_range &) {
            fail(t, "integer out of range");
        }
    }

    const Token &peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token &next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    const Token &previous() const { return toks_[pos_ ? pos_ - 1 : 0]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        next();
        return true;
    }
    void expect(Tok k, const char *what) {
        if (!accept(k)) fail(peek(), std::string("expected ") + what);
    }
    [[noreturn]] void fail(const Token &t, const std::string &msg) const {
        std::string m = msg;
        if (t.kind != Tok::End) m += " near '" + t.text + "'";
        else m += " at end of input";
        throw ParseError({opts_.file, t.line, t.column}, m);
    }

    ParseOptions opts_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Program parse_program(std::string_view text, ParseOptions opts = {}) {
    detail::Parser p(text, std::move(opts));
    Program out;
    while (!p.at_end()) out.rules.push_back(p.rule());
    return out;
}

inline DefaultTheory parse_default_theory(std::string_view text, ParseOptions opts = {}) {
    detail::Parser p(text, std::move(opts));
    DefaultTheory out;
    while (!p.at_end()) p.dl_statement(out);
    return out;
}

inline std::string serialize_program(const Program &p) {
    std::string out;
    for (const auto &r : p.rules) out += to_string(r) + "\n";
    return out;
}

inline std::string to_string(const DefaultRule &d) {
    std::string s = d.label.empty() ? "" : d.label + " :: ";
    if (d.kind == DefaultRule::Kind::Implication || !d.prerequisites.empty()) {
        for (std::size_t i = 0; i < d.prerequisites.size(); ++i) {
            if (i) s += " & ";
            s += to_string(d.prerequisites[i]);
        }
        s += " ";
    }
    if (d.kind == DefaultRule::Kind::Implication) {
        s += (d.contrapositives ? "-> " : "=> ") + to_string(d.consequent);
    } else {
        s += ": " + to_string(d.consequent);
        if (!d.constraints.empty()) {
            s += " [";
            for (std::size_t i = 0; i < d.constraints.size(); ++i) {
                if (i) s += ", ";
                s += to_string(d.constraints[i]);
            }
            s += "]";
        }
    }
    return s + ".";
}

inline std::string serialize_theory(const DefaultTheory &t) {
    std::string out;
    for (const auto &f : t.facts) out += to_string(f) + ".\n";
    for (const auto &r : t.rules) out += to_string(r) + "\n";
    return out;
}

inline std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace nmr

#endif
