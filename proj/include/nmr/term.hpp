#ifndef NMR_TERM_HPP
#define NMR_TERM_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nmr {

class TypeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Term
//
// Constants and variables are told apart lexically: variables start with an
// uppercase letter or '_'. An ArithOffset carries its base in args[0] and the
// signed offset in value; the base is a Variable or an Integer.
struct Term {
    enum class Kind : std::uint8_t { Constant, Integer, Variable, Application, ArithOffset };

    Kind kind = Kind::Constant;
    std::string name;
    std::int64_t value = 0;
    std::vector<Term> args;

    static Term constant(std::string n) { return Term{Kind::Constant, std::move(n), 0, {}}; }
    static Term integer(std::int64_t v) { return Term{Kind::Integer, {}, v, {}}; }
    static Term variable(std::string n) { return Term{Kind::Variable, std::move(n), 0, {}}; }
    static Term application(std::string functor, std::vector<Term> a) {
        if (a.empty()) throw TypeError("application '" + functor + "' needs at least one argument");
        return Term{Kind::Application, std::move(functor), 0, std::move(a)};
    }
    static Term offset(Term base, std::int64_t off) {
        if (base.kind != Kind::Variable && base.kind != Kind::Integer)
            throw TypeError("arithmetic offset base must be a variable or an integer");
        return Term{Kind::ArithOffset, {}, off, {std::move(base)}};
    }

    bool is_variable() const { return kind == Kind::Variable; }
    bool is_integer() const { return kind == Kind::Integer; }

    bool is_ground() const {
        if (kind == Kind::Variable) return false;
        return std::all_of(args.begin(), args.end(), [](const Term &t) { return t.is_ground(); });
    }

    // Application nesting: constants, integers and variables have depth 0.
    int depth() const {
        int d = 0;
        for (const auto &a : args) d = std::max(d, a.depth());
        return kind == Kind::Application ? d + 1 : d;
    }

    friend bool operator==(const Term &, const Term &) = default;

    // Total order over (kind, name/value, args).
    friend std::strong_ordering operator<=>(const Term &a, const Term &b) {
        if (auto c = a.kind <=> b.kind; c != 0) return c;
        if (auto c = a.value <=> b.value; c != 0) return c;
        if (auto c = a.name.compare(b.name) <=> 0; c != 0) return c;
        return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                      b.args.end());
    }
};

struct Literal {
    bool strong_negation = false;
    std::string predicate;
    std::vector<Term> args;

    Literal() = default;
    Literal(std::string pred, std::vector<Term> a = {}, bool neg = false)
        : strong_negation(neg), predicate(std::move(pred)), args(std::move(a)) {}

    bool is_ground() const {
        return std::all_of(args.begin(), args.end(), [](const Term &t) { return t.is_ground(); });
    }

    friend bool operator==(const Literal &, const Literal &) = default;

    friend std::strong_ordering operator<=>(const Literal &a, const Literal &b) {
        if (auto c = a.predicate.compare(b.predicate) <=> 0; c != 0) return c;
        if (auto c = std::lexicographical_compare_three_way(a.args.begin(), a.args.end(),
                                                            b.args.begin(), b.args.end());
            c != 0)
            return c;
        return a.strong_negation <=> b.strong_negation;
    }
};

inline Literal complement(Literal l) {
    l.strong_negation = !l.strong_negation;
    return l;
}

struct Rule {
    Literal head;
    std::vector<Literal> body_pos;
    std::vector<Literal> body_neg;

    bool is_fact() const { return body_pos.empty() && body_neg.empty(); }
    bool is_ground() const {
        auto g = [](const Literal &l) { return l.is_ground(); };
        return head.is_ground() && std::all_of(body_pos.begin(), body_pos.end(), g) &&
               std::all_of(body_neg.begin(), body_neg.end(), g);
    }

    friend bool operator==(const Rule &, const Rule &) = default;
    friend std::strong_ordering operator<=>(const Rule &a, const Rule &b) {
        if (auto c = a.head <=> b.head; c != 0) return c;
        if (auto c = std::lexicographical_compare_three_way(a.body_pos.begin(), a.body_pos.end(),
                                                            b.body_pos.begin(), b.body_pos.end());
            c != 0)
            return c;
        return std::lexicographical_compare_three_way(a.body_neg.begin(), a.body_neg.end(),
                                                      b.body_neg.begin(), b.body_neg.end());
    }
};

struct Program {
    std::vector<Rule> rules;
    friend bool operator==(const Program &, const Program &) = default;
};

struct DefaultRule {
    enum class Kind : std::uint8_t { Implication, NormalDefault, SemiNormalDefault };

    Kind kind = Kind::Implication;
    std::vector<Literal> prerequisites;
    Literal consequent;
    std::vector<Literal> constraints;
    // Implications only: emit contrapositive rules (written `->`; `=>` turns them off).
    bool contrapositives = true;
    // Optional name used for provenance and derivation traces.
    std::string label;

    bool well_formed() const {
        return (kind == Kind::SemiNormalDefault) == !constraints.empty();
    }

    friend bool operator==(const DefaultRule &, const DefaultRule &) = default;
};

struct DefaultTheory {
    std::vector<Literal> facts;
    std::vector<DefaultRule> rules;
    friend bool operator==(const DefaultTheory &, const DefaultTheory &) = default;
};

using Substitution = std::map<std::string, Term>;

// ---------------------------------------------------------------------------
// printing

inline std::string to_string(const Term &t) {
    switch (t.kind) {
    case Term::Kind::Constant:
    case Term::Kind::Variable: return t.name;
    case Term::Kind::Integer: return std::to_string(t.value);
    case Term::Kind::ArithOffset:
        return to_string(t.args[0]) + (t.value < 0 ? "-" : "+") +
               std::to_string(t.value < 0 ? -t.value : t.value);
    case Term::Kind::Application: {
        std::string s = t.name + "(";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i) s += ",";
            s += to_string(t.args[i]);
        }
        return s + ")";
    }
    }
    return {};
}

inline std::string to_string(const Literal &l) {
    std::string s = l.strong_negation ? "-" : "";
    s += l.predicate;
    if (!l.args.empty()) {
        s += "(";
        for (std::size_t i = 0; i < l.args.size(); ++i) {
            if (i) s += ",";
            s += to_string(l.args[i]);
        }
        s += ")";
    }
    return s;
}

inline std::string to_string(const Rule &r) {
    std::string s = to_string(r.head);
    if (!r.is_fact()) {
        s += " :- ";
        bool first = true;
        for (const auto &l : r.body_pos) {
            if (!first) s += ", ";
            first = false;
            s += to_string(l);
        }
        for (const auto &l : r.body_neg) {
            if (!first) s += ", ";
            first = false;
            s += "not " + to_string(l);
        }
    }
    return s + ".";
}

// ---------------------------------------------------------------------------
// hashing

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

struct TermHash {
    std::size_t operator()(const Term &t) const {
        std::size_t h = std::hash<int>{}(static_cast<int>(t.kind));
        h = hash_combine(h, std::hash<std::string>{}(t.name));
        h = hash_combine(h, std::hash<std::int64_t>{}(t.value));
        for (const auto &a : t.args) h = hash_combine(h, (*this)(a));
        return h;
    }
};

struct LiteralHash {
    std::size_t operator()(const Literal &l) const {
        std::size_t h = std::hash<std::string>{}(l.predicate);
        h = hash_combine(h, l.strong_negation ? 1 : 2);
        for (const auto &a : l.args) h = hash_combine(h, TermHash{}(a));
        return h;
    }
};

struct RuleHash {
    std::size_t operator()(const Rule &r) const {
        std::size_t h = LiteralHash{}(r.head);
        for (const auto &l : r.body_pos) h = hash_combine(h, LiteralHash{}(l));
        h = hash_combine(h, 0x51);
        for (const auto &l : r.body_neg) h = hash_combine(h, LiteralHash{}(l));
        return h;
    }
};

// ---------------------------------------------------------------------------
// variables

inline void collect_variables(const Term &t, std::vector<std::string> &out) {
    if (t.is_variable()) {
        if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
        return;
    }
    for (const auto &a : t.args) collect_variables(a, out);
}

inline void collect_variables(const Literal &l, std::vector<std::string> &out) {
    for (const auto &a : l.args) collect_variables(a, out);
}

inline std::vector<std::string> variables_of(const Literal &l) {
    std::vector<std::string> out;
    collect_variables(l, out);
    return out;
}

inline std::vector<std::string> variables_of(const Rule &r) {
    std::vector<std::string> out;
    for (const auto &l : r.body_pos) collect_variables(l, out);
    collect_variables(r.head, out);
    for (const auto &l : r.body_neg) collect_variables(l, out);
    return out;
}

// ---------------------------------------------------------------------------
// substitution

inline Term apply_substitution(const Term &t, const Substitution &s) {
    switch (t.kind) {
    case Term::Kind::Constant:
    case Term::Kind::Integer: return t;
    case Term::Kind::Variable: {
        auto it = s.find(t.name);
        return it == s.end() ? t : it->second;
    }
    case Term::Kind::ArithOffset: {
        Term base = apply_substitution(t.args[0], s);
        if (base.is_integer()) return Term::integer(base.value + t.value);
        if (base.is_variable()) return Term{Term::Kind::ArithOffset, {}, t.value, {std::move(base)}};
        throw TypeError("arithmetic on non-integer term " + to_string(base));
    }
    case Term::Kind::Application: {
        Term out = t;
        for (auto &a : out.args) a = apply_substitution(a, s);
        return out;
    }
    }
    return t;
}

inline Literal apply_substitution(const Literal &l, const Substitution &s) {
    Literal out = l;
    for (auto &a : out.args) a = apply_substitution(a, s);
    return out;
}

inline Rule apply_substitution(const Rule &r, const Substitution &s) {
    Rule out;
    out.head = apply_substitution(r.head, s);
    out.body_pos.reserve(r.body_pos.size());
    for (const auto &l : r.body_pos) out.body_pos.push_back(apply_substitution(l, s));
    out.body_neg.reserve(r.body_neg.size());
    for (const auto &l : r.body_neg) out.body_neg.push_back(apply_substitution(l, s));
    return out;
}

// ---------------------------------------------------------------------------
// one-sided matching

namespace detail {

inline bool bind_var(const std::string &var, const Term &value, Substitution &s) {
    auto [it, inserted] = s.emplace(var, value);
    return inserted || it->second == value;
}

inline bool match_term(const Term &p, const Term &g, Substitution &s) {
    switch (p.kind) {
    case Term::Kind::Variable: return bind_var(p.name, g, s);
    case Term::Kind::Constant:
    case Term::Kind::Integer: return p == g;
    case Term::Kind::ArithOffset: {
        // X+k matches integer n by binding X to n-k.
        if (!g.is_integer()) return false;
        const Term &base = p.args[0];
        if (base.is_integer()) return base.value + p.value == g.value;
        return bind_var(base.name, Term::integer(g.value - p.value), s);
    }
    case Term::Kind::Application:
        if (g.kind != Term::Kind::Application || g.name != p.name || g.args.size() != p.args.size())
            return false;
        for (std::size_t i = 0; i < p.args.size(); ++i)
            if (!match_term(p.args[i], g.args[i], s)) return false;
        return true;
    }
    return false;
}

} // namespace detail

inline std::optional<Substitution> match(const Literal &pattern, const Literal &ground,
                                         Substitution seed = {}) {
    if (pattern.strong_negation != ground.strong_negation || pattern.predicate != ground.predicate ||
        pattern.args.size() != ground.args.size())
        return std::nullopt;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!detail::match_term(pattern.args[i], ground.args[i], seed)) return std::nullopt;
    return seed;
}

} // namespace nmr

template <> struct std::hash<nmr::Term> : nmr::TermHash {};
template <> struct std::hash<nmr::Literal> : nmr::LiteralHash {};
template <> struct std::hash<nmr::Rule> : nmr::RuleHash {};

#endif
