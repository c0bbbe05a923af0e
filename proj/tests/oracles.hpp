#pragma once

// Independent reference implementations and random input generators used by
// the unit, property and acceptance tests.

#include "nmr/nmr.hpp"

#include <random>

namespace oracle {

using namespace nmr;

// ---------------------------------------------------------------------------
// Reiter extensions of a variable-free default theory, by guess and check.
//
// Facts and implications form the strict part. An implication a1..an -> b is
// read as the inference rule a1..an / b together with its contrapositives
// -b, a1..a(i-1), a(i+1)..an / -ai (none for =>). Belief sets are literal
// sets; an inconsistent one is the set of all literals.
//
// E is an extension iff E = Gamma(E), where Gamma(E) is the least literal set
// closed under the strict rules and under every default whose prerequisites
// it contains and whose justification (consequent plus constraints) is
// consistent with E.

struct LiteralUniverse {
    std::vector<Literal> lits; // sorted, complement-closed
    std::size_t index(const Literal &l) const {
        return static_cast<std::size_t>(std::lower_bound(lits.begin(), lits.end(), l) - lits.begin());
    }
};

inline LiteralUniverse universe_of(const DefaultTheory &t) {
    std::set<Literal> s;
    auto add = [&](const Literal &l) {
        s.insert(l);
        s.insert(complement(l));
    };
    for (const auto &f : t.facts) add(f);
    for (const auto &r : t.rules) {
        for (const auto &l : r.prerequisites) add(l);
        add(r.consequent);
        for (const auto &l : r.constraints) add(l);
    }
    return {{s.begin(), s.end()}};
}

using Bits = std::vector<char>;

struct InferenceRule {
    std::vector<std::size_t> premises;
    std::size_t conclusion;
};

inline bool consistent(const LiteralUniverse &u, const Bits &e) {
    for (std::size_t i = 0; i < u.lits.size(); ++i)
        if (e[i] && e[u.index(complement(u.lits[i]))]) return false;
    return true;
}

inline std::vector<std::vector<Literal>> reiter_extensions(const DefaultTheory &t) {
    const auto u = universe_of(t);
    const std::size_t n = u.lits.size();
    if (n > 20) throw std::invalid_argument("reiter_extensions: theory too large");

    std::vector<InferenceRule> strict;
    std::vector<std::size_t> facts;
    for (const auto &f : t.facts) facts.push_back(u.index(f));
    struct Def {
        std::vector<std::size_t> pre;
        std::vector<std::size_t> justification;
        std::size_t consequent;
    };
    std::vector<Def> defaults;
    for (const auto &r : t.rules) {
        std::vector<std::size_t> pre;
        for (const auto &l : r.prerequisites) pre.push_back(u.index(l));
        if (r.kind == DefaultRule::Kind::Implication) {
            strict.push_back({pre, u.index(r.consequent)});
            if (!r.contrapositives) continue;
            for (std::size_t i = 0; i < pre.size(); ++i) {
                InferenceRule c{{u.index(complement(r.consequent))}, u.index(complement(r.prerequisites[i]))};
                for (std::size_t j = 0; j < pre.size(); ++j)
                    if (j != i) c.premises.push_back(pre[j]);
                strict.push_back(c);
            }
        } else {
            Def d{pre, {u.index(r.consequent)}, u.index(r.consequent)};
            for (const auto &c : r.constraints) d.justification.push_back(u.index(c));
            defaults.push_back(d);
        }
    }

    // justification J is consistent with E: E plus J has no complementary pair
    auto justified = [&](const Def &d, const Bits &e, bool e_inconsistent) {
        if (e_inconsistent) return false;
        Bits with = e;
        for (auto j : d.justification) with[j] = 1;
        return consistent(u, with);
    };

    auto gamma = [&](const Bits &e) {
        const bool e_bad = !consistent(u, e);
        std::vector<char> usable(defaults.size());
        for (std::size_t i = 0; i < defaults.size(); ++i) usable[i] = justified(defaults[i], e, e_bad);
        Bits s(n, 0);
        for (auto f : facts) s[f] = 1;
        auto holds_all = [&](const std::vector<std::size_t> &v) {
            return std::all_of(v.begin(), v.end(), [&](std::size_t i) { return s[i] != 0; });
        };
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto &r : strict)
                if (!s[r.conclusion] && holds_all(r.premises)) s[r.conclusion] = changed = true;
            for (std::size_t i = 0; i < defaults.size(); ++i)
                if (usable[i] && !s[defaults[i].consequent] && holds_all(defaults[i].pre))
                    s[defaults[i].consequent] = changed = true;
        }
        if (!consistent(u, s)) std::fill(s.begin(), s.end(), 1);
        return s;
    };

    // candidates: each atom absent, positive or negative; plus all literals
    std::vector<std::pair<std::size_t, std::size_t>> atoms;
    for (std::size_t i = 0; i < n; ++i)
        if (!u.lits[i].strong_negation) atoms.push_back({i, u.index(complement(u.lits[i]))});
    std::vector<std::vector<Literal>> out;
    auto record = [&](const Bits &e) {
        std::vector<Literal> lits;
        for (std::size_t i = 0; i < n; ++i)
            if (e[i]) lits.push_back(u.lits[i]);
        out.push_back(std::move(lits));
    };
    std::vector<int> digit(atoms.size(), 0);
    for (;;) {
        Bits e(n, 0);
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            if (digit[a] == 1) e[atoms[a].first] = 1;
            if (digit[a] == 2) e[atoms[a].second] = 1;
        }
        if (gamma(e) == e) record(e);
        std::size_t k = 0;
        while (k < digit.size() && digit[k] == 2) digit[k++] = 0;
        if (k == digit.size()) break;
        ++digit[k];
    }
    Bits all(n, 1);
    if (gamma(all) == all) record(all);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// structural invariants of a set of answer sets

// Empty string when all hold; otherwise a description of the first violation.
inline std::string check_models(const GroundProgram &g, const std::vector<Interpretation> &models) {
    for (const auto &m : models) {
        if (!is_answer_set(g, m)) return "not a fixpoint of Cn(P^A): " + to_string(m);
        if (m.contradictory) continue;
        std::set<Literal> in(m.literals.begin(), m.literals.end());
        for (const auto &l : m.literals) {
            bool supported = std::any_of(g.rules.begin(), g.rules.end(), [&](const Rule &r) {
                return r.head == l &&
                       std::all_of(r.body_pos.begin(), r.body_pos.end(), [&](const Literal &b) { return in.count(b); }) &&
                       std::none_of(r.body_neg.begin(), r.body_neg.end(), [&](const Literal &b) { return in.count(b); });
            });
            if (!supported) return "unsupported literal " + to_string(l) + " in " + to_string(m);
        }
    }
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = 0; j < models.size(); ++j) {
            if (i == j) continue;
            const auto &a = models[i].literals, &b = models[j].literals;
            if (a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end()))
                return "not an antichain: " + to_string(models[i]) + " within " + to_string(models[j]);
            if (a == b) return "duplicate model " + to_string(models[i]);
        }
    return {};
}

// ---------------------------------------------------------------------------
// random inputs

inline Literal random_literal(std::mt19937 &rng, int atoms, int neg_percent = 40) {
    std::uniform_int_distribution<int> atom(0, atoms - 1);
    std::uniform_int_distribution<int> pct(0, 99);
    return Literal("p" + std::to_string(atom(rng)), {}, pct(rng) < neg_percent);
}

// Ground program over at most `atoms` atoms (so at most 2*atoms literals in
// its base).
inline GroundProgram random_ground_program(std::mt19937 &rng, int atoms) {
    std::uniform_int_distribution<int> nrules(1, 3 * atoms);
    std::uniform_int_distribution<int> npos(0, 2), nneg(0, 2);
    Program p;
    const int count = nrules(rng);
    for (int i = 0; i < count; ++i) {
        Rule r;
        r.head = random_literal(rng, atoms);
        for (int k = npos(rng); k > 0; --k) r.body_pos.push_back(random_literal(rng, atoms));
        for (int k = nneg(rng); k > 0; --k) r.body_neg.push_back(random_literal(rng, atoms));
        p.rules.push_back(std::move(r));
    }
    return as_ground(p);
}

// Variable-free theory with facts, implications, normal and semi-normal
// defaults. Justifications are kept internally consistent (no complementary
// pair among the consequent and the constraints).
inline DefaultTheory random_theory(std::mt19937 &rng, int atoms) {
    std::uniform_int_distribution<int> nfacts(0, 2), nrules(1, 5), kind(0, 2), npre(0, 2), ncons(1, 2);
    DefaultTheory t;
    for (int k = nfacts(rng); k > 0; --k) t.facts.push_back(random_literal(rng, atoms));
    for (int k = nrules(rng); k > 0; --k) {
        DefaultRule d;
        d.kind = static_cast<DefaultRule::Kind>(kind(rng));
        int n = npre(rng);
        if (d.kind == DefaultRule::Kind::Implication && n == 0) n = 1;
        for (int i = 0; i < n; ++i) d.prerequisites.push_back(random_literal(rng, atoms));
        d.consequent = random_literal(rng, atoms);
        if (d.kind == DefaultRule::Kind::SemiNormalDefault) {
            for (int c = ncons(rng); c > 0; --c) {
                Literal l = random_literal(rng, atoms);
                bool clash = complement(l) == d.consequent ||
                             std::find(d.constraints.begin(), d.constraints.end(), complement(l)) != d.constraints.end();
                if (!clash) d.constraints.push_back(l);
            }
            if (d.constraints.empty()) d.constraints.push_back(d.consequent);
        }
        t.rules.push_back(std::move(d));
    }
    return t;
}

inline std::vector<std::vector<Literal>> answer_sets_of(const DefaultTheory &t) {
    auto g = as_ground(compile_theory(t).produced_rules);
    // the compiled program only mentions literals it uses; widen to the
    // theory's universe so that an inconsistent result means all literals
    auto u = universe_of(t);
    std::vector<std::vector<Literal>> out;
    for (const auto &m : solve(g, {}).answer_sets)
        out.push_back(m.contradictory ? u.lits : m.literals);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace oracle
