#ifndef NMR_DL2ELP_HPP
#define NMR_DL2ELP_HPP

// Default theory -> extended logic program.
//
//   fact a                      a.
//   a1 & .. & an -> b           b :- a1..an.   plus, for each i,
//                               -ai :- -b, a1..a(i-1), a(i+1)..an.
//   a1 & .. & an : b            b :- a1..an, not -b.
//   a1 & .. & an : b [c1..ck]   b :- a1..an, not -b, not -c1, .., not -ck.

#include "nmr/term.hpp"

namespace nmr {

struct Provenance {
    enum class Source : std::uint8_t { Fact, Implication, Contrapositive, NormalDefault, SemiNormalDefault };
    Source source;
    // Index into DefaultTheory::facts for facts, DefaultTheory::rules otherwise.
    std::size_t index;
    std::string label;
};

inline const char *to_string(Provenance::Source s) {
    switch (s) {
    case Provenance::Source::Fact: return "fact";
    case Provenance::Source::Implication: return "implication";
    case Provenance::Source::Contrapositive: return "contrapositive";
    case Provenance::Source::NormalDefault: return "normal-default";
    case Provenance::Source::SemiNormalDefault: return "semi-normal-default";
    }
    return "?";
}

struct CompilationReport {
    Program produced_rules;
    std::vector<Provenance> rule_provenance; // parallel to produced_rules.rules
};

inline Rule compile_fact(const Literal &l) { return Rule{l, {}, {}}; }

inline std::vector<Rule> compile_implication(const DefaultRule &d) {
    if (d.kind != DefaultRule::Kind::Implication)
        throw std::invalid_argument("compile_implication: not an implication");
    if (d.prerequisites.empty()) return {compile_fact(d.consequent)};

    std::vector<Rule> out;
    out.push_back(Rule{d.consequent, d.prerequisites, {}});
    if (!d.contrapositives) return out;

    const Literal not_b = complement(d.consequent);
    for (std::size_t i = 0; i < d.prerequisites.size(); ++i) {
        Rule r{complement(d.prerequisites[i]), {not_b}, {}};
        for (std::size_t j = 0; j < d.prerequisites.size(); ++j)
            if (j != i) r.body_pos.push_back(d.prerequisites[j]);
        out.push_back(std::move(r));
    }
    return out;
}

inline Rule compile_normal_default(const DefaultRule &d) {
    if (d.kind != DefaultRule::Kind::NormalDefault)
        throw std::invalid_argument("compile_normal_default: not a normal default");
    return Rule{d.consequent, d.prerequisites, {complement(d.consequent)}};
}

inline Rule compile_seminormal_default(const DefaultRule &d) {
    if (d.kind != DefaultRule::Kind::SemiNormalDefault || d.constraints.empty())
        throw std::invalid_argument("compile_seminormal_default: needs a non-empty constraint list");
    Rule r{d.consequent, d.prerequisites, {complement(d.consequent)}};
    for (const auto &c : d.constraints) r.body_neg.push_back(complement(c));
    return r;
}

inline CompilationReport compile_theory(const DefaultTheory &t) {
    using S = Provenance::Source;
    CompilationReport rep;
    auto emit = [&](Rule r, S src, std::size_t idx, const std::string &label) {
        rep.produced_rules.rules.push_back(std::move(r));
        rep.rule_provenance.push_back({src, idx, label});
    };

    for (std::size_t i = 0; i < t.facts.size(); ++i) emit(compile_fact(t.facts[i]), S::Fact, i, {});

    for (std::size_t i = 0; i < t.rules.size(); ++i) {
        const DefaultRule &d = t.rules[i];
        if (!d.well_formed())
            throw std::invalid_argument("default rule " + std::to_string(i) +
                                        ": constraints must be non-empty exactly for semi-normal defaults");
        switch (d.kind) {
        case DefaultRule::Kind::Implication: {
            auto rules = compile_implication(d);
            for (std::size_t k = 0; k < rules.size(); ++k)
                emit(std::move(rules[k]), k == 0 ? S::Implication : S::Contrapositive, i, d.label);
            break;
        }
        case DefaultRule::Kind::NormalDefault:
            emit(compile_normal_default(d), S::NormalDefault, i, d.label);
            break;
        case DefaultRule::Kind::SemiNormalDefault:
            emit(compile_seminormal_default(d), S::SemiNormalDefault, i, d.label);
            break;
        }
    }
    return rep;
}

} // namespace nmr

#endif
