#ifndef NMR_GROUNDER_HPP
#define NMR_GROUNDER_HPP

#include "nmr/term.hpp"

#include <atomic>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace nmr {

class GroundingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::set<std::string> &default_sort_names() {
    static const std::set<std::string> names{"vehicle", "object", "agent", "time", "property", "action"};
    return names;
}

// Finite domains for the sort predicates. A variable guarded by a positive
// sort atom in the body (or by a sort atom of either sign in the head) ranges
// over that sort; several guards intersect. Unguarded variables range over
// the program's Herbrand universe.
struct DomainMap {
    std::map<std::string, std::set<Term>> sorts;
    std::int64_t horizon = 0;

    bool is_sort(const std::string &name) const { return sorts.count(name) != 0; }
};

struct GroundProgram {
    static constexpr std::size_t domain_fact = std::numeric_limits<std::size_t>::max();

    std::vector<Rule> rules;        // canonical order, no duplicates
    std::vector<std::size_t> source; // index of the originating rule, or domain_fact
    std::vector<Literal> literal_base; // sorted, closed under complement
};

struct GroundOptions {
    unsigned threads = 0; // 0: hardware concurrency
    int max_depth = 3;
    // Skip instances whose positive body needs an extensional literal (one
    // that only ever occurs as a fact) that is not a fact. Sound, but it
    // changes the instance count, so it is off by default.
    bool prune_extensional = false;
};

inline DomainMap derive_domains(const Program &p, std::int64_t horizon,
                                const std::set<std::string> &sort_names = default_sort_names()) {
    if (horizon < 0) throw GroundingError("horizon must be non-negative");
    DomainMap d;
    d.horizon = horizon;

    std::set<std::string> derived;
    for (const auto &r : p.rules)
        if (!r.is_fact() && !r.head.strong_negation) derived.insert(r.head.predicate);

    for (const auto &s : sort_names)
        if (s == "time" || !derived.count(s)) d.sorts[s];

    auto add = [&](const std::string &sort, const Term &t) {
        if (auto it = d.sorts.find(sort); it != d.sorts.end() && sort != "time") it->second.insert(t);
    };
    for (const auto &r : p.rules) {
        if (!r.is_fact() || r.head.strong_negation || !r.head.is_ground()) continue;
        const Literal &h = r.head;
        if (h.args.size() == 1) add(h.predicate, h.args[0]);
        if (h.predicate == "pcb" && h.args.size() == 2) {
            add("action", h.args[0]);
            add("property", h.args[1]);
        }
    }
    if (d.sorts.count("time"))
        for (std::int64_t t = 0; t <= horizon; ++t) d.sorts["time"].insert(Term::integer(t));
    return d;
}

namespace detail {

inline void bound_variables(const Term &t, std::set<std::string> &out) {
    if (t.kind == Term::Kind::ArithOffset) return;
    if (t.is_variable()) out.insert(t.name);
    for (const auto &a : t.args) bound_variables(a, out);
}

inline void offset_variables(const Term &t, std::set<std::string> &out) {
    if (t.kind == Term::Kind::ArithOffset) {
        if (t.args[0].is_variable()) out.insert(t.args[0].name);
        return;
    }
    for (const auto &a : t.args) offset_variables(a, out);
}

// Checks every ArithOffset position of the pattern evaluated within [0, horizon].
inline bool offsets_in_range(const Term &pattern, const Term &inst, std::int64_t horizon) {
    if (pattern.kind == Term::Kind::ArithOffset)
        return inst.is_integer() && inst.value >= 0 && inst.value <= horizon;
    if (pattern.kind != Term::Kind::Application) return true;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!offsets_in_range(pattern.args[i], inst.args[i], horizon)) return false;
    return true;
}

inline bool offsets_in_range(const Literal &pattern, const Literal &inst, std::int64_t horizon) {
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!offsets_in_range(pattern.args[i], inst.args[i], horizon)) return false;
    return true;
}

inline bool within_depth(const Literal &l, int max_depth) {
    return std::all_of(l.args.begin(), l.args.end(), [&](const Term &t) { return t.depth() <= max_depth; });
}

inline void collect_ground_subterms(const Term &t, std::set<Term> &out) {
    if (t.kind == Term::Kind::ArithOffset) return;
    if (t.is_ground()) out.insert(t);
    for (const auto &a : t.args) collect_ground_subterms(a, out);
}

inline void normalize(std::vector<Literal> &v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

struct Signature {
    std::string predicate;
    std::size_t arity;
    bool negated;
    friend bool operator==(const Signature &, const Signature &) = default;
};

struct SignatureHash {
    std::size_t operator()(const Signature &s) const {
        return hash_combine(hash_combine(std::hash<std::string>{}(s.predicate), s.arity), s.negated);
    }
};

inline Signature signature(const Literal &l) { return {l.predicate, l.args.size(), l.strong_negation}; }

class RuleGrounder {
public:
    RuleGrounder(const DomainMap &d, const std::vector<Term> &herbrand,
                 const std::unordered_set<Literal> &facts,
                 const std::unordered_set<Signature, SignatureHash> &intensional, const GroundOptions &opts)
        : d_(d), herbrand_(herbrand), facts_(facts), intensional_(intensional), opts_(opts) {}

    void ground(const Rule &r, std::size_t index, std::vector<std::pair<Rule, std::size_t>> &out) const {
        const auto vars = variables_of(r);
        std::vector<std::vector<Term>> domains;
        domains.reserve(vars.size());
        for (const auto &v : vars) domains.push_back(domain_of(r, v));

        // body literals checked as soon as their variables are bound
        std::vector<std::vector<const Literal *>> checks(vars.size() + 1);
        if (opts_.prune_extensional) {
            for (const auto &l : r.body_pos) {
                if (intensional_.count(signature(l))) continue;
                std::size_t level = 0;
                for (const auto &v : variables_of(l))
                    level = std::max<std::size_t>(
                        level, std::find(vars.begin(), vars.end(), v) - vars.begin() + 1);
                checks[level].push_back(&l);
            }
        }

        Substitution s;
        enumerate(r, index, vars, domains, checks, 0, s, out);
    }

private:
    std::vector<Term> domain_of(const Rule &r, const std::string &var) const {
        const std::set<Term> *acc = nullptr;
        std::set<Term> scratch;
        auto guard = [&](const Literal &l) {
            if (l.args.size() != 1 || !l.args[0].is_variable() || l.args[0].name != var) return;
            auto it = d_.sorts.find(l.predicate);
            if (it == d_.sorts.end()) return;
            if (it->second.empty())
                throw GroundingError("sort '" + l.predicate + "' is referenced by rule '" + to_string(r) +
                                     "' but has an empty domain");
            if (!acc) {
                acc = &it->second;
                return;
            }
            std::set<Term> inter;
            std::set_intersection(acc->begin(), acc->end(), it->second.begin(), it->second.end(),
                                  std::inserter(inter, inter.begin()));
            scratch = std::move(inter);
            acc = &scratch;
        };
        for (const auto &l : r.body_pos)
            if (!l.strong_negation) guard(l);
        guard(r.head);
        if (!acc) return herbrand_;
        return {acc->begin(), acc->end()};
    }

    bool passes(const std::vector<const Literal *> &lits, const Substitution &s) const {
        for (const Literal *l : lits)
            if (!facts_.count(apply_substitution(*l, s))) return false;
        return true;
    }

    void enumerate(const Rule &r, std::size_t index, const std::vector<std::string> &vars,
                   const std::vector<std::vector<Term>> &domains,
                   const std::vector<std::vector<const Literal *>> &checks, std::size_t k, Substitution &s,
                   std::vector<std::pair<Rule, std::size_t>> &out) const {
        if (k == 0 && !passes(checks[0], s)) return;
        if (k == vars.size()) {
            emit(r, index, s, out);
            return;
        }
        for (const auto &value : domains[k]) {
            s[vars[k]] = value;
            try {
                if (!passes(checks[k + 1], s)) continue;
            } catch (const TypeError &) {
                continue;
            }
            enumerate(r, index, vars, domains, checks, k + 1, s, out);
        }
        s.erase(vars[k]);
    }

    void emit(const Rule &r, std::size_t index, const Substitution &s,
              std::vector<std::pair<Rule, std::size_t>> &out) const {
        Rule g;
        try {
            g = apply_substitution(r, s);
        } catch (const TypeError &) {
            return; // offset applied to a non-integer binding: no such instance
        }
        const auto h = d_.horizon;
        if (!offsets_in_range(r.head, g.head, h) || !within_depth(g.head, opts_.max_depth)) return;
        for (std::size_t i = 0; i < r.body_pos.size(); ++i)
            if (!offsets_in_range(r.body_pos[i], g.body_pos[i], h) ||
                !within_depth(g.body_pos[i], opts_.max_depth))
                return;
        // an out-of-range literal under default negation is simply false
        std::vector<Literal> neg;
        for (std::size_t i = 0; i < r.body_neg.size(); ++i)
            if (offsets_in_range(r.body_neg[i], g.body_neg[i], h) && within_depth(g.body_neg[i], opts_.max_depth))
                neg.push_back(std::move(g.body_neg[i]));
        g.body_neg = std::move(neg);
        normalize(g.body_pos);
        normalize(g.body_neg);
        out.emplace_back(std::move(g), index);
    }

    const DomainMap &d_;
    const std::vector<Term> &herbrand_;
    const std::unordered_set<Literal> &facts_;
    const std::unordered_set<Signature, SignatureHash> &intensional_;
    const GroundOptions &opts_;
};

} // namespace detail

// Variables in the head, under default negation or inside an offset must be
// bound by a positive body literal outside any offset. Returns the offending
// variables; empty means safe.
inline std::vector<std::string> check_safety(const Rule &r) {
    std::set<std::string> bound;
    for (const auto &l : r.body_pos)
        for (const auto &a : l.args) detail::bound_variables(a, bound);

    std::set<std::string> needed;
    for (const auto &v : variables_of(r.head)) needed.insert(v);
    for (const auto &l : r.body_neg)
        for (const auto &v : variables_of(l)) needed.insert(v);
    auto offsets = [&](const Literal &l) {
        for (const auto &a : l.args) detail::offset_variables(a, needed);
    };
    offsets(r.head);
    for (const auto &l : r.body_pos) offsets(l);
    for (const auto &l : r.body_neg) offsets(l);

    std::vector<std::string> out;
    for (const auto &v : needed)
        if (!bound.count(v)) out.push_back(v);
    return out;
}

inline std::vector<Term> herbrand_universe(const Program &p, const DomainMap &d) {
    std::set<Term> u;
    for (const auto &r : p.rules) {
        auto add = [&](const Literal &l) {
            for (const auto &a : l.args) detail::collect_ground_subterms(a, u);
        };
        add(r.head);
        for (const auto &l : r.body_pos) add(l);
        for (const auto &l : r.body_neg) add(l);
    }
    // time points count only when the program talks about time
    bool timed = false;
    for (const auto &r : p.rules) {
        auto is_time = [](const Literal &l) { return l.predicate == "time"; };
        timed = timed || is_time(r.head) || std::any_of(r.body_pos.begin(), r.body_pos.end(), is_time) ||
                std::any_of(r.body_neg.begin(), r.body_neg.end(), is_time);
    }
    for (const auto &[name, dom] : d.sorts)
        if (name != "time" || timed) u.insert(dom.begin(), dom.end());
    return {u.begin(), u.end()};
}

inline GroundProgram ground(const Program &p, const DomainMap &d, const GroundOptions &opts = {}) {
    for (const auto &r : p.rules) {
        auto bad = check_safety(r);
        if (bad.empty()) continue;
        std::string vars;
        for (const auto &v : bad) vars += (vars.empty() ? "" : ", ") + v;
        throw GroundingError("unsafe rule '" + to_string(r) + "': unbound variable(s) " + vars);
    }

    const auto herbrand = herbrand_universe(p, d);

    bool uses_time = false;
    std::unordered_set<Literal> facts;
    std::unordered_set<detail::Signature, detail::SignatureHash> intensional;
    for (const auto &r : p.rules) {
        if (r.is_fact() && r.head.is_ground()) facts.insert(r.head);
        else intensional.insert(detail::signature(r.head));
        for (const auto &l : r.body_pos) uses_time |= l.predicate == "time" && l.args.size() == 1;
    }
    std::vector<Literal> time_facts;
    if (uses_time && d.is_sort("time")) {
        for (const auto &t : d.sorts.at("time")) time_facts.emplace_back("time", std::vector<Term>{t});
        facts.insert(time_facts.begin(), time_facts.end());
    }

    detail::RuleGrounder grounder(d, herbrand, facts, intensional, opts);

    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(1, p.rules.size()));
    std::vector<std::vector<std::pair<Rule, std::size_t>>> parts(threads);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&](unsigned id) {
        try {
            for (std::size_t i; (i = next.fetch_add(1)) < p.rules.size();) grounder.ground(p.rules[i], i, parts[id]);
        } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto &t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<std::pair<Rule, std::size_t>> all;
    for (auto &part : parts) std::move(part.begin(), part.end(), std::back_inserter(all));
    for (auto &f : time_facts) all.emplace_back(Rule{std::move(f), {}, {}}, GroundProgram::domain_fact);
    std::sort(all.begin(), all.end());
    // keep the lowest source index for duplicates
    all.erase(std::unique(all.begin(), all.end(), [](const auto &a, const auto &b) { return a.first == b.first; }),
              all.end());

    GroundProgram g;
    g.rules.reserve(all.size());
    g.source.reserve(all.size());
    std::set<Literal> base;
    for (auto &[rule, src] : all) {
        auto add = [&](const Literal &l) {
            base.insert(l);
            base.insert(complement(l));
        };
        add(rule.head);
        for (const auto &l : rule.body_pos) add(l);
        for (const auto &l : rule.body_neg) add(l);
        g.rules.push_back(std::move(rule));
        g.source.push_back(src);
    }
    g.literal_base.assign(base.begin(), base.end());
    return g;
}

// Wraps an already ground program (e.g. parsed from a ground .elp file).
inline GroundProgram as_ground(const Program &p) {
    GroundProgram g;
    std::set<Literal> base;
    for (std::size_t i = 0; i < p.rules.size(); ++i) {
        const Rule &r = p.rules[i];
        if (!r.is_ground()) throw GroundingError("rule '" + to_string(r) + "' is not ground");
        auto add = [&](const Literal &l) {
            base.insert(l);
            base.insert(complement(l));
        };
        add(r.head);
        for (const auto &l : r.body_pos) add(l);
        for (const auto &l : r.body_neg) add(l);
        g.rules.push_back(r);
        g.source.push_back(i);
    }
    g.literal_base.assign(base.begin(), base.end());
    return g;
}

} // namespace nmr

#endif
