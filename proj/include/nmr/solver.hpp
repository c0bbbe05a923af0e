#ifndef NMR_SOLVER_HPP
#define NMR_SOLVER_HPP

// Answer sets of ground extended logic programs.
//
// A literal set A is an answer set of P iff A = Cn(P^A), where P^A keeps the
// rules whose default-negated body is disjoint from A (with that part
// dropped) and Cn is the least closed literal set, or the whole literal base
// when the closure contains a complementary pair.

#include "nmr/grounder.hpp"

#include <chrono>
#include <cstdint>
#include <future>

namespace nmr {

struct Interpretation {
    std::vector<Literal> literals; // sorted
    bool contradictory = false;

    bool contains(const Literal &l) const { return std::binary_search(literals.begin(), literals.end(), l); }

    friend bool operator==(const Interpretation &, const Interpretation &) = default;
    friend auto operator<=>(const Interpretation &a, const Interpretation &b) {
        if (a.contradictory != b.contradictory) return a.contradictory <=> b.contradictory;
        return std::lexicographical_compare_three_way(a.literals.begin(), a.literals.end(), b.literals.begin(),
                                                      b.literals.end());
    }
};

struct SolveStats {
    std::size_t branches = 0;
    std::size_t propagations = 0;
    double wall_ms = 0;
    bool stratified = false;
};

struct SolveResult {
    std::vector<Interpretation> answer_sets;
    SolveStats stats;
};

struct SolveOptions {
    std::size_t max_models = 0; // 0: unlimited
    unsigned threads = 0;       // 0: hardware concurrency
    bool single_threaded = false;
    bool stratified_fast_path = true;
};

class SolverLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Literal ids with complement links and counter-based forward chaining.
class IndexedProgram {
public:
    struct IRule {
        int head;
        std::vector<int> pos, neg;
    };

    explicit IndexedProgram(const GroundProgram &g) : base_(g.literal_base) {
        index_.reserve(base_.size() * 2);
        for (std::size_t i = 0; i < base_.size(); ++i) index_.emplace(base_[i], static_cast<int>(i));
        comp_.resize(base_.size());
        for (std::size_t i = 0; i < base_.size(); ++i) comp_[i] = id(complement(base_[i]));
        watch_.resize(base_.size());
        rules_.reserve(g.rules.size());
        for (const auto &r : g.rules) {
            IRule ir{id(r.head), ids(r.body_pos), ids(r.body_neg)};
            for (int l : ir.pos) watch_[l].push_back(static_cast<int>(rules_.size()));
            rules_.push_back(std::move(ir));
        }
    }

    std::size_t size() const { return base_.size(); }
    const std::vector<Literal> &base() const { return base_; }
    const std::vector<IRule> &rules() const { return rules_; }
    int complement_of(int l) const { return comp_[l]; }

    int id(const Literal &l) const {
        auto it = index_.find(l);
        if (it == index_.end()) throw std::invalid_argument("literal " + to_string(l) + " is not in the literal base");
        return it->second;
    }
    std::optional<int> find(const Literal &l) const {
        auto it = index_.find(l);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // Least set closed under the enabled rules (no contradiction collapse).
    std::vector<char> closure(const std::vector<char> &enabled) const {
        std::vector<char> in(size(), 0);
        std::vector<int> missing(rules_.size());
        std::vector<int> queue;
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            missing[r] = static_cast<int>(rules_[r].pos.size());
            if (enabled[r] && missing[r] == 0 && !in[rules_[r].head]) {
                in[rules_[r].head] = 1;
                queue.push_back(rules_[r].head);
            }
        }
        while (!queue.empty()) {
            int l = queue.back();
            queue.pop_back();
            for (int r : watch_[l]) {
                if (--missing[r] == 0 && enabled[r] && !in[rules_[r].head]) {
                    in[rules_[r].head] = 1;
                    queue.push_back(rules_[r].head);
                }
            }
        }
        return in;
    }

    bool consistent(const std::vector<char> &in) const {
        for (std::size_t l = 0; l < size(); ++l)
            if (in[l] && in[comp_[l]]) return false;
        return true;
    }

    // Rules of P^A, with A given as a membership vector.
    std::vector<char> reduct_mask(const std::vector<char> &a) const {
        std::vector<char> enabled(rules_.size(), 1);
        for (std::size_t r = 0; r < rules_.size(); ++r)
            for (int l : rules_[r].neg)
                if (a[l]) {
                    enabled[r] = 0;
                    break;
                }
        return enabled;
    }

    // A = Cn(P^A)
    bool is_answer_set(const std::vector<char> &a) const {
        auto cn = closure(reduct_mask(a));
        if (!consistent(cn)) return std::all_of(a.begin(), a.end(), [](char c) { return c != 0; });
        return cn == a;
    }

    Interpretation to_interpretation(const std::vector<char> &in) const {
        Interpretation out;
        for (std::size_t l = 0; l < size(); ++l)
            if (in[l]) out.literals.push_back(base_[l]);
        out.contradictory = out.literals.size() == size() && size() > 0;
        return out;
    }

    std::vector<char> membership(const std::vector<Literal> &lits) const {
        std::vector<char> in(size(), 0);
        for (const auto &l : lits) in[id(l)] = 1;
        return in;
    }

private:
    std::vector<int> ids(const std::vector<Literal> &lits) const {
        std::vector<int> out;
        out.reserve(lits.size());
        for (const auto &l : lits) out.push_back(id(l));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    std::vector<Literal> base_;
    std::unordered_map<Literal, int> index_;
    std::vector<int> comp_;
    std::vector<std::vector<int>> watch_;
    std::vector<IRule> rules_;
};

} // namespace detail

// ---------------------------------------------------------------------------
// definitions

inline GroundProgram reduct(const GroundProgram &g, const std::vector<Literal> &a) {
    std::set<Literal> in(a.begin(), a.end());
    GroundProgram out;
    out.literal_base = g.literal_base;
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
        const Rule &r = g.rules[i];
        if (std::any_of(r.body_neg.begin(), r.body_neg.end(), [&](const Literal &l) { return in.count(l) > 0; }))
            continue;
        out.rules.push_back(Rule{r.head, r.body_pos, {}});
        out.source.push_back(i < g.source.size() ? g.source[i] : i);
    }
    return out;
}

inline Interpretation consequences(const GroundProgram &g) {
    for (const auto &r : g.rules)
        if (!r.body_neg.empty()) throw std::invalid_argument("consequences: program is not definite");
    detail::IndexedProgram ip(g);
    auto in = ip.closure(std::vector<char>(ip.rules().size(), 1));
    if (!ip.consistent(in)) std::fill(in.begin(), in.end(), 1);
    return ip.to_interpretation(in);
}

inline bool is_answer_set(const GroundProgram &g, const std::vector<Literal> &a) {
    detail::IndexedProgram ip(g);
    std::vector<char> in(ip.size(), 0);
    for (const auto &l : a) {
        auto id = ip.find(l);
        if (!id) return false;
        in[*id] = 1;
    }
    return ip.is_answer_set(in);
}

inline bool is_answer_set(const GroundProgram &g, const Interpretation &a) { return is_answer_set(g, a.literals); }

// ---------------------------------------------------------------------------
// stratification

struct Stratification {
    std::vector<int> level; // parallel to GroundProgram::literal_base
    int strata = 0;
};

namespace detail {

inline std::optional<Stratification> stratify(const IndexedProgram &ip) {
    const int n = static_cast<int>(ip.size());
    // edge head -> body literal; weight 1 under default negation
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (const auto &r : ip.rules()) {
        for (int l : r.pos) adj[r.head].push_back({l, 0});
        for (int l : r.neg) adj[r.head].push_back({l, 1});
    }

    // iterative Tarjan; components come out dependencies first
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::pair<int, std::size_t>> call;
    int counter = 0, ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (index[s] != -1) continue;
        call.push_back({s, 0});
        index[s] = low[s] = counter++;
        stack.push_back(s);
        on_stack[s] = 1;
        while (!call.empty()) {
            auto &[v, i] = call.back();
            if (i < adj[v].size()) {
                int w = adj[v][i++].first;
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = ncomp;
                } while (w != v);
                ++ncomp;
            }
            int done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }

    std::vector<std::vector<int>> members(ncomp);
    for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);
    std::vector<int> clevel(ncomp, 0);
    for (int c = 0; c < ncomp; ++c) {
        for (int v : members[c])
            for (auto [w, neg] : adj[v]) {
                if (comp[w] == c) {
                    if (neg) return std::nullopt;
                    continue;
                }
                clevel[c] = std::max(clevel[c], clevel[comp[w]] + neg);
            }
    }
    Stratification s;
    s.level.resize(n);
    for (int v = 0; v < n; ++v) {
        s.level[v] = clevel[comp[v]];
        s.strata = std::max(s.strata, s.level[v] + 1);
    }
    return s;
}

// Iterated least fixpoints, one stratum at a time.
inline std::vector<char> evaluate_stratified(const IndexedProgram &ip, const Stratification &s) {
    const auto &rules = ip.rules();
    std::vector<std::vector<int>> by_level(std::max(1, s.strata));
    for (std::size_t r = 0; r < rules.size(); ++r) by_level[s.level[rules[r].head]].push_back(static_cast<int>(r));

    std::vector<std::vector<int>> watch(ip.size());
    std::vector<int> missing(rules.size());
    for (std::size_t r = 0; r < rules.size(); ++r) {
        missing[r] = static_cast<int>(rules[r].pos.size());
        for (int l : rules[r].pos) watch[l].push_back(static_cast<int>(r));
    }
    std::vector<char> in(ip.size(), 0), enabled(rules.size(), 0);
    std::vector<int> queue;
    auto add = [&](int l) {
        if (!in[l]) {
            in[l] = 1;
            queue.push_back(l);
        }
    };
    for (const auto &level : by_level) {
        for (int r : level) {
            const auto &neg = rules[r].neg;
            enabled[r] = std::none_of(neg.begin(), neg.end(), [&](int l) { return in[l] != 0; });
            if (enabled[r] && missing[r] == 0) add(rules[r].head);
        }
        while (!queue.empty()) {
            int l = queue.back();
            queue.pop_back();
            for (int r : watch[l])
                if (--missing[r] == 0 && enabled[r]) add(rules[r].head);
        }
    }
    return in;
}

// Branches on the truth of literals occurring under default negation. The
// lower bound is the closure of rules whose negated literals are all known
// false; the upper bound is the closure of rules not blocked by a literal
// known true. Every answer set lies between them.
class Search {
public:
    Search(const IndexedProgram &ip, std::size_t max_models) : ip_(ip), max_models_(max_models) {
        std::vector<char> seen(ip.size(), 0);
        for (const auto &r : ip.rules())
            for (int l : r.neg)
                if (!seen[l]) {
                    seen[l] = 1;
                    atoms_.push_back(l);
                }
        std::sort(atoms_.begin(), atoms_.end());
    }

    using State = std::vector<std::int8_t>; // per literal: 0 unknown, 1 in, -1 out

    State initial() const { return State(ip_.size(), 0); }

    // Returns false on conflict; fills the lower bound.
    bool propagate(State &st, std::vector<char> &lower, SolveStats &stats) const {
        const auto &rules = ip_.rules();
        std::vector<char> en_lo(rules.size()), en_up(rules.size());
        for (;;) {
            ++stats.propagations;
            for (std::size_t r = 0; r < rules.size(); ++r) {
                bool all_out = true, any_in = false;
                for (int l : rules[r].neg) {
                    all_out &= st[l] == -1;
                    any_in |= st[l] == 1;
                }
                en_lo[r] = all_out;
                en_up[r] = !any_in;
            }
            lower = ip_.closure(en_lo);
            if (!ip_.consistent(lower)) return false;
            auto upper = ip_.closure(en_up);
            bool changed = false;
            for (int l : atoms_) {
                if (lower[l]) {
                    if (st[l] == -1) return false;
                    if (st[l] == 0) st[l] = 1, changed = true;
                }
                if (!upper[l]) {
                    if (st[l] == 1) return false;
                    if (st[l] == 0) st[l] = -1, changed = true;
                }
            }
            if (!changed) return true;
        }
    }

    std::optional<int> choose(const State &st) const {
        for (int l : atoms_)
            if (st[l] == 0) return l;
        return std::nullopt;
    }

    // Expands the tree to the given depth; returns the open subproblems in
    // left-to-right order.
    std::vector<State> frontier(int depth, SolveStats &stats, std::vector<std::vector<char>> &leaves) const {
        std::vector<State> open;
        std::vector<std::pair<State, int>> work{{initial(), 0}};
        while (!work.empty()) {
            auto [st, d] = std::move(work.back());
            work.pop_back();
            std::vector<char> lower;
            if (!propagate(st, lower, stats)) continue;
            auto pick = choose(st);
            if (!pick) {
                leaf(st, lower, leaves);
                continue;
            }
            if (d == depth) {
                open.push_back(std::move(st));
                continue;
            }
            ++stats.branches;
            State out = st;
            out[*pick] = -1;
            st[*pick] = 1;
            work.push_back({std::move(out), d + 1}); // explored after the 'in' branch
            work.push_back({std::move(st), d + 1});
        }
        return open;
    }

    void run(State st, SolveStats &stats, std::vector<std::vector<char>> &models) const {
        std::vector<char> lower;
        if (max_models_ && models.size() >= max_models_) return;
        if (!propagate(st, lower, stats)) return;
        auto pick = choose(st);
        if (!pick) {
            leaf(st, lower, models);
            return;
        }
        ++stats.branches;
        State out = st;
        st[*pick] = 1;
        run(std::move(st), stats, models);
        out[*pick] = -1;
        run(std::move(out), stats, models);
    }

private:
    void leaf(const State &st, const std::vector<char> &lower, std::vector<std::vector<char>> &models) const {
        for (int l : atoms_)
            if ((st[l] == 1) != (lower[l] != 0)) return;
        // always re-verified against the definition
        if (ip_.is_answer_set(lower)) models.push_back(lower);
    }

    const IndexedProgram &ip_;
    std::size_t max_models_;
    std::vector<int> atoms_;
};

inline void canonicalize(std::vector<Interpretation> &models, std::size_t max_models) {
    std::sort(models.begin(), models.end());
    models.erase(std::unique(models.begin(), models.end()), models.end());
    if (max_models && models.size() > max_models) models.resize(max_models);
}

} // namespace detail

inline std::optional<Stratification> stratify(const GroundProgram &g) {
    return detail::stratify(detail::IndexedProgram(g));
}

inline SolveResult solve(const GroundProgram &g, const SolveOptions &opts = {}) {
    const auto start = std::chrono::steady_clock::now();
    SolveResult res;
    detail::IndexedProgram ip(g);
    auto finish = [&]() {
        detail::canonicalize(res.answer_sets, opts.max_models);
        res.stats.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return res;
    };

    // If the definite part is already contradictory, every reduct is too and
    // the whole literal base is the only answer set.
    {
        std::vector<char> definite(ip.rules().size());
        for (std::size_t r = 0; r < ip.rules().size(); ++r) definite[r] = ip.rules()[r].neg.empty();
        if (!ip.consistent(ip.closure(definite))) {
            std::vector<char> all(ip.size(), 1);
            if (ip.is_answer_set(all)) res.answer_sets.push_back(ip.to_interpretation(all));
            return finish();
        }
    }

    if (opts.stratified_fast_path) {
        if (auto strata = detail::stratify(ip)) {
            res.stats.stratified = true;
            auto model = detail::evaluate_stratified(ip, *strata);
            if (ip.is_answer_set(model)) {
                res.answer_sets.push_back(ip.to_interpretation(model));
                return finish();
            }
            // a stratified program whose perfect model is inconsistent has no
            // consistent answer set; fall through to the search all the same
        }
    }

    detail::Search search(ip, opts.max_models);
    std::vector<std::vector<char>> models;
    constexpr int split_depth = 3;
    auto open = search.frontier(split_depth, res.stats, models);

    unsigned threads = opts.single_threaded ? 1u : (opts.threads ? opts.threads : std::thread::hardware_concurrency());
    threads = std::max(1u, threads);

    std::vector<SolveStats> part_stats(open.size());
    std::vector<std::vector<std::vector<char>>> part_models(open.size());
    if (threads == 1 || open.size() <= 1) {
        for (std::size_t i = 0; i < open.size(); ++i) search.run(open[i], part_stats[i], part_models[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i; (i = next.fetch_add(1)) < open.size();)
                search.run(open[i], part_stats[i], part_models[i]);
        };
        std::vector<std::future<void>> pool;
        for (unsigned t = 0; t < std::min<std::size_t>(threads, open.size()); ++t)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto &f : pool) f.get();
    }
    for (std::size_t i = 0; i < open.size(); ++i) {
        res.stats.branches += part_stats[i].branches;
        res.stats.propagations += part_stats[i].propagations;
        std::move(part_models[i].begin(), part_models[i].end(), std::back_inserter(models));
    }
    for (const auto &m : models) res.answer_sets.push_back(ip.to_interpretation(m));
    return finish();
}

// Exhaustive oracle: every consistent subset of the literal base plus the
// base itself, each checked against A = Cn(P^A). Bit-parallel, so it stays
// independent of the search above.
inline std::vector<Interpretation> brute_force_answer_sets(const GroundProgram &g) {
    constexpr std::size_t limit = 24;
    const auto &base = g.literal_base;
    if (base.size() > limit)
        throw SolverLimitError("brute force refused: literal base has " + std::to_string(base.size()) +
                               " literals (limit " + std::to_string(limit) + ")");
    auto bit = [&](const Literal &l) -> std::uint32_t {
        auto it = std::lower_bound(base.begin(), base.end(), l);
        if (it == base.end() || *it != l) throw std::invalid_argument("literal outside the base: " + to_string(l));
        return 1u << (it - base.begin());
    };
    struct Mask {
        std::uint32_t head, pos, neg;
    };
    std::vector<Mask> rules;
    for (const auto &r : g.rules) {
        Mask m{bit(r.head), 0, 0};
        for (const auto &l : r.body_pos) m.pos |= bit(l);
        for (const auto &l : r.body_neg) m.neg |= bit(l);
        rules.push_back(m);
    }
    // pairs (atom, complement) by bit
    std::vector<std::pair<std::uint32_t, std::uint32_t>> atoms;
    for (const auto &l : base)
        if (!l.strong_negation) atoms.push_back({bit(l), bit(complement(l))});
    const std::uint32_t full = base.empty() ? 0 : static_cast<std::uint32_t>((std::uint64_t{1} << base.size()) - 1);

    auto cn = [&](std::uint32_t a) {
        std::uint32_t x = 0;
        for (bool changed = true; changed;) {
            changed = false;
            for (const auto &r : rules)
                if (!(r.neg & a) && (r.pos & x) == r.pos && !(x & r.head)) {
                    x |= r.head;
                    changed = true;
                }
        }
        for (const auto &[p, n] : atoms)
            if ((x & p) && (x & n)) return full;
        return x;
    };

    std::vector<Interpretation> out;
    auto emit = [&](std::uint32_t a, bool contradictory) {
        Interpretation m;
        for (std::size_t i = 0; i < base.size(); ++i)
            if (a >> i & 1u) m.literals.push_back(base[i]);
        m.contradictory = contradictory;
        out.push_back(std::move(m));
    };

    // each atom: absent, positive, or strongly negated
    std::vector<int> state(atoms.size(), 0);
    for (;;) {
        std::uint32_t a = 0;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (state[i] == 1) a |= atoms[i].first;
            else if (state[i] == 2) a |= atoms[i].second;
        if (cn(a) == a && (a != full || base.empty())) emit(a, false);
        std::size_t i = 0;
        while (i < state.size() && ++state[i] == 3) state[i++] = 0;
        if (i == state.size()) break;
    }
    if (!base.empty() && cn(full) == full) emit(full, true);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string to_string(const Interpretation &m) {
    std::string s = "{";
    for (std::size_t i = 0; i < m.literals.size(); ++i) {
        if (i) s += ", ";
        s += to_string(m.literals[i]);
    }
    return s + "}";
}

} // namespace nmr

#endif
