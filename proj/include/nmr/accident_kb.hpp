#ifndef NMR_ACCIDENT_KB_HPP
#define NMR_ACCIDENT_KB_HPP

// Norm-based accident analysis.
//
// Report facts (holds/-holds atoms plus vehicle/object declarations) are
// joined with the knowledge base below, compiled to an extended logic
// program, grounded over the report's sorts and solved. The unique answer set
// carries primary_an/derived_an atoms; the earliest primary anomaly is the
// cause.

#include "nmr/dl2elp.hpp"
#include "nmr/grounder.hpp"
#include "nmr/parser.hpp"
#include "nmr/solver.hpp"

#include <cctype>

namespace nmr::kb {

class KbError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad report or configuration input.
class ReportError : public KbError {
public:
    using KbError::KbError;
};

// The report and the knowledge base have no answer set, or more than one.
class ReasoningError : public KbError {
public:
    using KbError::KbError;
};

// Strict rules, defaults and inhibitors of the road domain. Facts that depend
// on the configuration (properties, incompatibilities, actions, pcb) and the
// persistence defaults are generated by build_kb.
inline constexpr std::string_view static_rules = R"(
% neg(P) holds exactly when P is explicitly false
neg_means_false :: property(P) & object(A) & time(T) & holds(neg(P), A, T) -> -holds(P, A, T).
false_means_neg :: property(P) & object(A) & time(T) & -holds(P, A, T) -> holds(neg(P), A, T).

% anomalies: a broken duty one could fulfil, a disruptive factor, a broken
% duty one could not fulfil
primary_anomaly :: property(P) & vehicle(A) & time(T) & must(P, A, T) & able(P, A, T)
      & property(Q) & holds(Q, A, T+1) & incompatible(P, Q) -> primary_an(P, A, T).
disruptive_factor :: object(X) & vehicle(A) & time(T) & holds(combine(disruptive_factor, X), A, T)
      -> primary_an(combine(disruptive_factor, X), A, T).
derived_anomaly :: property(P) & vehicle(A) & time(T) & must(P, A, T) & -able(P, A, T)
      & property(Q) & holds(Q, A, T+1) & incompatible(P, Q) -> derived_an(P, A, T).

% every vehicle starts under control
initial_control :: agent(A) & vehicle(A) -> holds(control, A, 0).

% a vehicle bumping something is not stopped
bump_not_stopped :: vehicle(A) & object(B) & time(T) & holds(combine(bump, B), A, T) -> -holds(stop, A, T).

% bumping is a shock, and shocks are symmetric
bump_shock :: vehicle(A) & object(B) & time(T) & holds(combine(bump, B), A, T) -> holds(combine(shock, B), A, T).
shock_symmetry :: object(A) & object(B) & time(T) & holds(combine(shock, B), A, T) -> holds(combine(shock, A), B, T).

% two successive shocks: control was lost after the first one
double_shock :: agent(A) & object(B) & object(C) & time(T) & holds(combine(shock, A), B, T)
       & holds(combine(shock, A), C, T+1) -> -holds(control, A, T).

% what one collides with was an obstacle just before
obstacle_before_shock :: object(A) & vehicle(B) & time(T) & holds(combine(shock, A), B, T)
       : holds(combine(obstacle, A), B, T-1).

% unpredictable obstacles
uncontrolled_obstacle :: vehicle(B) & vehicle(A) & time(T) & holds(combine(obstacle, B), A, T) & -holds(control, B, T)
       -> -predictable(combine(obstacle, B), A, T).
bumper_unpredictable :: vehicle(A) & vehicle(B) & time(T) & holds(combine(bump, A), B, T)
       : -predictable(combine(obstacle, B), A, T-1).

% one must keep the control of one's vehicle
keep_control :: vehicle(A) & time(T) : must(control, A, T) [holds(control, A, T)].

% one must avoid obstacles
avoid_obstacle :: vehicle(A) & object(X) & time(T) & holds(combine(obstacle, X), A, T) -> must(combine(avoid, X), A, T).

% the duty to avoid an obstacle becomes the duty to stop
stop_for_obstacle :: vehicle(A) & object(B) & time(T) & must(combine(avoid, B), A, T) & holds(combine(shock, B), A, T+1)
       : must(stop, A, T) [-must(drive_slowly, A, T), -holds(stop, A, T), -holds(combine(follow, A), B, T),
                           -must(not(backwards), A, T-1), -must(not(move_off), A, T-1),
                           predictable(combine(obstacle, B), A, T)].

% capacities come from available actions (no contrapositives)
able :: vehicle(A) & object(B) & time(T) & action(Act) & property(P) & pcb(Act, P) & available(Act, P, A, T)
       => able(P, A, T).
unable :: vehicle(A) & object(B) & time(T) & action(Act) & property(P) & pcb(Act, P) & -available(Act, P, A, T)
       => -able(P, A, T).

% actions are available by default ...
available :: action(Act) & property(P) & pcb(Act, P) & vehicle(A) & time(T)
             : available(Act, P, A, T) [available(Act, P, A, T)].
% ... unless control is lost through a shock (keeping control was unavailable
% just before) or the vehicle is not under control (nothing is available)
unavailable_after_shock :: vehicle(A) & object(B) & time(T) & -holds(control, A, T)
       & holds(combine(shock, B), A, T) => -available(combine(keep_state, control), control, A, T-1).
unavailable_without_control :: action(Act) & property(P) & pcb(Act, P) & vehicle(A) & time(T)
       & -holds(control, A, T) => -available(Act, P, A, T).
)";

struct KbConfig {
    std::optional<std::int64_t> horizon; // empty: last report time + 1
    std::vector<Term> properties{Term::constant("control"), Term::constant("stop"), Term::constant("moves_back"),
                                 Term::constant("starts"), Term::constant("drives_slowly")};
    std::vector<Term> persistent_properties{Term::constant("control"), Term::constant("stop")};
    std::vector<Term> actions{Term::constant("brake"),
                              Term::application("combine", {Term::constant("keep_state"), Term::constant("control")})};
    std::vector<std::pair<Term, Term>> pcb_facts{
        {Term::constant("brake"), Term::constant("stop")},
        {Term::application("combine", {Term::constant("keep_state"), Term::constant("control")}),
         Term::constant("control")}};
    // in addition to (P, neg(P)) for every declared property
    std::vector<std::pair<Term, Term>> incompatibility;
};

inline Term neg_of(const Term &p) { return Term::application("neg", {p}); }

// Fact-syntax configuration: horizon(auto|N). property(p). persistent(p).
// action(a). pcb(a, p). incompatible(p, q). A key present replaces its default.
inline KbConfig parse_kb_config(std::string_view text, const std::string &file = "<config>") {
    Program p;
    try {
        p = parse_program(text, {file});
    } catch (const ParseError &e) {
        throw ReportError(e.what());
    }
    KbConfig cfg;
    std::set<std::string> seen;
    auto reset = [&](const std::string &key, auto &field) {
        if (seen.insert(key).second) field.clear();
    };
    for (const auto &r : p.rules) {
        const Literal &h = r.head;
        auto bad = [&](const std::string &why) {
            return ReportError(file + ": config entry '" + to_string(r) + "': " + why);
        };
        if (!r.is_fact() || h.strong_negation || !h.is_ground()) throw bad("expected a ground fact");
        const auto n = h.args.size();
        if (h.predicate == "horizon" && n == 1) {
            if (h.args[0] == Term::constant("auto")) cfg.horizon.reset();
            else if (h.args[0].is_integer() && h.args[0].value >= 0) cfg.horizon = h.args[0].value;
            else throw bad("horizon must be 'auto' or a non-negative integer");
        } else if (h.predicate == "property" && n == 1) {
            reset("property", cfg.properties);
            cfg.properties.push_back(h.args[0]);
        } else if (h.predicate == "persistent" && n == 1) {
            reset("persistent", cfg.persistent_properties);
            cfg.persistent_properties.push_back(h.args[0]);
        } else if (h.predicate == "action" && n == 1) {
            reset("action", cfg.actions);
            cfg.actions.push_back(h.args[0]);
        } else if (h.predicate == "pcb" && n == 2) {
            reset("pcb", cfg.pcb_facts);
            cfg.pcb_facts.emplace_back(h.args[0], h.args[1]);
        } else if (h.predicate == "incompatible" && n == 2) {
            cfg.incompatibility.emplace_back(h.args[0], h.args[1]);
        } else {
            throw bad("unknown key");
        }
    }
    return cfg;
}

inline DefaultTheory build_kb(const KbConfig &cfg) {
    DefaultTheory t = parse_default_theory(static_rules, {"<accident-kb>"});

    std::set<Term> props;
    for (const auto &p : cfg.properties) {
        props.insert(p);
        props.insert(neg_of(p));
    }
    std::set<Term> actions(cfg.actions.begin(), cfg.actions.end());
    auto check_property = [&](const Term &p, const std::string &where) {
        if (!props.count(p)) throw KbError(where + " references undeclared property " + to_string(p));
    };

    std::set<std::pair<Term, Term>> incompatible;
    for (const auto &p : cfg.properties) {
        incompatible.insert({p, neg_of(p)});
        incompatible.insert({neg_of(p), p});
    }
    for (const auto &[a, b] : cfg.incompatibility) {
        check_property(a, "incompatibility");
        check_property(b, "incompatibility");
        incompatible.insert({a, b});
        incompatible.insert({b, a});
    }

    for (const auto &p : props) t.facts.emplace_back("property", std::vector<Term>{p});
    for (const auto &[a, b] : incompatible) t.facts.emplace_back("incompatible", std::vector<Term>{a, b});
    for (const auto &a : actions) t.facts.emplace_back("action", std::vector<Term>{a});
    for (const auto &[act, p] : cfg.pcb_facts) {
        if (!actions.count(act)) throw KbError("pcb references undeclared action " + to_string(act));
        check_property(p, "pcb");
        t.facts.emplace_back("pcb", std::vector<Term>{act, p});
    }

    // forward persistence, both polarities
    std::string persistence;
    for (const auto &p : cfg.persistent_properties) {
        check_property(p, "persistence");
        const std::string s = to_string(p);
        persistence += "persist :: object(A) & time(T) & holds(" + s + ", A, T) : holds(" + s + ", A, T+1) [holds(" +
                       s + ", A, T+1)].\n";
        persistence += "persist :: object(A) & time(T) & -holds(" + s + ", A, T) : -holds(" + s +
                       ", A, T+1) [-holds(" + s + ", A, T+1)].\n";
    }
    auto extra = parse_default_theory(persistence, {"<persistence>"});
    std::move(extra.rules.begin(), extra.rules.end(), std::back_inserter(t.rules));
    return t;
}

// ---------------------------------------------------------------------------
// reports

struct ReportFacts {
    std::vector<Literal> facts;
    std::string source;

    std::int64_t max_time() const {
        std::int64_t m = 0;
        for (const auto &f : facts)
            if (f.predicate == "holds" && f.args.size() == 3 && f.args[2].is_integer())
                m = std::max(m, f.args[2].value);
        return m;
    }
    std::int64_t auto_horizon() const { return max_time() + 1; }

    std::vector<Term> vehicles() const {
        std::vector<Term> out;
        for (const auto &f : facts)
            if (!f.strong_negation && f.predicate == "vehicle" && f.args.size() == 1) out.push_back(f.args[0]);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

inline ReportFacts parse_report(std::string_view text, const std::string &source = "<report>") {
    Program p;
    try {
        p = parse_program(text, {source});
    } catch (const ParseError &e) {
        throw ReportError(e.what());
    }
    ReportFacts rep;
    rep.source = source;
    std::set<Term> declared;
    for (const auto &r : p.rules) {
        if (!r.is_fact()) throw ReportError(source + ": '" + to_string(r) + "' is not a fact");
        if (!r.head.is_ground()) throw ReportError(source + ": '" + to_string(r) + "' is not ground");
        if (!r.head.strong_negation && (r.head.predicate == "vehicle" || r.head.predicate == "object") &&
            r.head.args.size() == 1)
            declared.insert(r.head.args[0]);
        rep.facts.push_back(r.head);
    }
    for (const auto &f : rep.facts) {
        if (f.predicate != "holds") continue;
        if (f.args.size() != 3) throw ReportError(source + ": holds/3 expected in '" + to_string(f) + "'");
        const Term &time = f.args[2];
        if (!time.is_integer() || time.value < 0)
            throw ReportError(source + ": time of '" + to_string(f) + "' must be a non-negative integer");
        if (!declared.count(f.args[1]))
            throw ReportError(source + ": agent " + to_string(f.args[1]) + " in '" + to_string(f) +
                              "' is declared neither vehicle nor object");
    }
    if (rep.vehicles().empty()) throw ReportError(source + ": no vehicle declared");
    return rep;
}

inline ReportFacts load_report(const std::filesystem::path &path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception &e) {
        throw ReportError(e.what());
    }
    return parse_report(text, path.string());
}

// ---------------------------------------------------------------------------
// analysis

struct Anomaly {
    enum class Kind : std::uint8_t { Primary, Derived };
    Kind kind;
    Term property;
    Term agent;
    std::int64_t time;

    friend bool operator==(const Anomaly &, const Anomaly &) = default;
};

struct AnomalyReport {
    std::vector<Anomaly> anomalies;
    std::optional<std::string> cause_sentence;
    Interpretation model;
};

struct Analysis {
    DefaultTheory theory;
    CompilationReport compiled;
    std::int64_t horizon = 0;
    std::size_t report_facts = 0; // leading facts of theory that came from the report
    GroundProgram ground;
    SolveStats stats;
    AnomalyReport report;
};

struct AnalyzeOptions {
    bool single_threaded = false;
};

inline std::string agent_name(const Term &agent) {
    if (agent.kind == Term::Kind::Constant && agent.name.rfind("veh_", 0) == 0 && agent.name.size() > 4) {
        std::string id = agent.name.substr(4);
        for (auto &c : id) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return "vehicle " + id;
    }
    return to_string(agent);
}

inline std::string render_cause(const Anomaly &a, const KbConfig &cfg) {
    const auto &pp = cfg.persistent_properties;
    const bool lost = std::find(pp.begin(), pp.end(), a.property) != pp.end();
    return std::string("the ") + (lost ? "loss" : "violation") + " of " + to_string(a.property) + " of " +
           agent_name(a.agent) + " at time " + std::to_string(a.time);
}

inline std::vector<Anomaly> extract_anomalies(const Interpretation &model) {
    std::vector<Anomaly> out;
    for (const auto &l : model.literals) {
        if (l.strong_negation || l.args.size() != 3 || !l.args[2].is_integer()) continue;
        if (l.predicate == "primary_an")
            out.push_back({Anomaly::Kind::Primary, l.args[0], l.args[1], l.args[2].value});
        else if (l.predicate == "derived_an")
            out.push_back({Anomaly::Kind::Derived, l.args[0], l.args[1], l.args[2].value});
    }
    std::sort(out.begin(), out.end(), [](const Anomaly &a, const Anomaly &b) {
        return std::tie(a.kind, a.time, a.agent, a.property) < std::tie(b.kind, b.time, b.agent, b.property);
    });
    return out;
}

inline Program report_program(const ReportFacts &report, const KbConfig &cfg, DefaultTheory &theory,
                              CompilationReport &compiled) {
    theory = build_kb(cfg);
    std::vector<Literal> facts = report.facts;
    for (const auto &v : report.vehicles()) facts.emplace_back("agent", std::vector<Term>{v});
    theory.facts.insert(theory.facts.begin(), facts.begin(), facts.end());
    compiled = compile_theory(theory);
    return compiled.produced_rules;
}

inline Analysis run_analysis(const ReportFacts &report, const KbConfig &cfg, const AnalyzeOptions &opts = {}) {
    Analysis a;
    Program program = report_program(report, cfg, a.theory, a.compiled);
    a.report_facts = report.facts.size();
    a.horizon = cfg.horizon.value_or(report.auto_horizon());

    GroundOptions gopts;
    gopts.prune_extensional = true;
    if (opts.single_threaded) gopts.threads = 1;
    a.ground = ground(program, derive_domains(program, a.horizon), gopts);

    SolveOptions sopts;
    sopts.max_models = 2;
    sopts.single_threaded = opts.single_threaded;
    auto res = solve(a.ground, sopts);
    a.stats = res.stats;

    if (res.answer_sets.empty() || res.answer_sets.front().contradictory) {
        throw ReasoningError("inconsistent KB/report: " + report.source + " has no consistent answer set (" +
                             std::to_string(a.ground.rules.size()) + " ground rules, horizon " +
                             std::to_string(a.horizon) + ")");
    }
    if (res.answer_sets.size() > 1) {
        const auto &m1 = res.answer_sets[0].literals;
        const auto &m2 = res.answer_sets[1].literals;
        std::vector<Literal> diff;
        std::set_symmetric_difference(m1.begin(), m1.end(), m2.begin(), m2.end(), std::back_inserter(diff));
        std::string msg = "ambiguous report: " + report.source + " has more than one answer set; differing atoms:";
        for (std::size_t i = 0; i < diff.size() && i < 20; ++i) msg += " " + to_string(diff[i]);
        if (diff.size() > 20) msg += " ...";
        throw ReasoningError(msg);
    }

    a.report.model = std::move(res.answer_sets.front());
    a.report.anomalies = extract_anomalies(a.report.model);
    const Anomaly *cause = nullptr;
    for (const auto &an : a.report.anomalies)
        if (an.kind == Anomaly::Kind::Primary &&
            (!cause || std::tie(an.time, an.agent) < std::tie(cause->time, cause->agent)))
            cause = &an;
    if (cause) a.report.cause_sentence = render_cause(*cause, cfg);
    return a;
}

inline AnomalyReport analyze(const ReportFacts &report, const KbConfig &cfg, const AnalyzeOptions &opts = {}) {
    return run_analysis(report, cfg, opts).report;
}

// ---------------------------------------------------------------------------
// derivation traces

struct Derivation {
    Literal literal;
    std::string rule;     // label of the knowledge-base item, "report" or "domain"
    Rule ground_rule;
    std::vector<Derivation> premises;
};

inline std::string describe_source(const Analysis &a, std::size_t ground_index) {
    const std::size_t src = a.ground.source[ground_index];
    if (src == GroundProgram::domain_fact) return "domain";
    const auto &prov = a.compiled.rule_provenance[src];
    if (prov.source == Provenance::Source::Fact) return prov.index < a.report_facts ? "report" : "fact";
    std::string s = prov.label.empty() ? "rule#" + std::to_string(prov.index) : prov.label;
    if (prov.source == Provenance::Source::Contrapositive) s += " (contrapositive)";
    return s;
}

// Supporting rules down to facts, taken from the least fixpoint of the reduct
// by the model, so every premise is derived strictly earlier.
inline Derivation trace(const Analysis &a, const Literal &target) {
    const auto &model = a.report.model;
    if (!model.contains(target)) throw KbError(to_string(target) + " is not in the answer set");

    detail::IndexedProgram ip(a.ground);
    auto in_model = ip.membership(model.literals);
    auto enabled = ip.reduct_mask(in_model);

    std::vector<int> support(ip.size(), -1);
    std::vector<char> in(ip.size(), 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t r = 0; r < ip.rules().size(); ++r) {
            const auto &rule = ip.rules()[r];
            if (!enabled[r] || in[rule.head]) continue;
            if (std::all_of(rule.pos.begin(), rule.pos.end(), [&](int l) { return in[l] != 0; })) {
                in[rule.head] = 1;
                support[rule.head] = static_cast<int>(r);
                changed = true;
            }
        }
    }

    std::function<Derivation(int)> build = [&](int lit) {
        Derivation d;
        d.literal = ip.base()[lit];
        const int r = support[lit];
        d.ground_rule = a.ground.rules[r];
        d.rule = describe_source(a, r);
        for (int p : ip.rules()[r].pos) d.premises.push_back(build(p));
        return d;
    };
    return build(ip.id(target));
}

inline Derivation trace(const ReportFacts &report, const KbConfig &cfg, const Literal &target) {
    return trace(run_analysis(report, cfg), target);
}

inline std::string format_derivation(const Derivation &d, int indent = 0) {
    std::string s(static_cast<std::size_t>(indent) * 2, ' ');
    s += to_string(d.literal) + "   [" + d.rule + "]\n";
    for (const auto &p : d.premises) s += format_derivation(p, indent + 1);
    return s;
}

} // namespace nmr::kb

#endif
