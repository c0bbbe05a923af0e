#ifndef NMR_CLI_HPP
#define NMR_CLI_HPP

// The nmr command line. Kept in a header so the tests can drive run()
// in-process. Needs CLI11 and nlohmann/json on the include path.
//
// exit status: 0 ok, 1 no answer set / ambiguous / selftest failure,
//              2 bad input (parse, validation, I/O, usage)

#include "nmr/accident_kb.hpp"
#include "nmr/dl2elp.hpp"
#include "nmr/fixtures.hpp"
#include "nmr/grounder.hpp"
#include "nmr/parser.hpp"
#include "nmr/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <ostream>

namespace nmr::cli {

enum Status : int { ok = 0, reasoning_failure = 1, input_failure = 2 };

namespace detail {

struct Flags {
    std::string input;
    std::string output;
    std::string format = "text";
    std::string kb_config;
    std::optional<std::int64_t> horizon;
    std::size_t models = 1;
    bool single_threaded = false;
    std::vector<std::string> traces;
};

inline void emit(const std::string &text, const std::string &path, std::ostream &out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw std::runtime_error("cannot write " + path);
}

// largest integer in a fact, plus one
inline std::int64_t default_horizon(const Program &p) {
    std::int64_t m = -1;
    std::function<void(const Term &)> visit = [&](const Term &t) {
        if (t.is_integer()) m = std::max(m, t.value);
        for (const auto &a : t.args) visit(a);
    };
    for (const auto &r : p.rules)
        if (r.is_fact())
            for (const auto &a : r.head.args) visit(a);
    return m + 1;
}

inline bool is_ground(const Program &p) {
    return std::all_of(p.rules.begin(), p.rules.end(), [](const Rule &r) { return r.is_ground(); });
}

inline GroundProgram ground_input(const Program &p, const Flags &f) {
    if (is_ground(p) && !f.horizon) return as_ground(p);
    GroundOptions opts;
    if (f.single_threaded) opts.threads = 1;
    return ground(p, derive_domains(p, f.horizon.value_or(default_horizon(p))), opts);
}

inline std::vector<std::string> literal_strings(const Interpretation &m) {
    std::vector<std::string> out;
    for (const auto &l : m.literals) out.push_back(to_string(l));
    return out;
}

inline int cmd_compile(const Flags &f, std::ostream &out) {
    auto theory = parse_default_theory(read_file(f.input), {f.input});
    emit(serialize_program(compile_theory(theory).produced_rules), f.output, out);
    return ok;
}

inline int cmd_ground(const Flags &f, std::ostream &out) {
    auto p = parse_program(read_file(f.input), {f.input});
    Flags g = f;
    if (!g.horizon) g.horizon = default_horizon(p);
    auto gp = ground_input(p, g);
    emit(serialize_program(Program{gp.rules}), f.output, out);
    return ok;
}

inline int cmd_solve(const Flags &f, std::ostream &out, std::ostream &err) {
    auto gp = ground_input(parse_program(read_file(f.input), {f.input}), f);
    SolveOptions opts;
    opts.max_models = f.models;
    opts.single_threaded = f.single_threaded;
    auto res = solve(gp, opts);

    std::string text;
    if (f.format == "json") {
        nlohmann::ordered_json j;
        j["models"] = nlohmann::json::array();
        for (const auto &m : res.answer_sets) j["models"].push_back(literal_strings(m));
        j["stats"] = {{"models", res.answer_sets.size()},
                      {"branches", res.stats.branches},
                      {"propagations", res.stats.propagations},
                      {"stratified", res.stats.stratified}};
        text = j.dump(2) + "\n";
    } else {
        for (std::size_t i = 0; i < res.answer_sets.size(); ++i)
            text += "Answer " + std::to_string(i + 1) + ": " + to_string(res.answer_sets[i]) + "\n";
        text += res.answer_sets.empty() ? "no answer set\n"
                                        : "models: " + std::to_string(res.answer_sets.size()) + "\n";
    }
    emit(text, f.output, out);
    if (res.answer_sets.empty()) {
        err << f.input << ": no answer set\n";
        return reasoning_failure;
    }
    return ok;
}

inline std::string anomaly_atom(const kb::Anomaly &a) {
    return std::string(a.kind == kb::Anomaly::Kind::Primary ? "primary_an(" : "derived_an(") +
           to_string(a.property) + ", " + to_string(a.agent) + ", " + std::to_string(a.time) + ")";
}

inline int cmd_analyze(const Flags &f, std::ostream &out) {
    kb::KbConfig cfg;
    if (!f.kb_config.empty()) cfg = kb::parse_kb_config(read_file(f.kb_config), f.kb_config);
    if (f.horizon) cfg.horizon = *f.horizon;
    auto report = kb::load_report(f.input);
    kb::AnalyzeOptions opts;
    opts.single_threaded = f.single_threaded;
    auto a = kb::run_analysis(report, cfg, opts);
    const auto &r = a.report;

    std::vector<Literal> traced;
    for (const auto &t : f.traces) {
        auto p = parse_program(t + ".", {"--trace"});
        if (p.rules.size() != 1 || !p.rules[0].is_fact() || !p.rules[0].head.is_ground())
            throw ParseError({"--trace", 1, 1}, "expected a ground literal");
        traced.push_back(p.rules[0].head);
    }

    std::string text;
    if (f.format == "json") {
        nlohmann::ordered_json j;
        j["primary"] = nlohmann::json::array();
        j["derived"] = nlohmann::json::array();
        for (const auto &an : r.anomalies)
            j[an.kind == kb::Anomaly::Kind::Primary ? "primary" : "derived"].push_back(
                {{"property", to_string(an.property)}, {"agent", to_string(an.agent)}, {"time", an.time}});
        j["cause"] = r.cause_sentence.value_or("");
        j["model_size"] = r.model.literals.size();
        for (const auto &l : traced) j["traces"][to_string(l)] = kb::format_derivation(kb::trace(a, l));
        text = j.dump(2) + "\n";
    } else {
        text += "report: " + report.source + " (horizon " + std::to_string(a.horizon) + ", " +
                std::to_string(a.ground.rules.size()) + " ground rules, " +
                std::to_string(r.model.literals.size()) + " literals in the answer set)\n";
        for (const auto &l : traced) text += "\n" + kb::format_derivation(kb::trace(a, l));
        if (!traced.empty()) text += "\n";
        if (r.anomalies.empty()) text += "no anomaly\n";
        for (const auto &an : r.anomalies) text += anomaly_atom(an) + "\n";
        text += r.cause_sentence ? "cause: " + *r.cause_sentence + "\n" : "cause: none\n";
    }
    emit(text, f.output, out);
    return ok;
}

inline int cmd_selftest(const Flags &f, std::ostream &out) {
    int failures = 0;
    auto check = [&](const std::string &name, bool passed, const std::string &detail = "") {
        out << (passed ? "ok   " : "FAIL ") << name;
        if (!passed && !detail.empty()) out << ": " << detail;
        out << "\n";
        if (!passed) ++failures;
    };
    SolveOptions sopts;
    sopts.single_threaded = f.single_threaded;
    auto models_of = [&](std::string_view text) {
        auto p = parse_program(text, {"<fixture>"});
        std::vector<std::string> out_models;
        for (const auto &m : solve(ground_input(p, f), sopts).answer_sets) out_models.push_back(to_string(m));
        return out_models;
    };
    auto joined = [](const std::vector<std::string> &v) {
        std::string s;
        for (const auto &x : v) s += (s.empty() ? "" : " ") + x;
        return s.empty() ? "(none)" : s;
    };

    auto m1 = models_of(fixtures::p1);
    check("p1 has answer sets {a} and {b, -c}", m1 == std::vector<std::string>{"{a}", "{b, -c}"}, joined(m1));
    auto m2 = models_of(fixtures::p2);
    check("p2 has no answer set", m2.empty(), joined(m2));
    auto m3 = models_of(fixtures::bird);
    check("bird/penguin has one answer set",
          m3 == std::vector<std::string>{"{bird(1), bird(2), fly(1), -fly(2), penguin(2)}"}, joined(m3));

    try {
        kb::AnalyzeOptions aopts;
        aopts.single_threaded = f.single_threaded;
        auto r = kb::analyze(kb::parse_report(fixtures::collision, "<report>"), {}, aopts);
        std::vector<std::string> got;
        for (const auto &an : r.anomalies) got.push_back(anomaly_atom(an));
        const std::vector<std::string> want{"primary_an(control, veh_b, 1)", "derived_an(control, veh_a, 4)",
                                            "derived_an(stop, veh_a, 5)"};
        check("collision report anomalies", got == want, joined(got));
        check("collision report cause", r.cause_sentence == std::string(fixtures::collision_cause),
              r.cause_sentence.value_or("(none)"));
    } catch (const std::exception &e) {
        check("collision report", false, e.what());
    }
    out << (failures ? std::to_string(failures) + " check(s) failed\n" : "all checks passed\n");
    return failures ? reasoning_failure : ok;
}

} // namespace detail

inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Default theories, extended logic programs and accident report analysis", "nmr"};
    app.require_subcommand(1, 1);
    detail::Flags f;
    auto check_format = CLI::IsMember({"text", "json"});

    auto *compile = app.add_subcommand("compile", "translate a default theory (.dl) into a logic program (.elp)");
    compile->add_option("file", f.input, "input .dl file")->required();
    compile->add_option("-o,--output", f.output, "output path (default: stdout)");

    auto *groundc = app.add_subcommand("ground", "instantiate a program over its sorts");
    groundc->add_option("file", f.input, "input .elp file")->required();
    groundc->add_option("--horizon", f.horizon, "last time point (default: largest integer in a fact + 1)")
        ->check(CLI::NonNegativeNumber);
    groundc->add_option("-o,--output", f.output, "output path (default: stdout)");
    groundc->add_flag("--single-threaded", f.single_threaded, "ground on one thread");

    auto *solvec = app.add_subcommand("solve", "list answer sets (grounds first if needed)");
    solvec->add_option("file", f.input, "input .elp file")->required();
    solvec->add_option("--models", f.models, "stop after N answer sets (0: all)");
    solvec->add_option("--horizon", f.horizon, "last time point for grounding")->check(CLI::NonNegativeNumber);
    solvec->add_option("--format", f.format, "text or json")->check(check_format);
    solvec->add_option("-o,--output", f.output, "output path (default: stdout)");
    solvec->add_flag("--single-threaded", f.single_threaded, "no worker threads");

    auto *analyzec = app.add_subcommand("analyze", "find the anomalies and the cause in an accident report");
    analyzec->add_option("report", f.input, "report .elp file (facts only)")->required();
    analyzec->add_option("--kb-config", f.kb_config, "knowledge base configuration file");
    analyzec->add_option("--horizon", f.horizon, "last time point (default: last report time + 1)")
        ->check(CLI::NonNegativeNumber);
    analyzec->add_option("--format", f.format, "text or json")->check(check_format);
    analyzec->add_option("--trace", f.traces, "print the derivation of a literal of the answer set");
    analyzec->add_option("-o,--output", f.output, "output path (default: stdout)");
    analyzec->add_flag("--single-threaded", f.single_threaded, "no worker threads");

    auto *selftest = app.add_subcommand("selftest", "run the built-in golden checks");
    selftest->add_flag("--single-threaded", f.single_threaded, "no worker threads");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : input_failure;
    }

    try {
        if (compile->parsed()) return detail::cmd_compile(f, out);
        if (groundc->parsed()) return detail::cmd_ground(f, out);
        if (solvec->parsed()) return detail::cmd_solve(f, out, err);
        if (analyzec->parsed()) return detail::cmd_analyze(f, out);
        return detail::cmd_selftest(f, out);
    } catch (const kb::ReasoningError &e) {
        err << "error: " << e.what() << "\n";
        return reasoning_failure;
    } catch (const SolverLimitError &e) {
        err << "error: " << e.what() << "\n";
        return reasoning_failure;
    } catch (const std::exception &e) {
        // parse errors already carry file:line:col
        err << "error: " << e.what() << "\n";
        return input_failure;
    }
}

} // namespace nmr::cli

#endif
