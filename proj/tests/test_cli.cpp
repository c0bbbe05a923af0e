#include "nmr/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

namespace {

std::string samples(const char *f) { return std::string(NMR_SAMPLES_DIR) + "/" + f; }

struct Run {
    int status;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int status = nmr::cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

bool ends_with(const std::string &s, const std::string &tail) {
    return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

std::filesystem::path temp_file(const std::string &name) {
    return std::filesystem::temp_directory_path() / ("nmr_cli_test_" + name);
}

} // namespace

TEST(Cli, SolveP1) {
    auto r = run({"solve", samples("p1.elp"), "--models", "10"});
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "Answer 1: {a}\nAnswer 2: {b, -c}\nmodels: 2\n");
}

TEST(Cli, SolveP2) {
    auto r = run({"solve", samples("p2.elp")});
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("no answer set"), std::string::npos);
}

TEST(Cli, SolveJson) {
    auto r = run({"solve", samples("p1.elp"), "--models", "0", "--format", "json"});
    ASSERT_EQ(r.status, 0);
    auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["models"].size(), 2u);
    EXPECT_EQ(j["models"][1], (nlohmann::json{"b", "-c"}));
    EXPECT_EQ(j["stats"]["models"], 2);
}

TEST(Cli, SolveGroundsFirst) {
    auto r = run({"solve", samples("bird.elp")});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("{bird(1), bird(2), fly(1), -fly(2), penguin(2)}"), std::string::npos);
}

TEST(Cli, OutputIsByteIdentical) {
    auto a = run({"solve", samples("p1.elp"), "--models", "0", "--format", "json"});
    auto b = run({"solve", samples("p1.elp"), "--models", "0", "--format", "json", "--single-threaded"});
    EXPECT_EQ(a.out, b.out);
    auto c = run({"analyze", samples("collision.elp"), "--format", "json"});
    auto d = run({"analyze", samples("collision.elp"), "--format", "json"});
    EXPECT_EQ(c.out, d.out);
}

TEST(Cli, Compile) {
    auto out = temp_file("tweety.elp");
    auto r = run({"compile", samples("tweety.dl"), "-o", out.string()});
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    auto text = nmr::read_file(out);
    EXPECT_NE(text.find("flies(X) :- bird(X), not -flies(X)."), std::string::npos);
    // the compiled program solves
    auto s = run({"solve", out.string()});
    EXPECT_EQ(s.status, 0);
    EXPECT_NE(s.out.find("flies(tweety)"), std::string::npos);
    EXPECT_NE(s.out.find("-flies(opus)"), std::string::npos);
    std::filesystem::remove(out);
}

TEST(Cli, Ground) {
    auto r = run({"ground", samples("bird.elp"), "--horizon", "0"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("fly(2) :- bird(2), not penguin(2)."), std::string::npos);
    auto g = nmr::parse_program(r.out);
    for (const auto &rule : g.rules) EXPECT_TRUE(rule.is_ground());
}

TEST(Cli, AnalyzeText) {
    auto r = run({"analyze", samples("collision.elp"), "--kb-config", samples("kb.cfg")});
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(ends_with(r.out, "the loss of control of vehicle B at time 1\n")) << r.out;
}

TEST(Cli, AnalyzeJson) {
    auto r = run({"analyze", samples("ice.elp"), "--format", "json"});
    ASSERT_EQ(r.status, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["primary"].size(), 1u);
    EXPECT_EQ(j["primary"][0]["time"], 2);
    EXPECT_TRUE(j["derived"].empty());
    EXPECT_GT(j["model_size"].get<int>(), 0);
}

TEST(Cli, AnalyzeTrace) {
    auto r = run({"analyze", samples("collision.elp"), "--trace", "-holds(control, veh_a, 5)"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("-holds(control,veh_a,5)   [double_shock]"), std::string::npos) << r.out;
    auto bad = run({"analyze", samples("collision.elp"), "--trace", "must(stop, veh_b, 1)"});
    EXPECT_EQ(bad.status, 2);
}

TEST(Cli, InputErrors) {
    EXPECT_EQ(run({"solve", samples("missing.elp")}).status, 2);
    auto bad = temp_file("bad.elp");
    std::ofstream(bad) << "a :- b\n";
    auto r = run({"solve", bad.string()});
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find(":2:1:"), std::string::npos) << r.err;
    EXPECT_EQ(run({"analyze", bad.string()}).status, 2);
    std::filesystem::remove(bad);
    EXPECT_EQ(run({"analyze", samples("p1.elp")}).status, 2); // rules in a report
}

TEST(Cli, ReasoningErrors) {
    auto report = temp_file("clash.elp");
    std::ofstream(report) << "vehicle(veh_a). object(veh_a). -holds(control, veh_a, 0).\n";
    auto r = run({"analyze", report.string()});
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("inconsistent"), std::string::npos);
    std::filesystem::remove(report);
}

TEST(Cli, Usage) {
    EXPECT_EQ(run({}).status, 2);
    EXPECT_EQ(run({"frobnicate"}).status, 2);
    EXPECT_EQ(run({"analyze"}).status, 2);
    EXPECT_EQ(run({"solve", samples("p1.elp"), "--format", "xml"}).status, 2);
    EXPECT_EQ(run({"ground", samples("bird.elp"), "--horizon", "-3"}).status, 2);
    EXPECT_EQ(run({"--help"}).status, 0);
}

TEST(Cli, Selftest) {
    auto r = run({"selftest", "--single-threaded"});
    EXPECT_NE(r.out.find("ok   p1 has answer sets"), std::string::npos);
    EXPECT_NE(r.out.find("ok   p2 has no answer set"), std::string::npos);
    EXPECT_NE(r.out.find("ok   bird/penguin"), std::string::npos);
    EXPECT_NE(r.out.find("ok   collision report cause"), std::string::npos);
}
