#include "nmr/parser.hpp"

#include <gtest/gtest.h>

using namespace nmr;

TEST(Parser, ElpRules) {
    auto p = parse_program("a :- not b.\n-c :- b.\nfact(1).\n");
    ASSERT_EQ(p.rules.size(), 3u);
    EXPECT_EQ(to_string(p.rules[0]), "a :- not b.");
    EXPECT_TRUE(p.rules[1].head.strong_negation);
    EXPECT_TRUE(p.rules[2].is_fact());
}

TEST(Parser, StrongNegationInsideDefaultNegation) {
    auto p = parse_program("a :- not -b, -c.");
    ASSERT_EQ(p.rules.size(), 1u);
    ASSERT_EQ(p.rules[0].body_neg.size(), 1u);
    EXPECT_TRUE(p.rules[0].body_neg[0].strong_negation);
    ASSERT_EQ(p.rules[0].body_pos.size(), 1u);
    EXPECT_TRUE(p.rules[0].body_pos[0].strong_negation);
}

TEST(Parser, TermsOffsetsAndFunctions) {
    auto p = parse_program("h(T+1, X) :- p(combine(bump, X), T-1), q(-2).");
    const auto &r = p.rules[0];
    EXPECT_EQ(r.head.args[0].kind, Term::Kind::ArithOffset);
    EXPECT_EQ(r.head.args[0].value, 1);
    EXPECT_EQ(r.body_pos[0].args[1].value, -1);
    EXPECT_EQ(r.body_pos[0].args[0].name, "combine");
    EXPECT_EQ(r.body_pos[1].args[0], Term::integer(-2));
}

TEST(Parser, NotAsFunctionSymbol) {
    auto p = parse_program("h :- not must(not(backwards), a, 1).");
    ASSERT_EQ(p.rules[0].body_neg.size(), 1u);
    EXPECT_EQ(to_string(p.rules[0].body_neg[0].args[0]), "not(backwards)");
}

TEST(Parser, CommentsAndWhitespace) {
    auto p = parse_program("% header\n  a.   % trailing\n\n b :- a.\n");
    EXPECT_EQ(p.rules.size(), 2u);
}

TEST(Parser, ErrorsCarryPosition) {
    try {
        parse_program("a :- b.\nc :- d\n", {"x.elp"});
        FAIL() << "no error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.span().file, "x.elp");
        EXPECT_EQ(e.span().line, 3);
        EXPECT_NE(std::string(e.what()).find("x.elp:3:"), std::string::npos);
    }
    try {
        parse_program("a :- b ? c.", {"y.elp"});
        FAIL() << "no error";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.span().line, 1);
        EXPECT_EQ(e.span().column, 8);
    }
}

TEST(Parser, DepthLimit) {
    EXPECT_NO_THROW(parse_program("p(f(g(h(a)))).", {}));
    EXPECT_THROW(parse_program("p(f(g(h(i(a))))).", {}), ParseError);
    ParseOptions deep;
    deep.max_depth = 5;
    EXPECT_NO_THROW(parse_program("p(f(g(h(i(a))))).", deep));
}

TEST(Parser, DlForms) {
    auto t = parse_default_theory("bird(tweety).\n"
                                  "penguin(X) -> bird(X).\n"
                                  "a & b => c.\n"
                                  "bird(X) : flies(X).\n"
                                  "stop :: a & b : c [-d, e].\n"
                                  ": quiet.\n");
    ASSERT_EQ(t.facts.size(), 1u);
    ASSERT_EQ(t.rules.size(), 5u);
    EXPECT_EQ(t.rules[0].kind, DefaultRule::Kind::Implication);
    EXPECT_TRUE(t.rules[0].contrapositives);
    EXPECT_EQ(t.rules[1].kind, DefaultRule::Kind::Implication);
    EXPECT_FALSE(t.rules[1].contrapositives);
    EXPECT_EQ(t.rules[1].prerequisites.size(), 2u);
    EXPECT_EQ(t.rules[2].kind, DefaultRule::Kind::NormalDefault);
    EXPECT_EQ(t.rules[3].kind, DefaultRule::Kind::SemiNormalDefault);
    EXPECT_EQ(t.rules[3].label, "stop");
    EXPECT_EQ(t.rules[3].constraints.size(), 2u);
    EXPECT_TRUE(t.rules[3].constraints[0].strong_negation);
    EXPECT_TRUE(t.rules[4].prerequisites.empty());
}

TEST(Parser, DlErrors) {
    EXPECT_THROW(parse_default_theory("a : b []."), ParseError);
    EXPECT_THROW(parse_default_theory("a & b."), ParseError);
    EXPECT_THROW(parse_default_theory("a -> ."), ParseError);
    EXPECT_THROW(parse_default_theory("a : b [c"), ParseError);
}

TEST(Parser, ProgramRoundTrip) {
    const std::string text = "a :- not b.\n"
                             "-c :- b.\n"
                             "holds(control,A,0) :- agent(A), vehicle(A).\n"
                             "h(T+1) :- p(T), not -q(combine(x,T-1)).\n";
    auto p = parse_program(text);
    EXPECT_EQ(serialize_program(p), text);
    EXPECT_EQ(parse_program(serialize_program(p)).rules, p.rules);
}

TEST(Parser, TheoryRoundTrip) {
    auto t = parse_default_theory("f(a).\nl :: a & b -> c.\nx => y.\n: d.\nu : v [w, -z].\n");
    auto again = parse_default_theory(serialize_theory(t));
    EXPECT_EQ(serialize_theory(again), serialize_theory(t));
    EXPECT_EQ(again.rules.size(), 4u);
    EXPECT_EQ(again.rules[0].label, "l");
}

TEST(Parser, ReadFileFailure) {
    EXPECT_THROW(read_file("/nonexistent/file.elp"), std::runtime_error);
}

TEST(Parser, SampleFilesParse) {
    for (const char *f : {"p1.elp", "p2.elp", "bird.elp", "collision.elp", "ice.elp", "kb.cfg"})
        EXPECT_NO_THROW(parse_program(read_file(std::string(NMR_SAMPLES_DIR) + "/" + f))) << f;
    EXPECT_NO_THROW(parse_default_theory(read_file(std::string(NMR_SAMPLES_DIR) + "/tweety.dl")));
}
