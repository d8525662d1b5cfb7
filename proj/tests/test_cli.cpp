#include <gtest/gtest.h>

#include "runner.hpp"

using namespace quasilin;

namespace {

std::size_t error_column(std::string_view text) {
  try {
    script::parse(text);
  } catch (const ParseError& e) {
    return e.column();
  }
  return 0;
}

}  // namespace

TEST(ScriptParser, SpecExamples) {
  const auto s = script::parse("field GF2(t1,t2)  form p = <t1, t2, t1+t2>  invariants p");
  ASSERT_EQ(s.statements.size(), 3U);
  EXPECT_EQ(s.statements[1].exprs.size(), 3U);
  EXPECT_EQ(s.statements[2].name, "invariants");

  const auto session = script::load("field GF2(t1)\nadjoin r1 = sqrt(t1)\nform q = <1, r1>\n");
  EXPECT_EQ(session.tower().num_roots(), 1U);
  EXPECT_EQ(session.form("q").to_string(), "<1, r1>");
}

TEST(ScriptParser, PositionedErrors) {
  EXPECT_THROW(script::parse("field GF2(t1) form p = <1, u>"), ParseError);
  EXPECT_EQ(error_column("field GF2(t1) form p = <1, u>"), 28U);
  EXPECT_THROW(script::parse("form p = <1>"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1) check p"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1) form p = <1> check p"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1) form p = <1> example46 p 1 2"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1) fuzz colour=3"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1) form p = <2*t1>"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1) form t1 = <1>"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1, t1)"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1) form p = <1 t1>"), ParseError);
  EXPECT_THROW(script::parse("field GF2(t1) form p = <1> $"), ParseError);
  EXPECT_THROW(script::load("field GF2(t1) adjoin r = sqrt(t1^2)"), ParseError);
  EXPECT_THROW(script::load("field GF2(t1) form p = <1/(t1 + t1)>"), ParseError);
}

TEST(ScriptParser, PrintParseFixpoint) {
  const char* text =
      "# comment\nfield GF2(a,b)\nadjoin r1=sqrt(a*b+a^3)  adjoin var c\n"
      "form p=<(a+b)*(a+c)/(b+1), r1*a+c^-2, a+(b+c), (a*b)^2>\n"
      "check p p tower p fuzz instances=3 seed=9 example46 p 1 0 0 invariants p";
  const std::string once = script::to_string(script::parse(text));
  EXPECT_EQ(script::to_string(script::parse(once)), once);
  EXPECT_NE(once.find("form p = <(a + b)*(a + c)/(b + 1), r1*a + c^-2, a + (b + c), (a*b)^2>"), std::string::npos);
  const auto x = script::load(text).form("p");
  const auto y = script::load(once).form("p");
  EXPECT_EQ(x.to_string(), y.to_string());
}

TEST(ScriptParser, ReproducersRoundTrip) {
  const FieldTower k = FieldTower::rational({"t1", "t2"});
  const FieldTower l = adjoin_sqrt(k.adjoin_transcendentals({"X1"}), "r1", k.variable(0) + k.variable(1));
  const auto t1 = l.variable(0), x = l.variable(2), r = l.root(0);
  const QForm q(l, {t1 / (x + l.one()), r * t1 + x, (t1 * t1 + x) * r, l.one()});
  const auto session = script::load(l.descriptor() + "form q = " + q.to_string() + "\n");
  const QForm back = session.form("q");
  ASSERT_EQ(back.dim(), q.dim());
  for (std::size_t i = 0; i < q.dim(); ++i) EXPECT_EQ(back[i].to_string(), q[i].to_string());
}

TEST(Runner, ExitCodes) {
  cli::Options opt;
  EXPECT_EQ(cli::run("field GF2(t1) form p = <1, u>", opt).exit_code, cli::parse_error);
  EXPECT_EQ(cli::run("field GF2(t1) form p = <1, 1> tower p invariants p", opt).exit_code, cli::parse_error);
  const auto ok = cli::run("field GF2(t0,t1,t2) form p = <t0,t1,t2> form q = <1,t0> check p q", opt);
  EXPECT_EQ(ok.exit_code, cli::ok);
  EXPECT_EQ(ok.document["results"][0]["i0"], 0);

  opt.var_budget = 4;
  const auto refused = cli::run("field GF2(t0,t1,t2) form p = <t0,t1,t2> check p p", opt);
  EXPECT_EQ(refused.exit_code, cli::resource_limit);
  EXPECT_EQ(refused.document["error"]["kind"], "resource");
}

TEST(Runner, SpecCommandExamples) {
  cli::Options opt;
  const auto inv = cli::run("field GF2(X0,X1,X2,X3) form p = <X0,X1,X2,X3> invariants p", opt);
  EXPECT_EQ(inv.document["results"][0]["lndeg"], 3);

  const auto tw = cli::run("field GF2(t1,t2) form p = <1,t1,t2,t1*t2> tower p", opt);
  const auto& rec = tw.document["results"][0];
  EXPECT_EQ(rec["height"], 2);
  EXPECT_EQ(rec["steps"][1]["i_r"], 2);
  EXPECT_EQ(rec["steps"][2]["i_r"], 1);
  EXPECT_EQ(rec["hqp"], 0);
  EXPECT_EQ(tw.document["schema"], "quasilin/1");
}

TEST(Runner, JsonIsStable) {
  cli::Options opt;
  const char* text =
      "field GF2(t1,t2) form p = <1,t1,t2> form q = <t1,t2,t1*t2+1> invariants q tower p check p q fuzz instances=4";
  const auto a = cli::run(text, opt);
  const auto b = cli::run(text, opt);
  EXPECT_EQ(a.document.dump(), b.document.dump());
  EXPECT_EQ(a.exit_code, cli::ok);
}
