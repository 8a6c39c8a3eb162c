#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballean/instance.hpp"

using namespace ballean;

namespace {
Runner makeRunner(Nat horizon = 1024) {
  RunOptions opt;
  opt.budget.horizon = horizon;
  return Runner(opt);
}
}  // namespace

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(Sexpr::parseAll("(def X (union"), ParseError);
  try {
    Sexpr::parseAll("(def X\n  (union");
  } catch (const ParseError& ex) {
    CHECK(ex.line == 2);
  }

  auto runner = makeRunner();
  CHECK_THROWS_AS(runner.execDocument("(def X (no-such-node 1))"), ParseError);
  CHECK_THROWS_AS(runner.execDocument("(check finiteness missing)"), ParseError);
  CHECK_THROWS_AS(runner.execDocument("(frobnicate)"), ParseError);
}

TEST_CASE("canonical documents round-trip through the reader") {
  const std::string doc =
      "(def Y (gen pow4)) (def Z (union (evens) (finite 1 3 5)))";
  const auto forms = Sexpr::parseAll(doc);
  std::string rendered;
  for (const auto& f : forms) rendered += f.render() + " ";
  const auto again = Sexpr::parseAll(rendered);
  REQUIRE(again.size() == forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i)
    CHECK(again[i].render() == forms[i].render());
}

TEST_CASE("sets survive render, parse and re-evaluation") {
  auto runner = makeRunner();
  const char* exprs[] = {
      "(finite 1 2 9)",
      "(ap period 6 residues (1 4) threshold 9 prelude (0 2))",
      "(union (evens) (finite 1 3 5))",
      "(complement (evens))",
  };
  for (const char* text : exprs) {
    Value v = runner.eval(Sexpr::parseAll(text).front());
    const SetExpr& s = std::get<SetExpr>(v);
    Value w = runner.eval(Sexpr::parseAll(s.render()).front());
    CHECK(std::get<SetExpr>(w).render() == s.render());
  }
}

TEST_CASE("definitions evaluate and resolve in order") {
  auto runner = makeRunner();
  runner.execDocument(
      "(def Y (gen pow4))"
      "(def Z (gen two-pow4))"
      "(def M (metric-nat))"
      "(check asymptotically-disjoint Y Z :space M)");
  CHECK(runner.exitCode() == 0);
  REQUIRE_FALSE(runner.lines().empty());
  CHECK(runner.lines().front().find("TRUE") != std::string::npos);
}

TEST_CASE("exit codes follow the verdict multiset") {
  auto t = makeRunner();
  t.execDocument("(check finiteness (finite 1 2))");
  CHECK(t.exitCode() == 0);

  auto f = makeRunner();
  f.execDocument("(check finiteness (evens))");
  CHECK(f.exitCode() == 1);

  auto expected = makeRunner();
  expected.execDocument("(check finiteness (evens) :expect false)");
  CHECK(expected.exitCode() == 0);

  // Forward references are unresolved names.
  auto fwd = makeRunner();
  CHECK_THROWS_AS(fwd.execDocument("(check discrete MISSING)"), ParseError);

  auto unknown = makeRunner();
  unknown.execDocument("(def M (metric-nat)) (check antidiscrete M)");
  CHECK(unknown.exitCode() == 2);

  auto err = makeRunner();
  err.execDocument("(invariants (powerset nat))");
  CHECK(err.exitCode() == 3);
}

TEST_CASE("expectation mismatches fail the run") {
  auto runner = makeRunner();
  runner.execDocument("(check finiteness (finite 1 2) :expect false)");
  CHECK(runner.exitCode() == 1);
  CHECK(runner.lines().front().find("EXPECTATION FAILED") != std::string::npos);
}

TEST_CASE("records format emits one tab-separated row per verdict") {
  RunOptions opt;
  opt.budget.horizon = 512;
  opt.format = "lines";
  Runner runner(opt);
  runner.execDocument(
      "(def E (evens)) (def O (odds))"
      "(check asymptotically-disjoint E O :space (metric-nat) :expect false)");
  const std::string report = runner.renderedReport();
  CHECK(report.find("E,O\tasymptotically-disjoint\tFALSE") != std::string::npos);
}

TEST_CASE("infer directive prints citation-carrying lines") {
  auto runner = makeRunner();
  runner.execDocument(
      "(def B (finite-subsets nat))"
      "(infer (b-product B (rays)))");
  bool sawThm5 = false;
  for (const auto& line : runner.lines())
    if (line.find("metrizable: TRUE") != std::string::npos &&
        line.find("Thm 5") != std::string::npos)
      sawThm5 = true;
  CHECK(sawThm5);
}

TEST_CASE("enumerate-finite reports the structure count") {
  auto runner = makeRunner();
  runner.execDocument("(enumerate-finite 2)");
  CHECK(runner.exitCode() == 0);
  CHECK(runner.lines().front().find("2 coarse structures") != std::string::npos);
}

TEST_CASE("invariants directive prints the triple with a justification") {
  auto runner = makeRunner();
  runner.execDocument("(invariants (finite-subsets nat))");
  CHECK(runner.exitCode() == 0);
  CHECK(runner.lines().front().find("add=aleph0 cov=aleph0 cof=aleph0") !=
        std::string::npos);
}

TEST_CASE("separate directive emits a table and a verification summary") {
  RunOptions opt;
  opt.budget.horizon = 512;
  Runner runner(opt);
  runner.execDocument(
      "(def Y (gen pow4)) (def Z (gen two-pow4))"
      "(separate Y Z :space (metric-nat))");
  CHECK(runner.exitCode() == 0);
  bool sawTable = false, sawVerify = false;
  for (const auto& line : runner.lines()) {
    if (line.find("separator: ratio") != std::string::npos) sawTable = true;
    if (line.find("verify eps=1/8: TRUE") != std::string::npos) sawVerify = true;
  }
  CHECK(sawTable);
  CHECK(sawVerify);
}

TEST_CASE("separate refuses entangled inputs") {
  auto runner = makeRunner();
  runner.execDocument(
      "(def E (evens)) (def O (odds)) (separate E O :space (metric-nat))");
  CHECK(runner.exitCode() == 3);
}

TEST_CASE("cross-validate over a small document reports zero inconsistencies") {
  auto runner = makeRunner();
  runner.execDocument(
      "(def M (metric-nat))"
      "(def D (down (finite-subsets nat)))"
      "(catalog (evens) (odds) (gen pow4) (gen two-pow4))"
      "(witness (doubling))"
      "(cross-validate)");
  CHECK(runner.exitCode() == 0);
  bool sawSummary = false;
  for (const auto& line : runner.lines())
    if (line.find("0 inconsistencies") != std::string::npos) sawSummary = true;
  CHECK(sawSummary);
}

TEST_CASE("horizon refinement never flips decided verdicts") {
  const std::string doc =
      "(def Y (gen pow4)) (def Z (gen two-pow4))"
      "(def M (metric-nat))"
      "(check asymptotically-disjoint Y Z :space M)"
      "(check asymptotically-disjoint (evens) (odds) :space M)"
      "(check bounded (finite 1 5 9) :space M)"
      "(check large (evens) :space M)"
      "(check discrete M)";
  std::vector<std::vector<std::string>> runs;
  for (Nat h : {Nat{1024}, Nat{4096}}) {
    RunOptions opt;
    opt.budget.horizon = h;
    opt.format = "lines";
    Runner runner(opt);
    runner.execDocument(doc);
    runs.push_back(runner.records());
  }
  REQUIRE(runs[0].size() == runs[1].size());
  for (std::size_t i = 0; i < runs[0].size(); ++i) {
    const bool lowDecided = runs[0][i].find("UNKNOWN") == std::string::npos;
    if (lowDecided) CHECK(runs[0][i] == runs[1][i]);
  }
}
