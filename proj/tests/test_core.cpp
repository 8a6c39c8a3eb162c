#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ballean/constructions.hpp"
#include "ballean/finiterel.hpp"
#include "support/oracles.hpp"

using namespace ballean;

namespace {
const GroundSet kNat = GroundSet::naturals();

Entourage randomFiniteRel(std::mt19937& rng, const GroundSet& g, Nat n) {
  const auto pairs = oracles::randomRelation(rng, n);
  std::vector<std::pair<Element, Element>> out;
  for (const auto& [a, b] : pairs)
    if (a != b) out.emplace_back(Element::nat(a), Element::nat(b));
  return Entourage::finiteRel(g, std::move(out));
}

// Relation matrix of an entourage on the first n points.
std::vector<bool> matrixOf(const Entourage& e, Nat n) {
  std::vector<bool> m(n * n);
  for (Nat x = 0; x < n; ++x)
    for (Nat y = 0; y < n; ++y)
      m[x * n + y] = e.relates(Element::nat(x), Element::nat(y));
  return m;
}
}  // namespace

TEST_CASE("metric composition matches brute pair composition") {
  const Entourage e2 = Entourage::metric(kNat, 2);
  const Entourage e3 = Entourage::metric(kNat, 3);
  const Entourage c = Entourage::compose(e2, e3);

  // Oracle: explicit pair sets on {0..50}.
  oracles::PairSet p2, p3;
  for (Nat x = 0; x <= 50; ++x)
    for (Nat y = 0; y <= 50; ++y) {
      const Nat d = x > y ? x - y : y - x;
      if (d <= 2) p2.insert({x, y});
      if (d <= 3) p3.insert({x, y});
    }
  const auto pc = oracles::composePairs(p2, p3);
  for (Nat x = 5; x <= 45; ++x)
    for (Nat y = 0; y <= 50; ++y)
      CHECK(c.relates(Element::nat(x), Element::nat(y)) ==
            (pc.count({x, y}) == 1));
  // Balls are the radius-5 intervals.
  auto ball = c.ballList(Element::nat(20), 64);
  REQUIRE(ball.has_value());
  CHECK(ball->size() == 11);
  CHECK(ball->front() == Element::nat(15));
  CHECK(ball->back() == Element::nat(25));
}

TEST_CASE("composition with the diagonal is the identity, ball for ball") {
  const Entourage e = Entourage::metric(kNat, 4);
  const Entourage delta = Entourage::metric(kNat, 0);
  const Entourage c = Entourage::compose(e, delta);
  for (Nat x = 0; x <= 200; ++x) {
    auto a = e.ballList(Element::nat(x), 64);
    auto b = c.ballList(Element::nat(x), 64);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(*a == *b);
  }
}

TEST_CASE("finite relation self-composition on a 3-point ground") {
  const GroundSet g3 = GroundSet::finitePoints(3);
  const Entourage e = Entourage::finiteRel(
      g3, {{Element::nat(0), Element::nat(1)}, {Element::nat(1), Element::nat(0)}});
  const Entourage c = Entourage::compose(e, e);
  // Oracle: exhaustive relational join.
  oracles::PairSet pairs = oracles::diagonalOn(3);
  pairs.insert({0, 1});
  pairs.insert({1, 0});
  const auto joined = oracles::composePairs(pairs, pairs);
  for (Nat x = 0; x < 3; ++x)
    for (Nat y = 0; y < 3; ++y)
      CHECK(c.relates(Element::nat(x), Element::nat(y)) ==
            (joined.count({x, y}) == 1));
  CHECK(c.relates(Element::nat(0), Element::nat(0)));
  CHECK(c.relates(Element::nat(0), Element::nat(1)));
  CHECK(c.relates(Element::nat(1), Element::nat(0)));
  CHECK(c.relates(Element::nat(1), Element::nat(1)));
  CHECK_FALSE(c.relates(Element::nat(0), Element::nat(2)));
}

TEST_CASE("inversion: symmetric presentations, pair swaps, involution") {
  CHECK(Entourage::metric(kNat, 3).inverted().relates(Element::nat(2),
                                                      Element::nat(5)));
  const Entourage e =
      Entourage::finiteRel(kNat, {{Element::nat(0), Element::nat(1)}});
  CHECK(e.inverted().relates(Element::nat(1), Element::nat(0)));
  CHECK_FALSE(e.inverted().relates(Element::nat(0), Element::nat(1)));

  const GroundSet g6 = GroundSet::finitePoints(6);
  std::mt19937 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const Entourage a = randomFiniteRel(rng, g6, 6);
    const Entourage b = randomFiniteRel(rng, g6, 6);
    CHECK(matrixOf(a.inverted().inverted(), 6) == matrixOf(a, 6));
    CHECK(matrixOf(Entourage::compose(a, b).inverted(), 6) ==
          matrixOf(Entourage::compose(b.inverted(), a.inverted()), 6));
  }
}

TEST_CASE("entourage images: exact on the metric tier") {
  Budget budget;
  const SetExpr img = applyEntourage(Entourage::metric(kNat, 3),
                                     SetExpr::finiteNats(kNat, {5}), budget);
  CHECK(img.equalsCanonical(SetExpr::interval(kNat, 2, 8)));

  const SetExpr thick = applyEntourage(
      Entourage::metric(kNat, 1), SetExpr::arithmetic(kNat, 2, {0}), budget);
  CHECK(thick.equalsCanonical(SetExpr::full(kNat)));

  const SetExpr whole =
      applyEntourage(Entourage::metric(kNat, 2), SetExpr::full(kNat), budget);
  for (Nat x = 0; x <= 4096; x += 37) CHECK(whole.containsNat(x));

  // Non-saturating widening keeps the exact residue structure.
  const SetExpr widened = applyEntourage(
      Entourage::metric(kNat, 1), SetExpr::arithmetic(kNat, 5, {0}), budget);
  CHECK(widened.kind() == SetExpr::Kind::EvPeriodic);
  for (Nat x = 0; x <= 2000; ++x) {
    const bool expect = x % 5 == 0 || x % 5 == 1 || x % 5 == 4;
    REQUIRE(widened.containsNat(x) == expect);
  }
}

TEST_CASE("ball-map inversion requires a computable inverse image") {
  const Entourage bm = Entourage::ballMap(
      kNat, "one-way",
      [](const Element& x) {
        return SetExpr::finiteNats(GroundSet::naturals(), {x.natValue()});
      },
      nullptr);
  CHECK_THROWS_AS(bm.inverted(), UnsupportedPresentationError);
}

TEST_CASE("generated structure over the successor relation is the metric one") {
  const Entourage succ = Entourage::pairFn(
      kNat, "succ", [](Nat v) { return v + 1; },
      [](Nat v) -> std::optional<Nat> {
        if (v == 0) return std::nullopt;
        return v - 1;
      });
  const CoarsePresentation gen = generateStructure(kNat, {succ});
  // Balls away from the connecting-pair region are the metric intervals.
  for (Nat n : {1, 2, 3, 5}) {
    auto ball = gen.at(n).ballList(Element::nat(25), 256);
    REQUIRE(ball.has_value());
    std::vector<Element> expected;
    for (Nat y = 25 - n; y <= 25 + n; ++y) expected.push_back(Element::nat(y));
    CHECK(*ball == expected);
  }
}

TEST_CASE("generated structures are connected even with no generators") {
  const GroundSet g2 = GroundSet::finitePoints(2);
  const CoarsePresentation gen = generateStructure(g2, {});
  Budget budget;
  budget.horizon = 64;
  CHECK(isConnected(gen, budget).isTrue());
  CHECK(gen.at(4).relates(Element::nat(0), Element::nat(1)));
  CHECK(gen.at(4).relates(Element::nat(1), Element::nat(0)));
}

TEST_CASE("generation agrees with the brute-force closure on 3 points") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rel = oracles::randomRelation(rng, 3, 0.25);
    finiterel::Rel mask = 0;
    std::vector<std::pair<Element, Element>> pairs;
    for (const auto& [a, b] : rel) {
      mask |= finiterel::Rel{1} << (a * 3 + b);
      if (a != b) pairs.emplace_back(Element::nat(a), Element::nat(b));
    }
    const auto closure = finiterel::bruteClosure({mask}, 3);

    const GroundSet g3 = GroundSet::finitePoints(3);
    const CoarsePresentation gen =
        generateStructure(g3, {Entourage::finiteRel(g3, pairs)});
    // Chain value at a saturating index.
    finiterel::Rel chainMask = 0;
    const Entourage big = gen.at(24);
    for (Nat x = 0; x < 3; ++x)
      for (Nat y = 0; y < 3; ++y)
        if (big.relates(Element::nat(x), Element::nat(y)))
          chainMask |= finiterel::Rel{1} << (x * 3 + y);
    // Every diagonal-containing relation: member of the closure iff below the
    // saturated chain entourage.
    const finiterel::Rel diag = finiterel::diagonal(3);
    for (finiterel::Rel off = 0; off < 64; ++off) {
      finiterel::Rel e = diag;
      int bit = 0;
      for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
          if (x == y) continue;
          if (off & (finiterel::Rel{1} << bit)) e |= finiterel::Rel{1} << (x * 3 + y);
          ++bit;
        }
      REQUIRE((closure.count(e) == 1) == ((e & ~chainMask) == 0));
    }
  }
}

TEST_CASE("axiom checker") {
  // The full family of diagonal-containing relations on 3 points passes.
  std::vector<finiterel::Rel> all;
  const finiterel::Rel diag = finiterel::diagonal(3);
  for (finiterel::Rel off = 0; off < 64; ++off) {
    finiterel::Rel e = diag;
    int bit = 0;
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y) {
        if (x == y) continue;
        if (off & (finiterel::Rel{1} << bit)) e |= finiterel::Rel{1} << (x * 3 + y);
        ++bit;
      }
    all.push_back(e);
  }
  CHECK(finiterel::checkAxioms(all, 3).pass);

  // Missing inverse is reported with the offending relation.
  const finiterel::Rel d2 = finiterel::diagonal(2);
  const finiterel::Rel e01 = d2 | (finiterel::Rel{1} << (0 * 2 + 1));
  auto report = finiterel::checkAxioms({d2, e01}, 2);
  CHECK_FALSE(report.pass);
  bool mentionsInverse = false;
  for (const auto& v : report.violations)
    if (v.find("inverse") != std::string::npos) mentionsInverse = true;
  CHECK(mentionsInverse);
}

TEST_CASE("exactly two coarse structures on a 2-point ground") {
  auto count = finiterel::countCoarseStructures(2, 1u << 20);
  REQUIRE(count.has_value());
  CHECK(*count == 2);
}

TEST_CASE("connectivity verdicts") {
  Budget budget;
  budget.horizon = 512;
  CHECK(isConnected(metricNat(), budget).isTrue());

  const GroundSet g2 = GroundSet::finitePoints(2);
  const CoarsePresentation trivial = CoarsePresentation::make(
      g2, Prov::FiniteGround, [g2](Nat) { return Entourage::metric(g2, 0); },
      Verdict::yes("constant chain"), "(trivial)");
  const Verdict v = isConnected(trivial, budget);
  CHECK(v.isFalse());
  CHECK(v.witness().find("0") != std::string::npos);

  const CoarsePresentation down =
      smallestCompatible(BornologyPresentation::finiteSubsets(kNat));
  CHECK(isConnected(down, budget).isTrue());
}

TEST_CASE("subballean balls are the ambient balls intersected with the subset") {
  const CoarsePresentation sub =
      restrictPresentation(metricNat(), SetExpr::arithmetic(kNat, 2, {0}));
  auto ball = sub.at(3).ballList(Element::nat(6), 64);
  REQUIRE(ball.has_value());
  CHECK(*ball == std::vector<Element>{Element::nat(4), Element::nat(6),
                                      Element::nat(8)});

  Budget budget;
  budget.horizon = 512;
  const CoarsePresentation tiny =
      restrictPresentation(metricNat(), SetExpr::finiteNats(kNat, {3, 9, 12}));
  CHECK(isBounded(tiny, tiny.carrier(), budget).isTrue());
}

TEST_CASE("largeness verdicts") {
  Budget budget;
  CHECK(isLarge(metricNat(), SetExpr::arithmetic(kNat, 2, {0}), budget).isTrue());
  CHECK(isLarge(metricNat(), SetExpr::full(kNat), budget).isTrue());
  const SetExpr sparse =
      SetExpr::generator(kNat, "pow2", [](Nat k) { return Nat{1} << k; });
  CHECK(isLarge(metricNat(), sparse, budget).isFalse());
}

TEST_CASE("coarse map verdicts") {
  Budget budget;
  budget.horizon = 1024;
  const CoarsePresentation m = metricNat();
  auto dbl = [](const Element& e) { return Element::nat(2 * e.natValue()); };
  auto idf = [](const Element& e) { return e; };
  auto sqr = [](const Element& e) {
    const Nat v = e.natValue();
    return Element::nat(v * v);
  };
  CHECK(isCoarseMap("double", dbl, m, m, budget).isTrue());
  CHECK(isCoarseMap("identity", idf, m, m, budget).isTrue());
  CHECK(isCoarseMap("square", sqr, m, m, budget).isFalse());
}

TEST_CASE("boundedness in the metric ballean and under blocks") {
  Budget budget;
  CHECK(isBounded(metricNat(), SetExpr::finiteNats(kNat, {1, 5, 9}), budget)
            .isTrue());
  CHECK(isBounded(metricNat(), SetExpr::arithmetic(kNat, 2, {0}), budget)
            .isFalse());
  const BornologyPresentation b = BornologyPresentation::finiteSubsets(kNat);
  const CoarsePresentation down = smallestCompatible(b);
  CHECK(isBounded(down, *b.baseMemberAt(5), budget).isTrue());
}

TEST_CASE("bounded sets of the metric ballean form the finite-subsets bornology") {
  Budget budget;
  const BornologyPresentation bs = boundedSets(metricNat());
  CHECK(bs.checkBornology(budget).pass);
  const SetExpr corpus[] = {SetExpr::finiteNats(kNat, {1, 2, 3}),
                            SetExpr::arithmetic(kNat, 2, {0}),
                            SetExpr::interval(kNat, 0, 90),
                            SetExpr::arithmetic(kNat, 7, {1, 3})};
  for (const auto& s : corpus) {
    const Verdict viaB = bs.member(s, budget);
    const Verdict viaBall = isBounded(metricNat(), s, budget);
    CHECK(viaB.value() == viaBall.value());
  }
}

TEST_CASE("composition is monotone in both arguments") {
  std::mt19937 rng(41);
  const GroundSet g5 = GroundSet::finitePoints(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto small1 = oracles::randomRelation(rng, 5, 0.2);
    const auto small2 = oracles::randomRelation(rng, 5, 0.2);
    auto embiggen = [&](const oracles::PairSet& p) {
      auto out = p;
      out.insert({rng() % 5, rng() % 5});
      return out;
    };
    const auto big1 = embiggen(small1);
    const auto big2 = embiggen(small2);
    auto toEnt = [&](const oracles::PairSet& p) {
      std::vector<std::pair<Element, Element>> pairs;
      for (const auto& [a, b] : p)
        if (a != b) pairs.emplace_back(Element::nat(a), Element::nat(b));
      return Entourage::finiteRel(g5, pairs);
    };
    const auto lhs = matrixOf(Entourage::compose(toEnt(small1), toEnt(small2)), 5);
    const auto rhs = matrixOf(Entourage::compose(toEnt(big1), toEnt(big2)), 5);
    for (std::size_t i = 0; i < lhs.size(); ++i)
      if (lhs[i]) CHECK(rhs[i]);
  }
}

TEST_CASE("associativity of composition against the join oracle") {
  std::mt19937 rng(43);
  const GroundSet g6 = GroundSet::finitePoints(6);
  for (int trial = 0; trial < 60; ++trial) {
    const Entourage a = randomFiniteRel(rng, g6, 6);
    const Entourage b = randomFiniteRel(rng, g6, 6);
    const Entourage c = randomFiniteRel(rng, g6, 6);
    CHECK(matrixOf(Entourage::compose(Entourage::compose(a, b), c), 6) ==
          matrixOf(Entourage::compose(a, Entourage::compose(b, c)), 6));
  }
}
