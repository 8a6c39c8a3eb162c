#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballean/analysis.hpp"

using namespace ballean;

namespace {
const GroundSet kNat = GroundSet::naturals();
const Budget kBudget;

SetExpr evens() { return SetExpr::arithmetic(kNat, 2, {0}); }
SetExpr odds() { return SetExpr::arithmetic(kNat, 2, {1}); }
SetExpr pow4() {
  return SetExpr::generator(kNat, "pow4", [](Nat k) { return Nat{1} << (2 * k); });
}
SetExpr twoPow4() {
  return SetExpr::generator(kNat, "two-pow4",
                            [](Nat k) { return Nat{2} << (2 * k); });
}

BornologyPresentation intervalChain() {
  return BornologyPresentation::chainBase(
      kNat, "intervals",
      [](Nat i) { return SetExpr::interval(GroundSet::naturals(), 0, i); }, true,
      true);
}

CoarsePresentation wedgeOfTwoRays() {
  const GroundSet g2 = GroundSet::finitePoints(2);
  return bouquet(BornologyPresentation::finiteSubsets(g2),
                 FamilySpec::uniformOver(Pointed{metricNat(), Element::nat(0)}),
                 kBudget);
}

Element tooth(Nat alpha, Nat s) {
  return Element::tagged(GroundSet::kToothTag,
                         Element::tuple({Element::nat(alpha), Element::nat(s)}));
}

SetExpr toothSet(const CoarsePresentation& glued, Nat alpha, SetExpr spineSet) {
  const GroundSet g = glued.ground();
  return SetExpr::procedural(
      g, "(tooth-set " + std::to_string(alpha) + ")",
      [alpha, spineSet](const Element& e) {
        return e.isTagged() && e.tag() == GroundSet::kToothTag &&
               e.payload().items()[0] == Element::nat(alpha) &&
               spineSet.contains(e.payload().items()[1]);
      });
}
}  // namespace

TEST_CASE("asymptotic disjointness on the metric ballean") {
  const CoarsePresentation m = metricNat();
  CHECK(asymptoticallyDisjoint(m, pow4(), twoPow4(), kBudget).isTrue());
  const Verdict v = asymptoticallyDisjoint(m, evens(), odds(), kBudget);
  CHECK(v.isFalse());
  // A bounded side always certifies.
  CHECK(asymptoticallyDisjoint(m, evens(), SetExpr::finiteNats(kNat, {1, 3}),
                               kBudget)
            .isTrue());
}

TEST_CASE("asymptotic disjointness is symmetric and monotone under shrinking") {
  const CoarsePresentation m = metricNat();
  const Verdict ab = asymptoticallyDisjoint(m, pow4(), twoPow4(), kBudget);
  const Verdict ba = asymptoticallyDisjoint(m, twoPow4(), pow4(), kBudget);
  CHECK(ab.value() == ba.value());

  // Shrinking a side of a certified pair keeps the certificate.
  const SetExpr shrunk = SetExpr::intersectionOf(
      pow4(), SetExpr::complementOf(SetExpr::finiteNats(kNat, {1, 4})));
  CHECK_FALSE(asymptoticallyDisjoint(m, shrunk, twoPow4(), kBudget).isFalse());
}

TEST_CASE("asymptotic neighbourhoods") {
  const CoarsePresentation m = metricNat();
  CHECK(isAsymptoticNeighborhood(m, pow4(), SetExpr::full(kNat), kBudget)
            .isTrue());
  CHECK(isAsymptoticNeighborhood(m, evens(), evens(), kBudget).isFalse());

  const CoarsePresentation down =
      smallestCompatible(BornologyPresentation::finiteSubsets(kNat));
  CHECK(isAsymptoticNeighborhood(down, evens(), evens(), kBudget).isTrue());
}

TEST_CASE("asymptotic separation with voronoi and identity witnesses") {
  const CoarsePresentation m = metricNat();
  auto res = asymptoticallySeparated(m, pow4(), twoPow4(), kBudget);
  CHECK(res.verdict.isTrue());
  REQUIRE(res.u.has_value());
  for (Nat v : pow4().natMembersUpTo(kBudget.horizon)) CHECK(res.u->containsNat(v));

  CHECK(asymptoticallySeparated(m, evens(), odds(), kBudget).verdict.isFalse());

  const CoarsePresentation down =
      smallestCompatible(BornologyPresentation::finiteSubsets(kNat));
  auto blockRes = asymptoticallySeparated(down, evens(), odds(), kBudget);
  CHECK(blockRes.verdict.isTrue());
}

TEST_CASE("slow oscillation verdicts") {
  const CoarsePresentation m = metricNat();
  const SlowFunction constant{"half", "user",
                              [](const Element&) { return Rational(1, 2); }};
  CHECK(isSlowlyOscillating(m, constant, Rational(1, 4), kBudget).isTrue());

  const auto parity = namedSlowFunction("parity", kBudget);
  REQUIRE(parity.has_value());
  CHECK(isSlowlyOscillating(m, *parity, Rational(1, 2), kBudget).isFalse());

  const auto logCap = namedSlowFunction("log-cap", kBudget);
  REQUIRE(logCap.has_value());
  CHECK(isSlowlyOscillating(m, *logCap, Rational(1, 4), kBudget).isTrue());
}

TEST_CASE("separator synthesis on the metric ballean") {
  const CoarsePresentation m = metricNat();
  const SlowFunction f = synthesizeSeparator(m, pow4(), twoPow4(), kBudget);
  for (Nat v : pow4().natMembersUpTo(kBudget.horizon))
    CHECK(f.eval(Element::nat(v)) == Rational(0));
  for (Nat v : twoPow4().natMembersUpTo(kBudget.horizon))
    CHECK(f.eval(Element::nat(v)) == Rational(1));
  for (const auto& eps : {Rational(1, 2), Rational(1, 4), Rational(1, 8)})
    CHECK(isSlowlyOscillating(m, f, eps, kBudget).isTrue());

  CHECK_THROWS_AS(synthesizeSeparator(m, evens(), odds(), kBudget),
                  PreconditionError);
}

TEST_CASE("separator synthesis on the discrete structure is an indicator") {
  const CoarsePresentation down =
      smallestCompatible(BornologyPresentation::finiteSubsets(kNat));
  const SlowFunction f = synthesizeSeparator(down, evens(), odds(), kBudget);
  CHECK(f.eval(Element::nat(4)) == Rational(0));
  CHECK(f.eval(Element::nat(7)) == Rational(1));
  CHECK(isSlowlyOscillating(down, f, Rational(1, 2), kBudget).isTrue());
}

TEST_CASE("glued separator on the wedge of two rays") {
  const CoarsePresentation w = wedgeOfTwoRays();
  const SetExpr y = toothSet(w, 0, pow4());
  const SetExpr z = toothSet(w, 1, pow4());
  CHECK(asymptoticallyDisjoint(w, y, z, kBudget).isTrue());
  const SlowFunction f = synthesizeSeparator(w, y, z, kBudget);
  CHECK(f.eval(Element::tagged(GroundSet::kCoreTag, Element::nat(0))) ==
        Rational(1, 2));
  CHECK(f.eval(tooth(0, 16)) == Rational(0));
  CHECK(f.eval(tooth(1, 16)) == Rational(1));
  for (const auto& eps : {Rational(1, 2), Rational(1, 4), Rational(1, 8)})
    CHECK(isSlowlyOscillating(w, f, eps, kBudget).isTrue());
}

TEST_CASE("discreteness verdicts") {
  CHECK(isDiscrete(smallestCompatible(BornologyPresentation::finiteSubsets(kNat)),
                   kBudget)
            .isTrue());
  CHECK(isDiscrete(metricNat(), kBudget).isFalse());

  const Entourage doubling = Entourage::pairFn(
      kNat, "double", [](Nat v) { return 2 * v; },
      [](Nat v) -> std::optional<Nat> {
        if (v % 2 == 0 && v > 0) return v / 2;
        return std::nullopt;
      });
  const CoarsePresentation up =
      largestCompatible(BornologyPresentation::finiteSubsets(kNat), {doubling});
  CHECK(isDiscrete(up, kBudget).isFalse());

  const auto bounded =
      BornologyPresentation::explicitBase(kNat, {SetExpr::full(kNat)});
  CHECK_THROWS_AS(isDiscrete(smallestCompatible(bounded), kBudget), DomainError);
}

TEST_CASE("antidiscreteness verdicts") {
  const Entourage doubling = Entourage::pairFn(
      kNat, "double", [](Nat v) { return 2 * v; },
      [](Nat v) -> std::optional<Nat> {
        if (v % 2 == 0 && v > 0) return v / 2;
        return std::nullopt;
      });
  const auto fs = BornologyPresentation::finiteSubsets(kNat);
  CHECK(isAntidiscrete(largestCompatible(fs, {doubling}), {}, kBudget).isTrue());
  CHECK(isAntidiscrete(metricNat(), {doubling}, kBudget).isFalse());
  CHECK(isAntidiscrete(smallestCompatible(fs), {doubling}, kBudget).isFalse());
  CHECK(isAntidiscrete(metricNat(), {}, kBudget).isUnknown());
}

TEST_CASE("ultranormality search") {
  const std::vector<SetExpr> catalog = {evens(), odds(), pow4(), twoPow4()};
  const Verdict m = ultranormalSearch(metricNat(), catalog, kBudget);
  CHECK(m.isFalse());
  CHECK(m.witness().find("pow4") != std::string::npos);

  const CoarsePresentation down =
      smallestCompatible(BornologyPresentation::finiteSubsets(kNat));
  CHECK(ultranormalSearch(down, {evens(), odds()}, kBudget).isFalse());

  CHECK(ultranormalSearch(metricNat(),
                          {SetExpr::finiteNats(kNat, {1}),
                           SetExpr::finiteNats(kNat, {2, 3})},
                          kBudget)
            .isUnknown());
}

TEST_CASE("inference: metric ballean") {
  const PropertyReport rep =
      inferProperties(BalleanExpr::metricNatExpr(), kBudget);
  CHECK(rep.find(Property::Metrizable)->verdict.isTrue());
  CHECK(rep.find(Property::Normal)->verdict.isTrue());
  CHECK(rep.find(Property::Discrete)->verdict.isFalse());
  CHECK(rep.find(Property::Ultranormal)->verdict.isFalse());
}

TEST_CASE("inference: countable supported product of rays is metrizable") {
  BalleanExpr::ExprFamily rays;
  rays.kind = BalleanExpr::ExprFamily::Kind::Uniform;
  rays.uniform =
      std::make_shared<const BalleanExpr>(BalleanExpr::metricNatExpr());
  rays.uniformBase = Element::nat(0);
  const BalleanExpr bp = BalleanExpr::bProductExpr(
      BornologyPresentation::finiteSubsets(kNat), rays);
  const PropertyReport rep = inferProperties(bp, kBudget);
  const auto* m = rep.find(Property::Metrizable);
  REQUIRE(m != nullptr);
  CHECK(m->verdict.isTrue());
  CHECK(m->why.find("Thm 5") != std::string::npos);
  CHECK(rep.find(Property::Normal)->verdict.isTrue());
}

TEST_CASE("inference: invariant mismatch rules out normal products") {
  const SymCard kappa = SymCard::atLeastAleph1("kappa");
  const auto abs = BornologyPresentation::abstractDecl(kNat, "kappa", kappa,
                                                       kappa, kappa, true);
  const BalleanExpr prod = BalleanExpr::product(
      {BalleanExpr::metricNatExpr(), BalleanExpr::abstractBallean(abs)});
  const PropertyReport rep = inferProperties(prod, kBudget);
  const auto* n = rep.find(Property::Normal);
  REQUIRE(n != nullptr);
  CHECK(n->verdict.isFalse());
  CHECK(n->why.find("Thm 3") != std::string::npos);
  CHECK(rep.find(Property::Metrizable)->verdict.isFalse());
}

TEST_CASE("inference: combs over a metric handle") {
  BalleanExpr::ExprFamily rays;
  rays.kind = BalleanExpr::ExprFamily::Kind::Uniform;
  rays.uniform =
      std::make_shared<const BalleanExpr>(BalleanExpr::metricNatExpr());
  rays.uniformBase = Element::nat(0);
  const BalleanExpr cb =
      BalleanExpr::combExpr(BalleanExpr::metricNatExpr(), pow4(), rays);
  const PropertyReport rep = inferProperties(cb, kBudget);
  CHECK(rep.find(Property::Metrizable)->verdict.isTrue());
  CHECK(rep.find(Property::Metrizable)->why.find("Thm 10") != std::string::npos);
  CHECK(rep.find(Property::Normal)->verdict.isTrue());
}

TEST_CASE("inference: the largest structure over a skewed product bornology") {
  const SymCard kappa = SymCard::atLeastAleph1("kappa");
  const auto abs = BornologyPresentation::abstractDecl(kNat, "kappa", kappa,
                                                       kappa, kappa, true);
  const auto prod =
      productBornology(abs, BornologyPresentation::finiteSubsets(kNat));
  const BalleanExpr up = BalleanExpr::up(prod, {});
  const PropertyReport rep = inferProperties(up, kBudget);
  const auto* n = rep.find(Property::Normal);
  REQUIRE(n != nullptr);
  CHECK(n->verdict.isFalse());
  CHECK(n->why.find("cov") != std::string::npos);
  CHECK(rep.find(Property::Antidiscrete)->verdict.isTrue());
}

TEST_CASE("inference: macrocube metrizability follows the base count") {
  const PropertyReport countable = inferProperties(
      BalleanExpr::macrocubeExpr(BornologyPresentation::finiteSubsets(kNat)),
      kBudget);
  CHECK(countable.find(Property::Metrizable)->verdict.isTrue());
  CHECK(countable.find(Property::Metrizable)->why.find("Thm 6") !=
        std::string::npos);

  const SymCard kappa = SymCard::atLeastAleph1("kappa");
  const auto wide = BornologyPresentation::abstractDecl(
      kNat, "kappa", SymCard::aleph0(), SymCard::aleph0(), kappa, true);
  const PropertyReport uncountable =
      inferProperties(BalleanExpr::macrocubeExpr(wide), kBudget);
  CHECK(uncountable.find(Property::Metrizable)->verdict.isFalse());
  // Normality of macrocubes beyond the metrizable case stays open.
  const auto* n = uncountable.find(Property::Normal);
  CHECK((n == nullptr || n->verdict.isUnknown()));
}

TEST_CASE("rule collisions abort with an inconsistency report") {
  PropertyReport rep;
  rep.assign(Property::Normal, Verdict::yes(""), "rule A");
  CHECK_THROWS_AS(
      rep.assign(Property::Normal, Verdict::no("w", ""), "witness B"),
      InconsistencyError);
}

TEST_CASE("report rendering is one stable line per property") {
  const PropertyReport rep =
      inferProperties(BalleanExpr::metricNatExpr(), kBudget);
  const std::string text = rep.render("m");
  CHECK(text.find("m: bounded: FALSE") != std::string::npos);
  CHECK(text.find("m: metrizable: TRUE") != std::string::npos);
  CHECK(text.find("m: normal: TRUE") != std::string::npos);
}
