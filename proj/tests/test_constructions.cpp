#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballean/constructions.hpp"

using namespace ballean;

namespace {
const GroundSet kNat = GroundSet::naturals();
const Budget kBudget;

Element pt(Nat a, Nat b) {
  return Element::tuple({Element::nat(a), Element::nat(b)});
}
Element tooth(Nat alpha, Nat s) {
  return Element::tagged(GroundSet::kToothTag,
                         Element::tuple({Element::nat(alpha), Element::nat(s)}));
}
Element corePt(Nat x) {
  return Element::tagged(GroundSet::kCoreTag, Element::nat(x));
}

BornologyPresentation intervalChain() {
  return BornologyPresentation::chainBase(
      kNat, "intervals",
      [](Nat i) { return SetExpr::interval(GroundSet::naturals(), 0, i); }, true,
      true);
}
}  // namespace

TEST_CASE("product balls are rectangles of component balls") {
  const GroundSet plane = GroundSet::tupleSpace({kNat, kNat});
  const Entourage e = Entourage::productOf(
      plane, {Entourage::metric(kNat, 2), Entourage::metric(kNat, 3)});
  for (Nat a = 0; a <= 12; ++a)
    for (Nat b = 0; b <= 12; ++b) {
      const bool expect = (a >= 3 && a <= 7) && (b >= 2 && b <= 8);
      CHECK(e.relates(pt(5, 5), pt(a, b)) == expect);
    }
}

TEST_CASE("a one-factor product is the factor itself") {
  const CoarsePresentation p = productOf({metricNat()});
  for (Nat x = 0; x <= 64; ++x) {
    auto a = p.at(2).ballList(Element::nat(x), 32);
    auto b = metricNat().at(2).ballList(Element::nat(x), 32);
    REQUIRE(a.has_value());
    CHECK(*a == *b);
  }
}

TEST_CASE("bounded sets of a product agree with the product bornology") {
  Budget budget;
  budget.horizon = 512;
  const CoarsePresentation p = productOf({metricNat(), metricNat()});
  const BornologyPresentation viaProv = boundedSets(p);
  const GroundSet plane = p.ground();
  const SetExpr rects[] = {
      SetExpr::rectangle(plane, {SetExpr::interval(kNat, 0, 4),
                                 SetExpr::interval(kNat, 2, 9)}),
      SetExpr::rectangle(plane, {SetExpr::arithmetic(kNat, 2, {0}),
                                 SetExpr::interval(kNat, 0, 3)}),
      SetExpr::finite(plane, {pt(1, 1), pt(2, 7)})};
  for (const auto& s : rects) {
    const Verdict direct = isBounded(p, s, budget);
    const Verdict member = viaProv.member(s, budget);
    CHECK(direct.value() == member.value());
  }
}

TEST_CASE("the powerset-indexed product of a finite family is the plain product") {
  // Two factors; the index bornology is the full powerset of a 2-point set.
  const GroundSet g2 = GroundSet::finitePoints(2);
  const auto powerset =
      BornologyPresentation::explicitBase(g2, {SetExpr::full(g2)});
  const FamilySpec family = FamilySpec::explicitList(
      {Pointed{metricNat(), Element::nat(0)}, Pointed{metricNat(), Element::nat(0)}});
  const CoarsePresentation bp = bProduct(powerset, family, kBudget);
  const CoarsePresentation pr = productOf({metricNat(), metricNat()});
  REQUIRE(bp.ground().same(pr.ground()));
  for (Nat i : {1u, 3u}) {
    for (Nat r = 0; r < 40; ++r) {
      const Element x = bp.ground().decode(r);
      for (Nat q = 0; q < 40; ++q) {
        const Element y = bp.ground().decode(q);
        CHECK(bp.at(i).relates(x, y) == pr.at(i).relates(x, y));
      }
    }
  }

  // Three mixed factors over the powerset of a 3-point index set.
  const GroundSet g3 = GroundSet::finitePoints(3);
  const auto powerset3 =
      BornologyPresentation::explicitBase(g3, {SetExpr::full(g3)});
  const FamilySpec mixed = FamilySpec::explicitList(
      {Pointed{metricNat(), Element::nat(0)},
       Pointed{boundedFinite(2), Element::nat(0)},
       Pointed{metricNat(), Element::nat(0)}});
  const CoarsePresentation bp3 = bProduct(powerset3, mixed, kBudget);
  const CoarsePresentation pr3 =
      productOf({metricNat(), boundedFinite(2), metricNat()});
  REQUIRE(bp3.ground().same(pr3.ground()));
  for (Nat i : {1u, 2u}) {
    for (Nat r = 0; r < 48; ++r) {
      const Element x = bp3.ground().decode(r);
      for (Nat q = 0; q < 48; ++q) {
        const Element y = bp3.ground().decode(q);
        CHECK(bp3.at(i).relates(x, y) == pr3.at(i).relates(x, y));
      }
    }
  }
}

TEST_CASE("finite-support carriers enforce the support invariant") {
  const auto fs = BornologyPresentation::finiteSubsets(kNat);
  const FamilySpec family =
      FamilySpec::uniformOver(Pointed{metricNat(), Element::nat(0)});
  const CoarsePresentation bp = bProduct(fs, family, kBudget);
  REQUIRE(bp.ground().kind() == GroundSet::Kind::FiniteSupport);
  for (Nat i = 0; i < 300; ++i) CHECK(bp.ground().valid(bp.ground().decode(i)));
  // Entries equal to the basepoint are not valid support entries.
  CHECK_FALSE(bp.ground().valid(Element::support({{2, Element::nat(0)}})));

  // Coordinates outside the chosen member must be equal.
  const Element a = Element::support({{0, Element::nat(3)}});
  const Element b = Element::support({{5, Element::nat(3)}});
  // Base member at index 2 is {0, 1, 2}: coordinate 5 differs, so unrelated.
  CHECK_FALSE(bp.at(2).relates(a, b));
  // Moving only inside the member is fine.
  CHECK(bp.at(3).relates(a, Element::support({{0, Element::nat(1)}})));
}

TEST_CASE("macrocube carrier and balls") {
  const auto fs = BornologyPresentation::finiteSubsets(kNat);
  const CoarsePresentation mc = macrocube(fs, kBudget);
  REQUIRE(mc.ground().kind() == GroundSet::Kind::SubsetsOf);
  // The carrier of the countable macrocube enumerates all bit masks.
  for (Nat i = 0; i < 64; ++i) CHECK(mc.ground().decode(i) == Element::nat(i));

  // Supports {0,1} and {0,2} differ inside {0,1,2}.
  CHECK(mc.at(2).relates(Element::nat(0b011), Element::nat(0b101)));
  CHECK_FALSE(mc.at(1).relates(Element::nat(0b011), Element::nat(0b101)));

  // Powerset bornology: one entourage relates any two points.
  const auto all = BornologyPresentation::explicitBase(kNat, {SetExpr::full(kNat)});
  const CoarsePresentation bounded = macrocube(all, kBudget);
  Budget budget;
  budget.horizon = 256;
  CHECK(bounded.at(0).relates(Element::nat(5), Element::nat(999)));
  CHECK(isBounded(bounded, bounded.carrier(), budget).isTrue());
}

TEST_CASE("bouquet of two rays: wedge balls") {
  const GroundSet g2 = GroundSet::finitePoints(2);
  const auto idx = BornologyPresentation::finiteSubsets(g2);
  const CoarsePresentation w = bouquet(
      idx, FamilySpec::uniformOver(Pointed{metricNat(), Element::nat(0)}),
      kBudget);
  const Element e = corePt(0);
  REQUIRE(w.payload().pointedAt.has_value());
  CHECK(*w.payload().pointedAt == e);

  auto ball = w.at(2).ballList(e, 64);
  REQUIRE(ball.has_value());
  // e itself plus depth 1 and 2 on both spines (index member at 2 covers both).
  std::vector<Element> expected = {e, tooth(0, 1), tooth(0, 2), tooth(1, 1),
                                   tooth(1, 2)};
  std::sort(expected.begin(), expected.end());
  CHECK(*ball == expected);

  // Away from the wedge point a spine keeps its own balls.
  auto deep = w.at(2).ballList(tooth(0, 10), 64);
  REQUIRE(deep.has_value());
  std::vector<Element> expectedDeep = {tooth(0, 8), tooth(0, 9), tooth(0, 10),
                                       tooth(0, 11), tooth(0, 12)};
  CHECK(*deep == expectedDeep);

  // Distinct spines far from the wedge point are unrelated.
  CHECK_FALSE(w.at(2).relates(tooth(0, 5), tooth(1, 5)));
  CHECK(w.at(2).relates(tooth(0, 1), tooth(1, 2)));
}

TEST_CASE("comb balls: handle restriction and tooth adjacency") {
  const SetExpr attach =
      SetExpr::generator(kNat, "pow2", [](Nat k) { return Nat{1} << k; });
  const CoarsePresentation cb =
      comb(metricNat(), attach,
           FamilySpec::uniformOver(Pointed{metricNat(), Element::nat(0)}),
           kBudget);

  // The handle restriction keeps metric balls: centers far from teeth.
  for (Nat i : {1u, 3u}) {
    auto ball = cb.at(i).ballList(corePt(20), 128);
    REQUIRE(ball.has_value());
    std::vector<Element> handleOnly;
    for (const auto& el : *ball)
      if (el.tag() == GroundSet::kCoreTag) handleOnly.push_back(el);
    std::vector<Element> expected;
    for (Nat y = 20 - i; y <= 20 + i; ++y) expected.push_back(corePt(y));
    CHECK(handleOnly == expected);
  }

  // Tooth point to handle point: the attach index must be close and the
  // spine depth small.
  CHECK(cb.at(4).relates(tooth(4, 2), corePt(6)));
  CHECK_FALSE(cb.at(1).relates(tooth(4, 2), corePt(6)));
  // A bounded handle set meets finitely many teeth.
  Budget budget;
  budget.horizon = 512;
  const auto induced = *cb.payload().bornology;
  CHECK(induced.member(SetExpr::finiteNats(kNat, {1, 2, 4}), budget).isTrue());
  CHECK(induced.member(attach, budget).isFalse());

  // Restricting the comb to its handle recovers the handle's own balls.
  const SetExpr handleCopy = SetExpr::procedural(
      cb.ground(), "(handle-only)",
      [](const Element& e) { return e.tag() == GroundSet::kCoreTag; });
  const CoarsePresentation onHandle = restrictPresentation(cb, handleCopy);
  for (Nat i : {1u, 2u, 5u}) {
    for (Nat x = 0; x <= 60; x += 7) {
      auto restricted = onHandle.at(i).ballList(corePt(x), 256);
      auto ambient = metricNat().at(i).ballList(Element::nat(x), 256);
      REQUIRE(restricted.has_value());
      std::vector<Element> expected;
      for (const auto& el : *ambient) expected.push_back(corePt(el.natValue()));
      CHECK(*restricted == expected);
    }
  }
}

TEST_CASE("the comb is the restriction of handle times bouquet") {
  // Two teeth at 2 and 5 with ray spines.
  const SetExpr attach = SetExpr::finiteNats(kNat, {2, 5});
  const FamilySpec rays =
      FamilySpec::uniformOver(Pointed{metricNat(), Element::nat(0)});
  const CoarsePresentation cb = comb(metricNat(), attach, rays, kBudget);

  const auto induced = BornologyPresentation::restrictedTo(
      boundedSets(metricNat()), attach);
  const CoarsePresentation wedge = bouquet(induced, rays, kBudget);
  const CoarsePresentation prod = productOf({metricNat(), wedge});

  // Carrier embedding into the product.
  auto embed = [&](const Element& e) -> Element {
    if (e.tag() == GroundSet::kCoreTag)
      return Element::tuple({e.payload(), corePt(0)});
    const Element& alpha = e.payload().items()[0];
    return Element::tuple({alpha, e});
  };
  const auto pts = cb.carrierElements(80);
  for (Nat i : {1u, 2u, 4u}) {
    for (const auto& x : pts)
      for (const auto& y : pts)
        CHECK(cb.at(i).relates(x, y) == prod.at(i).relates(embed(x), embed(y)));
  }
}

TEST_CASE("blocks over a chain with infinite members certify inclusions exactly") {
  Budget budget;
  const auto evensBlocks = BornologyPresentation::chainBase(
      kNat, "evens-blocks",
      [](Nat i) {
        const GroundSet g = GroundSet::naturals();
        return SetExpr::unionOf(SetExpr::arithmetic(g, 2, {0}),
                                SetExpr::interval(g, 0, i));
      },
      false, true);
  const CoarsePresentation down = smallestCompatible(evensBlocks);
  const SetExpr evens = SetExpr::arithmetic(kNat, 2, {0});
  // The evens sit inside every block, so they are bounded here.
  CHECK(isBounded(down, evens, budget).isTrue());
  CHECK(evensBlocks.member(evens, budget).isTrue());
  // The odds escape every chain member.
  const SetExpr odds = SetExpr::arithmetic(kNat, 2, {1});
  CHECK_FALSE(evensBlocks.member(odds, budget).isTrue());
}

TEST_CASE("smallest compatible structure: block balls and compatibility") {
  const auto chain = intervalChain();
  const CoarsePresentation down = smallestCompatible(chain);
  auto inside = down.at(5).ballList(Element::nat(3), 64);
  REQUIRE(inside.has_value());
  std::vector<Element> expected;
  for (Nat v = 0; v <= 5; ++v) expected.push_back(Element::nat(v));
  CHECK(*inside == expected);
  auto outside = down.at(5).ballList(Element::nat(9), 64);
  REQUIRE(outside.has_value());
  CHECK(*outside == std::vector<Element>{Element::nat(9)});

  // boundedSets returns the inducing bornology.
  Budget budget;
  const BornologyPresentation back = boundedSets(down);
  const SetExpr corpus[] = {SetExpr::finiteNats(kNat, {0, 3}),
                            SetExpr::arithmetic(kNat, 2, {0}),
                            SetExpr::interval(kNat, 10, 30)};
  for (const auto& s : corpus)
    CHECK(back.member(s, budget).value() == chain.member(s, budget).value());
}

TEST_CASE("membership in the largest compatible structure") {
  Budget budget;
  const auto fs = BornologyPresentation::finiteSubsets(kNat);
  CHECK(largestMembership(fs, Entourage::metric(kNat, 1), budget).isTrue());

  // A block over an infinite set blows up the image of a finite member.
  const SetExpr evensAndZero = SetExpr::unionOf(
      SetExpr::arithmetic(kNat, 2, {0}), SetExpr::finiteNats(kNat, {0}));
  const Verdict big =
      largestMembership(fs, Entourage::block(evensAndZero), budget);
  CHECK(big.isFalse());

  // Asymmetric presentations are rejected with a witness.
  const Verdict asym = largestMembership(
      fs, Entourage::finiteRel(kNat, {{Element::nat(0), Element::nat(1)}}),
      budget);
  CHECK(asym.isFalse());
  CHECK(asym.note().find("symmetric") != std::string::npos);
}

TEST_CASE("every block entourage of the smallest structure joins the largest") {
  Budget budget;
  for (const auto& b : {BornologyPresentation::finiteSubsets(kNat),
                        intervalChain()}) {
    const CoarsePresentation down = smallestCompatible(b);
    for (Nat i = 0; i < 8; ++i)
      CHECK(largestMembership(b, down.at(i), budget).isTrue());
  }
}

TEST_CASE("bounded sets of the largest structure are the inducing bornology") {
  Budget budget;
  const auto fs = BornologyPresentation::finiteSubsets(kNat);
  const CoarsePresentation up = largestCompatible(fs, {});
  const BornologyPresentation back = boundedSets(up);
  const SetExpr corpus[] = {SetExpr::finiteNats(kNat, {2, 5, 11}),
                            SetExpr::arithmetic(kNat, 3, {1}),
                            SetExpr::interval(kNat, 0, 40)};
  for (const auto& s : corpus)
    CHECK(back.member(s, budget).value() == fs.member(s, budget).value());
}

TEST_CASE("restriction then boundedness agrees with ambient boundedness on the subset") {
  Budget budget;
  budget.horizon = 512;
  const SetExpr evens = SetExpr::arithmetic(kNat, 2, {0});
  const CoarsePresentation sub = restrictPresentation(metricNat(), evens);
  const SetExpr tests[] = {
      SetExpr::finiteNats(kNat, {0, 2, 8}),
      SetExpr::intersectionOf(evens, SetExpr::interval(kNat, 0, 64)),
      SetExpr::arithmetic(kNat, 4, {0})};
  for (const auto& s : tests) {
    const SetExpr inside = SetExpr::intersectionOf(s, evens);
    const Verdict restricted = isBounded(sub, inside, budget);
    const Verdict ambient = isBounded(metricNat(), inside, budget);
    CHECK(restricted.value() == ambient.value());
  }
}

TEST_CASE("finite grounds reject out-of-range decoding") {
  const GroundSet g = GroundSet::finitePoints(3);
  CHECK(g.decode(2) == Element::nat(2));
  CHECK_THROWS_AS(g.decode(3), EncodingError);
}

TEST_CASE("derived bounded-set bornologies satisfy the axioms") {
  Budget budget;
  budget.horizon = 512;
  const CoarsePresentation corpus[] = {
      metricNat(), productOf({metricNat(), metricNat()}),
      smallestCompatible(intervalChain()),
      comb(metricNat(),
           SetExpr::generator(kNat, "pow2", [](Nat k) { return Nat{1} << k; }),
           FamilySpec::uniformOver(Pointed{metricNat(), Element::nat(0)}),
           budget)};
  for (const auto& pres : corpus)
    CHECK(boundedSets(pres).checkBornology(budget).pass);
}
