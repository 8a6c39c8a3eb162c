#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ballean/sets.hpp"
#include "support/oracles.hpp"

using namespace ballean;

namespace {
const GroundSet kNat = GroundSet::naturals();

SetExpr evens() { return SetExpr::arithmetic(kNat, 2, {0}); }
SetExpr odds() { return SetExpr::arithmetic(kNat, 2, {1}); }
SetExpr pow2() {
  return SetExpr::generator(kNat, "pow2", [](Nat k) { return Nat{1} << k; });
}
}  // namespace

TEST_CASE("membership on the exact tier") {
  CHECK(evens().containsNat(4));
  CHECK_FALSE(evens().containsNat(5));
  CHECK(pow2().containsNat(8));
  CHECK_FALSE(pow2().containsNat(6));
}

TEST_CASE("membership of an intersection agrees with a brute enumeration") {
  const SetExpr ap31 = SetExpr::arithmetic(kNat, 3, {1});
  const SetExpr meet = SetExpr::intersectionOf(ap31, evens());
  // Oracle: enumerate both sets to 100 and intersect pointwise.
  std::set<Nat> brute;
  for (Nat x = 0; x <= 100; ++x)
    if (x % 3 == 1 && x % 2 == 0) brute.insert(x);
  CHECK(brute.count(4) == 1);
  for (Nat x = 0; x <= 100; ++x) CHECK(meet.containsNat(x) == (brute.count(x) == 1));
}

TEST_CASE("boolean combinations normalize inside the exact tier") {
  const SetExpr all = SetExpr::unionOf(evens(), odds());
  CHECK(all.equalsCanonical(SetExpr::full(kNat)));

  const SetExpr nothing = SetExpr::intersectionOf(evens(), odds());
  CHECK(nothing.kind() == SetExpr::Kind::Finite);
  CHECK(nothing.isEmptyFinite());

  const SetExpr diff = SetExpr::differenceOf(
      SetExpr::finiteNats(kNat, {1, 2, 3}), SetExpr::finiteNats(kNat, {2}));
  CHECK(diff.equalsCanonical(SetExpr::finiteNats(kNat, {1, 3})));
}

TEST_CASE("intersection of congruence classes matches the residue oracle") {
  // CRT-style oracle: solutions of x = 1 (mod 3), x = 0 (mod 2) are
  // x = 4 (mod 6).
  const SetExpr meet =
      SetExpr::intersectionOf(SetExpr::arithmetic(kNat, 3, {1}), evens());
  CHECK(meet.kind() == SetExpr::Kind::EvPeriodic);
  CHECK(meet.evPeriod() == 6);
  CHECK(meet.evResidues() == std::vector<Nat>{4});
}

TEST_CASE("finiteness decisions") {
  Budget budget;
  CHECK(evens().finiteness(budget).isFalse());
  CHECK(SetExpr::finiteNats(kNat, {1, 2, 3}).finiteness(budget).isTrue());
  CHECK(SetExpr::intersectionOf(evens(), odds()).finiteness(budget).isTrue());
  CHECK(pow2().finiteness(budget).isFalse());
}

TEST_CASE("enumerate returns exactly the members below the horizon") {
  auto nats = [](const std::vector<Element>& es) {
    std::vector<Nat> out;
    for (const auto& e : es) out.push_back(e.natValue());
    return out;
  };
  CHECK(nats(evens().membersUpTo(7)) == std::vector<Nat>{0, 2, 4, 6});
  CHECK(nats(pow2().membersUpTo(10)) == std::vector<Nat>{1, 2, 4, 8});
  CHECK(nats(SetExpr::complementOf(evens()).membersUpTo(5)) ==
        std::vector<Nat>{1, 3, 5});
}

TEST_CASE("exact-tier combine agrees with pointwise logic up to 1000") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<Nat> period(1, 12);
  std::uniform_int_distribution<Nat> small(0, 40);
  for (int trial = 0; trial < 40; ++trial) {
    const Nat p = period(rng);
    std::vector<Nat> rs;
    for (Nat r = 0; r < p; ++r)
      if (rng() % 3 == 0) rs.push_back(r);
    SetExpr s = rs.empty() ? SetExpr::finiteNats(kNat, {small(rng), small(rng)})
                           : SetExpr::arithmetic(kNat, p, rs);
    const Nat q = period(rng);
    std::vector<Nat> qs;
    for (Nat r = 0; r < q; ++r)
      if (rng() % 2 == 0) qs.push_back(r);
    SetExpr t = qs.empty() ? SetExpr::finiteNats(kNat, {small(rng)})
                           : SetExpr::arithmetic(kNat, q, qs);

    const SetExpr u = SetExpr::unionOf(s, t);
    const SetExpr i = SetExpr::intersectionOf(s, t);
    const SetExpr d = SetExpr::differenceOf(s, t);
    CHECK(u.isExact());
    CHECK(i.isExact());
    CHECK(d.isExact());
    for (Nat x = 0; x <= 1000; ++x) {
      const bool a = s.containsNat(x), b = t.containsNat(x);
      REQUIRE(u.containsNat(x) == (a || b));
      REQUIRE(i.containsNat(x) == (a && b));
      REQUIRE(d.containsNat(x) == (a && !b));
    }
  }
}

TEST_CASE("finiteness never returns unknown on the exact tier") {
  Budget budget;
  std::mt19937 rng(11);
  std::uniform_int_distribution<Nat> period(1, 9);
  for (int trial = 0; trial < 60; ++trial) {
    const Nat p = period(rng);
    std::vector<Nat> rs;
    for (Nat r = 0; r < p; ++r)
      if (rng() % 2 == 0) rs.push_back(r);
    SetExpr s = SetExpr::evPeriodic(kNat, {Nat(rng() % 5)}, p, rs, 5);
    SetExpr t = SetExpr::arithmetic(kNat, period(rng), {0});
    SetExpr combo = (trial % 2) ? SetExpr::unionOf(s, t)
                                : SetExpr::intersectionOf(s, t);
    CHECK_FALSE(combo.finiteness(budget).isUnknown());
    CHECK_FALSE(SetExpr::complementOf(combo).finiteness(budget).isUnknown());
  }
}

TEST_CASE("enumeration is consistent with membership for mixed sets") {
  std::mt19937 rng(13);
  const SetExpr base[] = {
      evens(), odds(), pow2(),
      SetExpr::generator(kNat, "squares", [](Nat k) { return k * k; }),
      SetExpr::finiteNats(kNat, {3, 7, 30})};
  for (int trial = 0; trial < 30; ++trial) {
    SetExpr s = base[rng() % 5];
    SetExpr t = base[rng() % 5];
    SetExpr combo;
    switch (rng() % 3) {
      case 0: combo = SetExpr::unionOf(s, t); break;
      case 1: combo = SetExpr::intersectionOf(s, t); break;
      default: combo = SetExpr::differenceOf(s, t); break;
    }
    const auto members = combo.membersUpTo(512);
    const auto brute = oracles::scanMembers(combo, 512);
    std::vector<Nat> got;
    for (const auto& e : members) got.push_back(e.natValue());
    REQUIRE(got == brute);
  }
}

TEST_CASE("eventually periodic normalization is canonical and idempotent") {
  // Period 4 with residues {0, 2} folds to period 2.
  const SetExpr folded = SetExpr::evPeriodic(kNat, {}, 4, {0, 2}, 0);
  CHECK(folded.evPeriod() == 2);
  CHECK(folded.equalsCanonical(evens()));

  // Threshold absorbs a consistent prelude.
  const SetExpr absorbed = SetExpr::evPeriodic(kNat, {0, 2, 4}, 2, {0}, 6);
  CHECK(absorbed.evThreshold() == 0);
  CHECK(absorbed.equalsCanonical(evens()));

  // Rebuilding from the canonical pieces is the identity.
  const SetExpr again =
      SetExpr::evPeriodic(kNat, absorbed.evPrelude(), absorbed.evPeriod(),
                          absorbed.evResidues(), absorbed.evThreshold());
  CHECK(again.render() == absorbed.render());
}

TEST_CASE("structured grounds round-trip their enumeration") {
  const GroundSet plane = GroundSet::tupleSpace({kNat, kNat});
  std::set<std::string> seen;
  for (Nat i = 0; i < 200; ++i) {
    const Element e = plane.decode(i);
    CHECK(plane.valid(e));
    CHECK(seen.insert(e.render()).second);
  }

  const GroundSet disjoint = GroundSet::taggedUnion(
      {{0, GroundSet::finitePoints(3)}, {1, kNat}});
  seen.clear();
  for (Nat i = 0; i < 100; ++i) {
    const Element e = disjoint.decode(i);
    CHECK(disjoint.valid(e));
    CHECK(seen.insert(e.render()).second);
  }

  // Rectangles evaluate componentwise.
  const SetExpr rect = SetExpr::rectangle(
      plane, {evens(), SetExpr::finiteNats(kNat, {0, 1, 2})});
  CHECK(rect.contains(Element::tuple({Element::nat(4), Element::nat(1)})));
  CHECK_FALSE(rect.contains(Element::tuple({Element::nat(3), Element::nat(1)})));
  CHECK_FALSE(rect.contains(Element::tuple({Element::nat(4), Element::nat(9)})));
}

TEST_CASE("malformed elements are rejected at construction") {
  CHECK_THROWS_AS(SetExpr::finite(GroundSet::finitePoints(2),
                                  {Element::nat(5)}),
                  EncodingError);
  CHECK_THROWS_AS(
      SetExpr::finite(kNat, {Element::tuple({Element::nat(1)})}),
      EncodingError);
}

TEST_CASE("malformed element encodings surface as encoding errors") {
  CHECK_THROWS_AS(evens().contains(Element::tuple({Element::nat(1)})),
                  EncodingError);
  const GroundSet plane = GroundSet::tupleSpace({kNat, kNat});
  CHECK_THROWS_AS(
      SetExpr::rectangle(plane, {evens(), odds()}).contains(Element::nat(3)),
      EncodingError);
}

TEST_CASE("set operations across grounds are rejected") {
  const SetExpr overNat = evens();
  const SetExpr overF5 = SetExpr::finiteNats(GroundSet::finitePoints(5), {1});
  CHECK_THROWS_AS(SetExpr::unionOf(overNat, overF5), GroundMismatchError);
  CHECK_THROWS_AS(SetExpr::intersectionOf(overNat, overF5),
                  GroundMismatchError);
}
