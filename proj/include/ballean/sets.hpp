#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ballean/common.hpp"
#include "ballean/verdict.hpp"

namespace ballean {

class SetExpr;

/// A point of a ground set. Naturals cover ℕ and finite grounds; tuples,
/// tagged values and finitely-supported maps cover the structured carriers
/// built by the construction module.
class Element {
 public:
  struct TupleV {
    std::vector<Element> items;
  };
  struct TaggedV {
    Nat tag;
    std::vector<Element> payload;  // exactly one entry
  };
  struct SupportV {
    std::vector<std::pair<Nat, Element>> entries;  // strictly increasing keys
  };

  Element() : v_(Nat{0}) {}

  static Element nat(Nat n) { return Element(V(n)); }
  static Element tuple(std::vector<Element> items) {
    return Element(V(TupleV{std::move(items)}));
  }
  static Element tagged(Nat tag, Element payload) {
    return Element(V(TaggedV{tag, {std::move(payload)}}));
  }
  static Element support(std::vector<std::pair<Nat, Element>> entries) {
    return Element(V(SupportV{std::move(entries)}));
  }

  bool isNat() const { return std::holds_alternative<Nat>(v_); }
  bool isTuple() const { return std::holds_alternative<TupleV>(v_); }
  bool isTagged() const { return std::holds_alternative<TaggedV>(v_); }
  bool isSupport() const { return std::holds_alternative<SupportV>(v_); }

  Nat natValue() const;
  const std::vector<Element>& items() const { return std::get<TupleV>(v_).items; }
  Nat tag() const { return std::get<TaggedV>(v_).tag; }
  const Element& payload() const { return std::get<TaggedV>(v_).payload.front(); }
  const std::vector<std::pair<Nat, Element>>& entries() const {
    return std::get<SupportV>(v_).entries;
  }

  friend bool operator==(const Element& a, const Element& b) {
    return cmp(a, b) == 0;
  }
  friend bool operator!=(const Element& a, const Element& b) {
    return cmp(a, b) != 0;
  }
  friend bool operator<(const Element& a, const Element& b) {
    return cmp(a, b) < 0;
  }

  static int cmp(const Element& a, const Element& b);

  std::string render() const;

 private:
  using V = std::variant<Nat, TupleV, TaggedV, SupportV>;
  explicit Element(V v) : v_(std::move(v)) {}
  V v_;
};

/// Carrier of a ballean. Immutable; enumeration is cached per node so the
/// canonical order decode(0), decode(1), ... is stable within a process.
class GroundSet {
 public:
  enum class Kind {
    Naturals,
    FinitePoints,
    TupleSpace,
    TaggedUnion,
    SubsetsOf,      // finite subsets of a universe, encoded as bit masks
    FiniteSupport,  // finitely supported maps index -> factor
    Glued           // core + teeth (attach index, spine point != basepoint)
  };

  GroundSet();  // Naturals

  static GroundSet naturals();
  static GroundSet finitePoints(Nat n);
  static GroundSet tupleSpace(std::vector<GroundSet> components);
  static GroundSet taggedUnion(std::vector<std::pair<Nat, GroundSet>> parts);
  static GroundSet subsetsOf(SetExpr universe);
  static GroundSet finiteSupport(SetExpr indexSet, GroundSet factor,
                                 Element basepoint);
  static GroundSet glued(GroundSet core, GroundSet attachGround, SetExpr attach,
                         GroundSet spine, Element spineBase);

  Kind kind() const;
  Nat pointCount() const;  // FinitePoints
  const std::vector<GroundSet>& components() const;
  const std::vector<std::pair<Nat, GroundSet>>& parts() const;
  const SetExpr& universe() const;   // SubsetsOf
  const SetExpr& indexSet() const;   // FiniteSupport
  const GroundSet& factor() const;   // FiniteSupport
  const Element& basepoint() const;  // FiniteSupport
  const GroundSet& core() const;     // Glued
  const GroundSet& attachGround() const;
  const SetExpr& attach() const;
  const GroundSet& spine() const;
  const Element& spineBase() const;

  std::optional<Nat> finiteSize() const;
  bool valid(const Element& e) const;

  /// i-th element of the canonical enumeration; throws EncodingError past the
  /// end of a finite ground.
  Element decode(Nat index) const;

  bool same(const GroundSet& other) const;
  std::string render() const;

  // Glued helpers: tag 0 = core point, tag 1 = (attach index, spine point).
  static constexpr Nat kCoreTag = 0;
  static constexpr Nat kToothTag = 1;

  struct Node;

 private:
  explicit GroundSet(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Finitely presented subset of a ground set. The exact tier (Finite and
/// EventuallyPeriodic over ℕ) is closed under Boolean operations and fully
/// decidable; generator-presented and procedural sets are membership-only
/// and degrade to horizon semantics.
class SetExpr {
 public:
  enum class Kind {
    Finite,
    EvPeriodic,
    Generator,
    Union,
    Intersection,
    Complement,
    Rectangle,
    Tagged,
    XorCylinder,
    Procedural
  };

  SetExpr();  // empty set over ℕ

  static SetExpr finite(GroundSet g, std::vector<Element> elems);
  static SetExpr finiteNats(GroundSet g, std::vector<Nat> values);
  static SetExpr empty(GroundSet g) { return finite(std::move(g), {}); }
  static SetExpr full(GroundSet g);
  static SetExpr singletonOf(GroundSet g, Element e);
  /// Members below threshold listed in prelude; members at or above threshold
  /// determined by residue mod period. Canonicalized on construction.
  static SetExpr evPeriodic(GroundSet g, std::vector<Nat> prelude, Nat period,
                            std::vector<Nat> residues, Nat threshold);
  static SetExpr arithmetic(GroundSet g, Nat period, std::vector<Nat> residues) {
    return evPeriodic(std::move(g), {}, period, std::move(residues), 0);
  }
  static SetExpr interval(GroundSet g, Nat lo, Nat hi);
  static SetExpr generator(GroundSet g, std::string name,
                           std::function<Nat(Nat)> gen);
  static SetExpr unionOf(SetExpr a, SetExpr b);
  static SetExpr intersectionOf(SetExpr a, SetExpr b);
  static SetExpr differenceOf(SetExpr a, SetExpr b);
  static SetExpr complementOf(SetExpr a);
  static SetExpr rectangle(GroundSet g, std::vector<SetExpr> sides);
  static SetExpr taggedSet(GroundSet g, Nat tag, SetExpr inner);
  static SetExpr xorCylinder(GroundSet subsetsGround, Nat center, SetExpr allowed);
  static SetExpr procedural(GroundSet g, std::string label,
                            std::function<bool(const Element&)> pred);

  Kind kind() const;
  const GroundSet& ground() const;

  bool contains(const Element& e) const;
  bool containsNat(Nat v) const { return contains(Element::nat(v)); }

  /// True / False(witness) / Unknown(horizon). Exact-tier input always
  /// decides.
  Verdict finiteness(const Budget& budget) const;

  bool isExact() const;       // Finite or EvPeriodic
  bool isEmptyFinite() const; // Finite with no elements
  const std::vector<Element>& finiteElems() const;
  Nat evPeriod() const;
  Nat evThreshold() const;
  const std::vector<Nat>& evResidues() const;
  const std::vector<Nat>& evPrelude() const;
  const std::string& generatorName() const;
  const std::vector<SetExpr>& children() const;
  Nat tagValue() const;
  Nat cylinderCenter() const;
  const SetExpr& cylinderAllowed() const;
  const std::string& label() const;

  /// Members whose canonical enumeration index is <= cap, in enumeration
  /// order.
  std::vector<Element> membersUpTo(Nat cap) const;
  std::vector<Nat> natMembersUpTo(Nat cap) const;

  /// Smallest natural member >= from, scanning at most `scanCap` candidates.
  std::optional<Nat> nextNatMember(Nat from, Nat scanCap) const;

  bool equalsCanonical(const SetExpr& other) const {
    return render() == other.render();
  }
  /// Pointwise agreement on the first `cap` elements of the ground.
  bool agreesUpTo(const SetExpr& other, Nat cap) const;

  std::string render() const;

  struct Node;

 private:
  explicit SetExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// True when the ground's elements are naturals under the identity encoding.
bool natLikeGround(const GroundSet& g);

}  // namespace ballean
