#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ballean/sets.hpp"

namespace ballean {

/// A reflexive relation presentation with a computable ball function. Every
/// entourage contains the diagonal; `relates(x, y)` decides y ∈ E[x].
///
/// Composition follows the convention (E ∘ F)[x] = F[E[x]] throughout: a
/// composite first moves along E, then along F.
class Entourage {
 public:
  enum class Kind {
    Metric,      // |x − y| <= r on a natural-like ground
    FiniteRel,   // explicit pairs, implicitly ∪ diagonal
    Block,       // (B × B) ∪ diagonal
    Product,     // componentwise over a tuple ground
    XorMask,     // symmetric difference inside a member, over subset grounds
    SupportCyl,  // finite-support grounds: equal outside β, factor-related inside
    Glue,        // glued grounds: core/tooth case analysis
    Compose,
    UnionRel,
    Restrict,
    PairFn,      // {(n, f(n)), (f(n), n)} ∪ diagonal
    BallMap,
    Saturator    // bounded-length words over a block and symmetric witnesses
  };

  static Entourage metric(GroundSet g, Nat radius);
  static Entourage finiteRel(GroundSet g,
                             std::vector<std::pair<Element, Element>> pairs);
  static Entourage block(SetExpr member);
  static Entourage productOf(GroundSet tupleGround,
                             std::vector<Entourage> components);
  static Entourage xorMask(GroundSet subsetsGround, SetExpr allowed);
  static Entourage supportCyl(GroundSet finiteSupportGround, SetExpr beta,
                              Entourage factorEnt);
  static Entourage glue(GroundSet gluedGround, SetExpr beta, Entourage coreEnt,
                        Entourage spineEnt);
  static Entourage compose(Entourage e, Entourage f);
  static Entourage unionOf(GroundSet g, std::vector<Entourage> parts);
  static Entourage restrictTo(Entourage e, SetExpr within);
  static Entourage pairFn(GroundSet g, std::string name,
                          std::function<Nat(Nat)> fwd,
                          std::function<std::optional<Nat>(Nat)> inv);
  static Entourage ballMap(GroundSet g, std::string name,
                           std::function<SetExpr(const Element&)> ball,
                           std::function<SetExpr(const Element&)> invBall);
  /// Reachability in at most `steps` moves, where one move stays inside the
  /// block member or follows a (symmetrized) witness edge.
  static Entourage saturator(SetExpr member, std::vector<Entourage> witnesses,
                             Nat steps);

  Kind kind() const;
  const GroundSet& ground() const;
  Nat metricRadius() const;
  const SetExpr& blockMember() const;
  const std::vector<std::pair<Element, Element>>& relPairs() const;
  const std::vector<Entourage>& parts() const;
  const SetExpr& maskAllowed() const;

  bool relates(const Element& x, const Element& y) const;

  /// E[x] as a set expression (exact where the presentation allows it).
  SetExpr ball(const Element& x) const;
  /// E[x] fully enumerated when finite and within `sizeBudget` elements.
  std::optional<std::vector<Element>> ballList(const Element& x,
                                               std::size_t sizeBudget) const;
  std::optional<std::vector<Element>> inverseBallList(
      const Element& x, std::size_t sizeBudget) const;

  /// Throws UnsupportedPresentationError for ball maps without an inverse
  /// image.
  Entourage inverted() const;
  bool symmetricHint() const;

  std::string render() const;

  struct Node;

 private:
  explicit Entourage(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// E[S] — union of balls over S. Exact where metric/block arithmetic allows.
SetExpr applyEntourage(const Entourage& e, const SetExpr& s,
                       const Budget& budget);

}  // namespace ballean
