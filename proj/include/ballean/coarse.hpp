#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ballean/bornology.hpp"
#include "ballean/entourage.hpp"
#include "ballean/sets.hpp"
#include "ballean/verdict.hpp"

namespace ballean {

enum class Prov {
  MetricNat,
  FiniteGround,
  Generated,
  Down,
  Up,
  Product,
  BProduct,
  Macrocube,
  Bouquet,
  Comb,
  Sub,
  Abstract
};

/// A coarse structure presented by a monotone, horizon-cofinal enumeration of
/// base entourages, together with construction provenance. The enumeration is
/// an honest under-approximation for structures whose full base is not
/// countable; the structural countable-base verdict records which case holds.
class CoarsePresentation {
 public:
  struct Payload {
    std::optional<BornologyPresentation> bornology;  // Down/Up/index bornology
    std::vector<CoarsePresentation> factors;         // Product
    std::shared_ptr<const CoarsePresentation> parent;  // Sub / Comb handle
    std::optional<SetExpr> subset;                     // Sub carrier
    std::vector<Entourage> witnesses;                  // Up registered
    std::optional<Element> pointedAt;
    bool factorsBounded = false;  // family classification hints
    bool factorsUnboundedMetrizable = false;
    // Structural facts the builder can certify: every base ball finite /
    // one base entourage relates the whole carrier.
    bool ballsFinite = false;
    bool boundedByConstruction = false;
  };

  static CoarsePresentation make(GroundSet ground, Prov tag,
                                 std::function<Entourage(Nat)> chain,
                                 Verdict countableBase, std::string describe,
                                 Payload payload, std::optional<SetExpr> carrier);
  static CoarsePresentation make(GroundSet ground, Prov tag,
                                 std::function<Entourage(Nat)> chain,
                                 Verdict countableBase, std::string describe);

  const GroundSet& ground() const;
  Prov provenance() const;
  const std::string& describe() const;
  const Payload& payload() const;
  /// i-th entourage of the canonical monotone enumeration (memoized).
  Entourage at(Nat i) const;
  /// Structural countable-base verdict with justification.
  const Verdict& countableBase() const;
  SetExpr carrier() const;
  bool hasProperCarrier() const;
  /// First `cap`+1 carrier points in enumeration order.
  std::vector<Element> carrierElements(Nat cap) const;

  struct Node;

 private:
  explicit CoarsePresentation(std::shared_ptr<const Node> n)
      : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// The metric ballean (ℕ, |·|): chain of radius-i entourages.
CoarsePresentation metricNat();
/// Bounded connected structure on an n-point ground (chain saturates at the
/// full square).
CoarsePresentation boundedFinite(Nat n);

/// Structure generated by relation fragments: the i-th chain entourage is the
/// union of all words of length <= i over symmetrized generators, the
/// diagonal, and the first i connecting pairs of the canonical pair
/// enumeration. Generated structures are therefore always connected.
CoarsePresentation generateStructure(GroundSet ground,
                                     std::vector<Entourage> generators);

/// Subballean over Y: entourages intersected with Y × Y.
CoarsePresentation restrictPresentation(const CoarsePresentation& x, SetExpr y);

Verdict isConnected(const CoarsePresentation& x, const Budget& budget);
Verdict isLarge(const CoarsePresentation& x, const SetExpr& y,
                const Budget& budget);
Verdict isCoarseMap(const std::string& name,
                    const std::function<Element(const Element&)>& f,
                    const CoarsePresentation& from, const CoarsePresentation& to,
                    const Budget& budget);
Verdict isBounded(const CoarsePresentation& x, const SetExpr& s,
                  const Budget& budget);
/// Bornology of bounded sets, derived from provenance where the construction
/// fixes it, oracle-backed via isBounded otherwise.
BornologyPresentation boundedSets(const CoarsePresentation& x);

/// Index of the first chain entourage relating x to y, probing exponentially
/// up to maxIndex.
std::optional<Nat> relatingIndex(const CoarsePresentation& x, const Element& a,
                                 const Element& b, Nat maxIndex);

}  // namespace ballean
