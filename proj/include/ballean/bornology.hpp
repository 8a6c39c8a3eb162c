#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ballean/sets.hpp"
#include "ballean/symcard.hpp"
#include "ballean/verdict.hpp"

namespace ballean {

struct AxiomReport {
  bool pass = true;
  std::vector<std::string> problems;

  void fail(std::string what) {
    pass = false;
    problems.push_back(std::move(what));
  }
  std::string render() const {
    if (pass) return "pass";
    std::string out = "fail";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
  }
};

/// Family of bounded sets, given by a base, an oracle, or a symbolic
/// declaration. Membership is by domination: a set belongs to the bornology
/// when some base member contains it.
class BornologyPresentation {
 public:
  enum class Kind {
    FiniteSubsets,
    ChainBase,
    ExplicitBase,
    OracleBacked,
    Abstract,
    ProductOf
  };

  struct Invariants {
    SymCard add = SymCard::aleph0();
    SymCard cov = SymCard::aleph0();
    SymCard cof = SymCard::aleph0();
    std::string justification;
  };

  static BornologyPresentation finiteSubsets(GroundSet g);
  /// Increasing chain B_0 ⊆ B_1 ⊆ …  `membersFiniteHint` asserts whether
  /// every chain member is finite (nullopt: decide per tested index).
  static BornologyPresentation chainBase(GroundSet g, std::string name,
                                         std::function<SetExpr(Nat)> chain,
                                         std::optional<bool> membersFiniteHint,
                                         bool properTail);
  static BornologyPresentation explicitBase(GroundSet g,
                                            std::vector<SetExpr> base);
  static BornologyPresentation oracleBacked(
      GroundSet g, std::string label,
      std::function<Verdict(const SetExpr&, const Budget&)> memberTest,
      std::function<std::optional<SetExpr>(Nat)> baseHint = nullptr,
      Verdict unboundedHint = Verdict());
  /// Rejects declarations violating add <= cov <= cof.
  static BornologyPresentation abstractDecl(GroundSet g, std::string name,
                                            SymCard add, SymCard cov,
                                            SymCard cof, bool unbounded = true);
  static BornologyPresentation productOf(BornologyPresentation left,
                                         BornologyPresentation right);
  /// Bornology induced on A: members of `ambient` that are subsets of A.
  static BornologyPresentation restrictedTo(const BornologyPresentation& ambient,
                                            SetExpr within);

  Kind kind() const;
  const GroundSet& ground() const;
  const std::string& name() const;
  const BornologyPresentation& left() const;
  const BornologyPresentation& right() const;

  /// Membership of S (domination by a base member).
  Verdict member(const SetExpr& s, const Budget& budget) const;

  /// Canonical increasing base enumeration; nullopt for Abstract.
  std::optional<SetExpr> baseMemberAt(Nat i) const;

  AxiomReport checkBornology(const Budget& budget) const;
  Verdict unbounded(const Budget& budget) const;
  /// add/cov/cof; requires an unbounded presentation.
  Invariants invariants(const Budget& budget) const;
  Verdict countableBase() const;
  Verdict allBaseMembersFinite(const Budget& budget) const;
  /// True when the presentation denotes exactly the finite subsets of its
  /// ground.
  Verdict finiteSubsetsSemantically(const Budget& budget) const;

  std::string render() const;

  struct Node;

 private:
  explicit BornologyPresentation(std::shared_ptr<const Node> n)
      : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Product bornology over the tuple ground; base members are rectangles of
/// the factors' base members.
BornologyPresentation productBornology(const BornologyPresentation& bx,
                                       const BornologyPresentation& by);

}  // namespace ballean
