#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ballean/constructions.hpp"

namespace ballean {

/// A [0,1]-valued function on a carrier, with synthesis provenance.
struct SlowFunction {
  std::string name;
  std::string provenance;  // user / metric-quotient / glued / indicator
  std::function<Rational(const Element&)> eval;
};

Verdict asymptoticallyDisjoint(const CoarsePresentation& x, const SetExpr& y,
                               const SetExpr& z, const Budget& budget);
Verdict isAsymptoticNeighborhood(const CoarsePresentation& x, const SetExpr& y,
                                 const SetExpr& u, const Budget& budget);

struct SeparatedResult {
  Verdict verdict;
  std::optional<SetExpr> u;
  std::optional<SetExpr> v;
};
SeparatedResult asymptoticallySeparated(const CoarsePresentation& x,
                                        const SetExpr& y, const SetExpr& z,
                                        const Budget& budget);

Verdict isSlowlyOscillating(const CoarsePresentation& x, const SlowFunction& f,
                            const Rational& eps, const Budget& budget);

/// Separator synthesis. Requires disjoint inputs whose asymptotic
/// disjointness is not refuted; throws PreconditionError / DomainError
/// otherwise. The result maps Y to 0 and Z to 1 pointwise.
SlowFunction synthesizeSeparator(const CoarsePresentation& x, const SetExpr& y,
                                 const SetExpr& z, const Budget& budget);

Verdict isDiscrete(const CoarsePresentation& x, const Budget& budget);
Verdict isAntidiscrete(const CoarsePresentation& x,
                       const std::vector<Entourage>& witnesses,
                       const Budget& budget);
Verdict ultranormalSearch(const CoarsePresentation& x,
                          const std::vector<SetExpr>& catalog,
                          const Budget& budget);

// ---------------------------------------------------------------------------
// Construction expressions and the inference pass.

enum class Property {
  Bounded,
  Connected,
  Metrizable,
  Normal,
  Discrete,
  Antidiscrete,
  Ultranormal
};
const char* propertyName(Property p);

struct InconsistencyError : std::runtime_error {
  explicit InconsistencyError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Per-property verdict with a citation chain or witness. A True/False entry
/// always carries its justification; Unknown records the blocking subgoal.
class PropertyReport {
 public:
  struct Entry {
    Verdict verdict;
    std::string why;
  };

  /// Throws InconsistencyError when a witness-backed False meets a
  /// rule-derived True (or vice versa).
  void assign(Property p, Verdict v, std::string why);
  const Entry* find(Property p) const;
  const std::map<Property, Entry>& entries() const { return entries_; }
  std::string render(const std::string& name) const;

 private:
  std::map<Property, Entry> entries_;
};

/// Construction AST over which the theorem rules run.
class BalleanExpr {
 public:
  enum class Kind {
    MetricNat,
    FinitePointsB,
    Down,
    Up,
    AbstractB,
    Product,
    BProduct,
    Macrocube,
    Bouquet,
    Comb,
    Sub
  };

  struct ExprFamily {
    enum class Kind { Explicit, Uniform } kind = Kind::Explicit;
    std::vector<BalleanExpr> members;
    std::vector<Element> basepoints;
    std::shared_ptr<const BalleanExpr> uniform;
    Element uniformBase;
    std::optional<SetExpr> indexSet;
  };

  static BalleanExpr metricNatExpr();
  static BalleanExpr finitePoints(Nat n);
  static BalleanExpr down(BornologyPresentation b);
  static BalleanExpr up(BornologyPresentation b, std::vector<Entourage> witnesses);
  static BalleanExpr abstractBallean(BornologyPresentation b);
  static BalleanExpr product(std::vector<BalleanExpr> factors);
  static BalleanExpr bProductExpr(BornologyPresentation b, ExprFamily family);
  static BalleanExpr macrocubeExpr(BornologyPresentation b);
  static BalleanExpr bouquetExpr(BornologyPresentation b, ExprFamily family);
  static BalleanExpr combExpr(BalleanExpr handle, SetExpr attach,
                              ExprFamily spines);
  static BalleanExpr subballean(BalleanExpr parent, SetExpr subset);

  Kind kind() const;
  Nat pointCount() const;
  const BornologyPresentation& bornology() const;
  const std::vector<BalleanExpr>& factors() const;
  const ExprFamily& family() const;
  const BalleanExpr& parent() const;
  const SetExpr& subset() const;
  const std::vector<Entourage>& witnesses() const;

  /// True when every node can be built into a concrete presentation.
  bool concrete() const;
  CoarsePresentation build(const Budget& budget) const;
  std::string render() const;

  struct Node;

 private:
  explicit BalleanExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Bottom-up symbolic pass applying the theorem rules with citations.
PropertyReport inferProperties(const BalleanExpr& expr, const Budget& budget);

/// Named slow functions for checks from instance files.
std::optional<SlowFunction> namedSlowFunction(const std::string& name,
                                              const Budget& budget);

}  // namespace ballean
