#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ballean/coarse.hpp"

namespace ballean {

/// A family member for bornological products, bouquets and combs.
struct Pointed {
  CoarsePresentation space;
  Element basepoint;
};

/// Indexed family of pointed balleans: an explicit finite list, or one factor
/// repeated over an index set (the whole of ℕ or a subset of the handle).
struct FamilySpec {
  enum class Kind { Explicit, Uniform };
  Kind kind = Kind::Explicit;
  std::vector<Pointed> members;     // Explicit
  std::optional<Pointed> uniform;   // Uniform
  std::optional<SetExpr> indexSet;  // Uniform: defaults to the full ground

  static FamilySpec explicitList(std::vector<Pointed> ms) {
    FamilySpec f;
    f.kind = Kind::Explicit;
    f.members = std::move(ms);
    return f;
  }
  static FamilySpec uniformOver(Pointed factor,
                                std::optional<SetExpr> index = std::nullopt) {
    FamilySpec f;
    f.kind = Kind::Uniform;
    f.uniform = std::move(factor);
    f.indexSet = std::move(index);
    return f;
  }
};

/// Cartesian product: componentwise entourages, rectangle balls.
CoarsePresentation productOf(std::vector<CoarsePresentation> factors);

/// Support-restricted product over an index bornology: related tuples agree
/// outside the chosen member and are componentwise related inside it.
CoarsePresentation bProduct(const BornologyPresentation& indexBornology,
                            const FamilySpec& family, const Budget& budget);

/// B-product of doubletons pointed at 0; points are encoded by their support
/// sets (bit masks), balls are symmetric-difference cylinders.
CoarsePresentation macrocube(const BornologyPresentation& indexBornology,
                             const Budget& budget);

/// Wedge of the family: one distinguished point, spines meeting only there.
CoarsePresentation bouquet(const BornologyPresentation& indexBornology,
                           const FamilySpec& family, const Budget& budget);

/// Comb with the given handle and spines over A; the spine index bornology is
/// always the one induced on A by the handle's bounded sets.
CoarsePresentation comb(const CoarsePresentation& handle, const SetExpr& attach,
                        const FamilySpec& spines, const Budget& budget);

/// Smallest coarse structure compatible with B: blocks (M × M) ∪ Δ over the
/// base members of B.
CoarsePresentation smallestCompatible(const BornologyPresentation& b);

/// Membership in the largest compatible structure: E symmetric and E[M] a
/// member for every base member M.
Verdict largestMembership(const BornologyPresentation& b, const Entourage& e,
                          const Budget& budget);

/// Presentation of the largest compatible structure: blocks plus registered
/// symmetric witnesses, closed under short compositions. The enumeration is a
/// cofinal-at-horizon under-approximation; membership questions go through
/// largestMembership.
CoarsePresentation largestCompatible(const BornologyPresentation& b,
                                     std::vector<Entourage> witnesses);

}  // namespace ballean
