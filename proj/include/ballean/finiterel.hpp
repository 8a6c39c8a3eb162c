#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ballean/common.hpp"

namespace ballean::finiterel {

/// Relation on an n-point ground (n <= 8) as a bit mask: bit (x*n + y) set
/// means (x, y) is related.
using Rel = std::uint64_t;

Rel diagonal(int n);
Rel composeRel(Rel e, Rel f, int n);  // (E ∘ F)[x] = F[E[x]]
Rel invertRel(Rel e, int n);
bool containsDiagonal(Rel e, int n);
std::string renderRel(Rel e, int n);

struct AxiomCheck {
  bool pass = true;
  std::vector<std::string> violations;
  std::string render() const;
};

/// Checks the coarse-structure axioms on an explicit family: diagonal
/// containment, closure under composition and inversion, and downward closure
/// above the diagonal. Violations carry concrete witnesses.
AxiomCheck checkAxioms(const std::vector<Rel>& family, int n);

/// All relations of the connected coarse structure generated by the given
/// fragments: close symmetrized generators plus all single connecting pairs
/// under composition, then take everything between the diagonal and a word.
std::set<Rel> bruteClosure(const std::vector<Rel>& generators, int n);

/// Single chain entourage: union of all words of length <= k over symmetrized
/// generators and the first k connecting pairs (lexicographic enumeration).
Rel generatedChainRel(const std::vector<Rel>& generators, int n, int k);

/// Number of coarse structures on an n-point ground, by join saturation of
/// single-relation closures. Exhaustive for n = 2 by direct enumeration.
/// Returns nullopt when the structure count exceeds `budget`.
std::optional<std::size_t> countCoarseStructures(int n, std::size_t budget);

}  // namespace ballean::finiterel
