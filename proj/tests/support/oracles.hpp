#pragma once

// Brute-force reference implementations for the relation algebra and the set
// layer: plain pair-set arithmetic, independent of the library's entourage
// and set-expression code paths.

#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ballean/sets.hpp"

namespace oracles {

using ballean::Nat;
using PairSet = std::set<std::pair<Nat, Nat>>;

inline PairSet diagonalOn(Nat n) {
  PairSet out;
  for (Nat x = 0; x < n; ++x) out.insert({x, x});
  return out;
}

// (E ∘ F)[x] = F[E[x]].
inline PairSet composePairs(const PairSet& e, const PairSet& f) {
  PairSet out;
  for (const auto& [x, z] : e)
    for (const auto& [z2, y] : f)
      if (z == z2) out.insert({x, y});
  return out;
}

inline PairSet invertPairs(const PairSet& e) {
  PairSet out;
  for (const auto& [x, y] : e) out.insert({y, x});
  return out;
}

inline std::vector<Nat> ballOf(const PairSet& e, Nat x) {
  std::vector<Nat> out;
  for (const auto& [a, b] : e)
    if (a == x) out.push_back(b);
  return out;
}

// Random diagonal-containing relation on n points.
inline PairSet randomRelation(std::mt19937& rng, Nat n, double density = 0.3) {
  PairSet out = diagonalOn(n);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (Nat x = 0; x < n; ++x)
    for (Nat y = 0; y < n; ++y)
      if (x != y && coin(rng) < density) out.insert({x, y});
  return out;
}

// Enumerated members of a set expression by brute membership scan.
inline std::vector<Nat> scanMembers(const ballean::SetExpr& s, Nat cap) {
  std::vector<Nat> out;
  for (Nat x = 0; x <= cap; ++x)
    if (s.containsNat(x)) out.push_back(x);
  return out;
}

}  // namespace oracles
