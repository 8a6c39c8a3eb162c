#include "ballean/finiterel.hpp"

#include <algorithm>
#include <map>

namespace ballean::finiterel {

Rel diagonal(int n) {
  Rel d = 0;
  for (int x = 0; x < n; ++x) d |= Rel{1} << (x * n + x);
  return d;
}

Rel composeRel(Rel e, Rel f, int n) {
  Rel out = 0;
  for (int x = 0; x < n; ++x) {
    for (int z = 0; z < n; ++z) {
      if (!(e & (Rel{1} << (x * n + z)))) continue;
      for (int y = 0; y < n; ++y)
        if (f & (Rel{1} << (z * n + y))) out |= Rel{1} << (x * n + y);
    }
  }
  return out;
}

Rel invertRel(Rel e, int n) {
  Rel out = 0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (e & (Rel{1} << (x * n + y))) out |= Rel{1} << (y * n + x);
  return out;
}

bool containsDiagonal(Rel e, int n) { return (e & diagonal(n)) == diagonal(n); }

std::string renderRel(Rel e, int n) {
  std::string out = "{";
  bool first = true;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (e & (Rel{1} << (x * n + y))) {
        if (!first) out += ",";
        out += "(" + std::to_string(x) + "," + std::to_string(y) + ")";
        first = false;
      }
  return out + "}";
}

std::string AxiomCheck::render() const {
  if (pass) return "pass";
  std::string out = "fail";
  for (const auto& v : violations) out += "\n  - " + v;
  return out;
}

AxiomCheck checkAxioms(const std::vector<Rel>& family, int n) {
  AxiomCheck report;
  if (n > 6) throw DomainError("axiom check supports grounds of at most 6 points");
  std::set<Rel> fam(family.begin(), family.end());
  if (fam.empty()) {
    report.pass = false;
    report.violations.push_back("family is empty");
    return report;
  }
  const Rel d = diagonal(n);
  for (Rel e : fam)
    if (!containsDiagonal(e, n)) {
      report.pass = false;
      report.violations.push_back("diagonal missing from " + renderRel(e, n));
    }
  for (Rel e : fam)
    if (!fam.count(invertRel(e, n))) {
      report.pass = false;
      report.violations.push_back("inverse of " + renderRel(e, n) +
                                  " not in the family");
    }
  for (Rel e : fam)
    for (Rel f : fam) {
      const Rel c = composeRel(e, f, n);
      if (!fam.count(c)) {
        report.pass = false;
        report.violations.push_back("composition " + renderRel(e, n) + " ; " +
                                    renderRel(f, n) + " = " + renderRel(c, n) +
                                    " not in the family");
      }
      if (!report.pass && report.violations.size() > 8) return report;
    }
  // Downward closure: removing one off-diagonal pair must stay inside.
  for (Rel e : fam) {
    Rel off = e & ~d;
    while (off) {
      const Rel bit = off & (~off + 1);
      off ^= bit;
      if (!fam.count(e ^ bit)) {
        report.pass = false;
        report.violations.push_back("subset " + renderRel(e ^ bit, n) + " of " +
                                    renderRel(e, n) + " not in the family");
        break;
      }
    }
  }
  return report;
}

namespace {

// Connecting pairs in lexicographic order.
std::vector<Rel> connectingPairs(int n) {
  std::vector<Rel> out;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      out.push_back((Rel{1} << (x * n + y)) | diagonal(n));
  return out;
}

std::vector<Rel> alphabet(const std::vector<Rel>& generators, int n,
                          std::optional<int> pairLimit) {
  std::vector<Rel> letters;
  const Rel d = diagonal(n);
  for (Rel g : generators) letters.push_back(g | invertRel(g, n) | d);
  auto pairs = connectingPairs(n);
  const std::size_t limit =
      pairLimit ? std::min<std::size_t>(*pairLimit, pairs.size()) : pairs.size();
  for (std::size_t i = 0; i < limit; ++i) letters.push_back(pairs[i]);
  return letters;
}

}  // namespace

std::set<Rel> bruteClosure(const std::vector<Rel>& generators, int n) {
  const auto letters = alphabet(generators, n, std::nullopt);
  // Every word is contained in a power of the product of all letters (each
  // letter contains the diagonal), and those powers are themselves words, so
  // the structure is the down-set of the stabilized power of the letter
  // union.
  const Rel d = diagonal(n);
  Rel limit = d;
  for (Rel a : letters) limit |= a | invertRel(a, n);
  for (;;) {
    const Rel next = limit | composeRel(limit, limit, n);
    if (next == limit) break;
    limit = next;
  }
  // Everything between the diagonal and the limit.
  std::set<Rel> structure;
  std::vector<int> offBits;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y && (limit & (Rel{1} << (x * n + y))))
        offBits.push_back(x * n + y);
  for (Rel sub = 0; sub < (Rel{1} << offBits.size()); ++sub) {
    Rel e = d;
    for (std::size_t i = 0; i < offBits.size(); ++i)
      if (sub & (Rel{1} << i)) e |= Rel{1} << offBits[i];
    structure.insert(e);
  }
  return structure;
}

Rel generatedChainRel(const std::vector<Rel>& generators, int n, int k) {
  const auto letters = alphabet(generators, n, k);
  Rel acc = diagonal(n);
  for (int step = 0; step < k; ++step) {
    Rel next = acc;
    for (Rel a : letters) next |= composeRel(acc, a, n);
    if (next == acc) break;
    acc = next;
  }
  return acc;
}

std::optional<std::size_t> countCoarseStructures(int n, std::size_t budget) {
  if (n < 1 || n > 4)
    throw DomainError("coarse-structure enumeration supports 1 to 4 points");
  const Rel d = diagonal(n);
  const int offBits = n * n - n;

  if (n <= 2) {
    // Direct enumeration over all families of diagonal-containing relations.
    std::vector<Rel> rels;
    for (Rel off = 0; off < (Rel{1} << offBits); ++off) {
      Rel e = d;
      int bit = 0;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          if (x == y) continue;
          if (off & (Rel{1} << bit)) e |= Rel{1} << (x * n + y);
          ++bit;
        }
      rels.push_back(e);
    }
    std::size_t count = 0;
    for (std::uint64_t mask = 1; mask < (1ull << rels.size()); ++mask) {
      std::vector<Rel> family;
      for (std::size_t i = 0; i < rels.size(); ++i)
        if (mask & (1ull << i)) family.push_back(rels[i]);
      if (checkAxioms(family, n).pass) ++count;
    }
    return count;
  }

  // Join saturation: every coarse structure is a join of single-relation
  // closures; saturate the set of closures under pairwise join.
  auto closureOf = [&](const std::vector<Rel>& gens) {
    std::set<Rel> words(gens.begin(), gens.end());
    words.insert(d);
    for (;;) {
      std::set<Rel> next = words;
      for (Rel a : words) {
        for (Rel b : words) {
          next.insert(composeRel(a, b, n));
          next.insert(invertRel(a, n));
        }
      }
      if (next.size() == words.size()) break;
      words = std::move(next);
    }
    // The structure is determined by its maximal words; store them sorted.
    std::vector<Rel> maximal;
    for (Rel w : words) {
      bool dominated = false;
      for (Rel other : words)
        if (other != w && (w & other) == w) dominated = true;
      if (!dominated) maximal.push_back(w);
    }
    std::sort(maximal.begin(), maximal.end());
    return maximal;
  };

  std::set<std::vector<Rel>> structures;
  std::vector<std::vector<Rel>> frontier;
  // Seed: the trivial structure and all single-relation closures.
  structures.insert({d});
  for (Rel off = 0; off < (Rel{1} << offBits); ++off) {
    Rel e = d;
    int bit = 0;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (x == y) continue;
        if (off & (Rel{1} << bit)) e |= Rel{1} << (x * n + y);
        ++bit;
      }
    auto cl = closureOf({e});
    if (structures.insert(cl).second) frontier.push_back(cl);
    if (structures.size() > budget) return std::nullopt;
  }
  // Pairwise joins until saturation.
  while (!frontier.empty()) {
    auto current = frontier.back();
    frontier.pop_back();
    std::vector<std::vector<Rel>> snapshot(structures.begin(), structures.end());
    for (const auto& other : snapshot) {
      std::vector<Rel> gens = current;
      gens.insert(gens.end(), other.begin(), other.end());
      auto joined = closureOf(gens);
      if (structures.insert(joined).second) frontier.push_back(joined);
      if (structures.size() > budget) return std::nullopt;
    }
  }
  return structures.size();
}

}  // namespace ballean::finiterel
