#include "ballean/sets.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <set>

namespace ballean {

// ---------------------------------------------------------------------------
// Element

Nat Element::natValue() const {
  if (!isNat()) throw EncodingError("element is not a natural: " + render());
  return std::get<Nat>(v_);
}

int Element::cmp(const Element& a, const Element& b) {
  const auto ka = a.v_.index();
  const auto kb = b.v_.index();
  if (ka != kb) return ka < kb ? -1 : 1;
  if (a.isNat()) {
    const Nat x = std::get<Nat>(a.v_), y = std::get<Nat>(b.v_);
    return x == y ? 0 : (x < y ? -1 : 1);
  }
  if (a.isTuple()) {
    const auto& x = a.items();
    const auto& y = b.items();
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int c = cmp(x[i], y[i]);
      if (c != 0) return c;
    }
    return 0;
  }
  if (a.isTagged()) {
    if (a.tag() != b.tag()) return a.tag() < b.tag() ? -1 : 1;
    return cmp(a.payload(), b.payload());
  }
  if (a.isSupport()) {
    const auto& x = a.entries();
    const auto& y = b.entries();
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].first != y[i].first) return x[i].first < y[i].first ? -1 : 1;
      const int c = cmp(x[i].second, y[i].second);
      if (c != 0) return c;
    }
    return 0;
  }
  return 0;
}

std::string Element::render() const {
  if (isNat()) return std::to_string(std::get<Nat>(v_));
  if (isTuple()) {
    std::string out = "(tuple";
    for (const auto& e : items()) out += " " + e.render();
    return out + ")";
  }
  if (isTagged())
    return "(tag " + std::to_string(tag()) + " " + payload().render() + ")";
  std::string out = "(support";
  for (const auto& [k, v] : entries())
    out += " (" + std::to_string(k) + " " + v.render() + ")";
  return out + ")";
}

// ---------------------------------------------------------------------------
// GroundSet

struct GroundSet::Node {
  Kind kind = Kind::Naturals;
  Nat count = 0;
  std::vector<GroundSet> components;
  std::vector<std::pair<Nat, GroundSet>> parts;
  std::shared_ptr<const SetExpr> setA;  // universe / indexSet / attach
  std::vector<GroundSet> grounds;       // factor | {core, attachGround, spine}
  Element base;

  // enumeration cache
  mutable std::vector<Element> enumCache;
  mutable Nat scanPos = 0;        // SubsetsOf raw scan position
  mutable Nat shell = 0;          // TupleSpace / FiniteSupport shell progress
  mutable Nat round = 0;          // TaggedUnion / Glued round progress
  mutable std::vector<Nat> idxMembers;   // FiniteSupport index member stream
  mutable std::vector<Element> attachMembers;  // Glued attach member stream
  mutable Nat attachScan = 0;
  mutable Nat idxScan = 0;
};

namespace {
constexpr Nat kStreamScanLimit = 1u << 22;
}

GroundSet::GroundSet() : node_(std::make_shared<Node>()) {}

GroundSet GroundSet::naturals() { return GroundSet(); }

GroundSet GroundSet::finitePoints(Nat n) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::FinitePoints;
  node->count = n;
  return GroundSet(std::move(node));
}

GroundSet GroundSet::tupleSpace(std::vector<GroundSet> components) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::TupleSpace;
  node->components = std::move(components);
  return GroundSet(std::move(node));
}

GroundSet GroundSet::taggedUnion(std::vector<std::pair<Nat, GroundSet>> parts) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::TaggedUnion;
  node->parts = std::move(parts);
  return GroundSet(std::move(node));
}

GroundSet GroundSet::subsetsOf(SetExpr universe) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::SubsetsOf;
  node->setA = std::make_shared<const SetExpr>(std::move(universe));
  return GroundSet(std::move(node));
}

GroundSet GroundSet::finiteSupport(SetExpr indexSet, GroundSet factor,
                                   Element basepoint) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::FiniteSupport;
  node->setA = std::make_shared<const SetExpr>(std::move(indexSet));
  node->grounds = {std::move(factor)};
  node->base = std::move(basepoint);
  return GroundSet(std::move(node));
}

GroundSet GroundSet::glued(GroundSet core, GroundSet attachGround, SetExpr attach,
                           GroundSet spine, Element spineBase) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Glued;
  node->setA = std::make_shared<const SetExpr>(std::move(attach));
  node->grounds = {std::move(core), std::move(attachGround), std::move(spine)};
  node->base = std::move(spineBase);
  return GroundSet(std::move(node));
}

GroundSet::Kind GroundSet::kind() const { return node_->kind; }
Nat GroundSet::pointCount() const { return node_->count; }
const std::vector<GroundSet>& GroundSet::components() const {
  return node_->components;
}
const std::vector<std::pair<Nat, GroundSet>>& GroundSet::parts() const {
  return node_->parts;
}
const SetExpr& GroundSet::universe() const { return *node_->setA; }
const SetExpr& GroundSet::indexSet() const { return *node_->setA; }
const GroundSet& GroundSet::factor() const { return node_->grounds[0]; }
const Element& GroundSet::basepoint() const { return node_->base; }
const GroundSet& GroundSet::core() const { return node_->grounds[0]; }
const GroundSet& GroundSet::attachGround() const { return node_->grounds[1]; }
const SetExpr& GroundSet::attach() const { return *node_->setA; }
const GroundSet& GroundSet::spine() const { return node_->grounds[2]; }
const Element& GroundSet::spineBase() const { return node_->base; }

std::optional<Nat> GroundSet::finiteSize() const {
  switch (node_->kind) {
    case Kind::Naturals:
      return std::nullopt;
    case Kind::FinitePoints:
      return node_->count;
    case Kind::TupleSpace: {
      Nat prod = 1;
      for (const auto& c : node_->components) {
        auto s = c.finiteSize();
        if (!s) return std::nullopt;
        prod *= *s;
      }
      return prod;
    }
    case Kind::TaggedUnion: {
      Nat sum = 0;
      for (const auto& [t, g] : node_->parts) {
        auto s = g.finiteSize();
        if (!s) return std::nullopt;
        sum += *s;
      }
      return sum;
    }
    case Kind::SubsetsOf: {
      Budget b;
      if (!universe().finiteness(b).isTrue()) return std::nullopt;
      const auto members = universe().natMembersUpTo(1u << 16);
      if (members.size() >= 63) return std::nullopt;
      return Nat{1} << members.size();
    }
    case Kind::FiniteSupport: {
      Budget b;
      if (!indexSet().finiteness(b).isTrue()) return std::nullopt;
      auto f = factor().finiteSize();
      if (!f) return std::nullopt;
      const auto members = indexSet().natMembersUpTo(1u << 16);
      Nat total = 1;
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (total > (Nat{1} << 40)) return std::nullopt;
        total *= *f;
      }
      return total;
    }
    case Kind::Glued: {
      Budget b;
      auto c = core().finiteSize();
      auto sp = spine().finiteSize();
      if (!c || !sp || !attach().finiteness(b).isTrue()) return std::nullopt;
      const auto members = attach().membersUpTo(1u << 16);
      return *c + static_cast<Nat>(members.size()) * (*sp - 1);
    }
  }
  return std::nullopt;
}

bool GroundSet::valid(const Element& e) const {
  switch (node_->kind) {
    case Kind::Naturals:
      return e.isNat();
    case Kind::FinitePoints:
      return e.isNat() && e.natValue() < node_->count;
    case Kind::TupleSpace: {
      if (!e.isTuple() || e.items().size() != node_->components.size())
        return false;
      for (std::size_t i = 0; i < node_->components.size(); ++i)
        if (!node_->components[i].valid(e.items()[i])) return false;
      return true;
    }
    case Kind::TaggedUnion: {
      if (!e.isTagged()) return false;
      for (const auto& [t, g] : node_->parts)
        if (t == e.tag()) return g.valid(e.payload());
      return false;
    }
    case Kind::SubsetsOf: {
      if (!e.isNat()) return false;
      Nat mask = e.natValue();
      for (Nat bit = 0; mask != 0; ++bit, mask >>= 1)
        if ((mask & 1) && !universe().containsNat(bit)) return false;
      return true;
    }
    case Kind::FiniteSupport: {
      if (!e.isSupport()) return false;
      Nat prev = 0;
      bool first = true;
      for (const auto& [k, v] : e.entries()) {
        if (!first && k <= prev) return false;
        prev = k;
        first = false;
        if (!indexSet().containsNat(k)) return false;
        if (!factor().valid(v) || v == basepoint()) return false;
      }
      return true;
    }
    case Kind::Glued: {
      if (!e.isTagged()) return false;
      if (e.tag() == kCoreTag) return core().valid(e.payload());
      if (e.tag() != kToothTag) return false;
      const Element& p = e.payload();
      if (!p.isTuple() || p.items().size() != 2) return false;
      const Element& alpha = p.items()[0];
      const Element& s = p.items()[1];
      return attachGround().valid(alpha) && attach().contains(alpha) &&
             spine().valid(s) && s != spineBase();
    }
  }
  return false;
}

namespace {

// Mixed-radix counter helper: advances `digits` where digit i ranges over
// [0, caps[i]]; returns false when the counter wraps around.
bool advanceCounter(std::vector<Nat>& digits, const std::vector<Nat>& caps) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] < caps[i]) {
      ++digits[i];
      std::fill(digits.begin() + static_cast<long>(i) + 1, digits.end(), 0);
      return true;
    }
  }
  return false;
}

}  // namespace

Element GroundSet::decode(Nat index) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Naturals:
      return Element::nat(index);
    case Kind::FinitePoints:
      if (index >= n.count) throw EncodingError("index beyond finite ground");
      return Element::nat(index);
    default:
      break;
  }

  auto& cache = n.enumCache;
  if (index < cache.size()) return cache[index];
  if (auto size = finiteSize(); size && index >= *size)
    throw EncodingError("index beyond finite ground");

  auto exhausted = [&]() -> bool {
    auto size = finiteSize();
    return size && cache.size() >= *size;
  };

  while (index >= cache.size() && !exhausted()) {
    switch (n.kind) {
      case Kind::TupleSpace: {
        // Shell s: tuples whose largest component rank equals s.
        const Nat s = n.shell++;
        const std::size_t k = n.components.size();
        if (k == 0) {
          if (s == 0) cache.push_back(Element::tuple({}));
          break;
        }
        std::vector<Nat> caps(k);
        bool feasible = false;
        for (std::size_t i = 0; i < k; ++i) {
          auto sz = n.components[i].finiteSize();
          caps[i] = sz ? std::min<Nat>(s, *sz - 1) : s;
          if (caps[i] == s) feasible = true;
        }
        if (!feasible) break;
        std::vector<Nat> digits(k, 0);
        do {
          const Nat mx = *std::max_element(digits.begin(), digits.end());
          if (mx != s) continue;
          std::vector<Element> items;
          items.reserve(k);
          for (std::size_t i = 0; i < k; ++i)
            items.push_back(n.components[i].decode(digits[i]));
          cache.push_back(Element::tuple(std::move(items)));
        } while (advanceCounter(digits, caps));
        break;
      }
      case Kind::TaggedUnion: {
        const Nat r = n.round++;
        for (const auto& [tag, g] : n.parts) {
          auto sz = g.finiteSize();
          if (sz && r >= *sz) continue;
          cache.push_back(Element::tagged(tag, g.decode(r)));
        }
        break;
      }
      case Kind::SubsetsOf: {
        const Nat m = n.scanPos++;
        if (n.scanPos > kStreamScanLimit)
          throw EncodingError("subset ground enumeration exhausted scan budget");
        if (valid(Element::nat(m))) cache.push_back(Element::nat(m));
        break;
      }
      case Kind::FiniteSupport: {
        const Nat s = n.shell++;
        if (s == 0) {
          cache.push_back(Element::support({}));
          break;
        }
        // Positions: ranks 0..s into the index member stream.
        while (n.idxMembers.size() < s + 1 && n.idxScan <= kStreamScanLimit) {
          const Nat c = n.idxScan++;
          if (indexSet().containsNat(c)) n.idxMembers.push_back(c);
          Budget b;
          if (indexSet().finiteness(b).isTrue() &&
              n.idxScan > (Nat{1} << 16))
            break;
        }
        const std::size_t positions =
            std::min<std::size_t>(n.idxMembers.size(), s + 1);
        if (positions == 0) break;
        auto factorSize = factor().finiteSize();
        const Nat valueCap = factorSize ? std::min<Nat>(s, *factorSize - 1) : s;
        // Non-basepoint factor elements, rank 1..valueCap.
        std::vector<Element> nb;
        for (Nat r = 0, seen = 0; seen < valueCap; ++r) {
          if (factorSize && r >= *factorSize) break;
          Element e = factor().decode(r);
          if (e == basepoint()) continue;
          nb.push_back(std::move(e));
          ++seen;
        }
        std::vector<Nat> caps(positions, std::min<Nat>(valueCap, nb.size()));
        std::vector<Nat> digits(positions, 0);
        do {
          Nat shellOf = 0;
          for (std::size_t j = 0; j < positions; ++j)
            if (digits[j] > 0) shellOf = std::max({shellOf, Nat(j), digits[j]});
          if (shellOf != s) continue;
          std::vector<std::pair<Nat, Element>> entries;
          for (std::size_t j = 0; j < positions; ++j)
            if (digits[j] > 0)
              entries.emplace_back(n.idxMembers[j], nb[digits[j] - 1]);
          cache.push_back(Element::support(std::move(entries)));
        } while (advanceCounter(digits, caps));
        break;
      }
      case Kind::Glued: {
        const Nat r = n.round++;
        auto coreSize = core().finiteSize();
        if (!coreSize || r < *coreSize)
          cache.push_back(Element::tagged(kCoreTag, core().decode(r)));
        // Tooth shell r: pairs (attach rank a, spine non-base rank t) with
        // max(a, t) == r.
        while (n.attachMembers.size() < r + 1 &&
               n.attachScan <= kStreamScanLimit) {
          auto sz = attachGround().finiteSize();
          if (sz && n.attachScan >= *sz) break;
          Element cand = attachGround().decode(n.attachScan++);
          if (attach().contains(cand)) n.attachMembers.push_back(std::move(cand));
          Budget b;
          if (attach().finiteness(b).isTrue() && n.attachScan > (Nat{1} << 16))
            break;
        }
        auto spineSize = spine().finiteSize();
        std::vector<Element> nb;
        for (Nat rank = 0, seen = 0; seen < r + 1; ++rank) {
          if (spineSize && rank >= *spineSize) break;
          Element e = spine().decode(rank);
          if (e == spineBase()) continue;
          nb.push_back(std::move(e));
          ++seen;
        }
        const Nat aMax = std::min<Nat>(n.attachMembers.size(), r + 1);
        const Nat tMax = std::min<Nat>(nb.size(), r + 1);
        for (Nat a = 0; a < aMax; ++a) {
          for (Nat t = 0; t < tMax; ++t) {
            if (std::max(a, t) != r) continue;
            cache.push_back(Element::tagged(
                kToothTag,
                Element::tuple({n.attachMembers[a], nb[t]})));
          }
        }
        break;
      }
      default:
        throw EncodingError("unreachable ground enumeration");
    }
    if (n.kind != Kind::SubsetsOf && n.shell + n.round > kStreamScanLimit)
      throw EncodingError("ground enumeration exhausted scan budget");
  }
  if (index >= cache.size())
    throw EncodingError("index beyond finite ground");
  return cache[index];
}

bool GroundSet::same(const GroundSet& other) const {
  return render() == other.render();
}

std::string GroundSet::render() const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Naturals:
      return "(nat)";
    case Kind::FinitePoints:
      return "(points " + std::to_string(n.count) + ")";
    case Kind::TupleSpace: {
      std::string out = "(tuple-space";
      for (const auto& c : n.components) out += " " + c.render();
      return out + ")";
    }
    case Kind::TaggedUnion: {
      std::string out = "(tagged-union";
      for (const auto& [t, g] : n.parts)
        out += " (" + std::to_string(t) + " " + g.render() + ")";
      return out + ")";
    }
    case Kind::SubsetsOf:
      return "(subsets-of " + universe().render() + ")";
    case Kind::FiniteSupport:
      return "(finite-support " + indexSet().render() + " " + factor().render() +
             " " + basepoint().render() + ")";
    case Kind::Glued:
      return "(glued " + core().render() + " " + attachGround().render() + " " +
             attach().render() + " " + spine().render() + " " +
             spineBase().render() + ")";
  }
  return "";
}

bool natLikeGround(const GroundSet& g) {
  return g.kind() == GroundSet::Kind::Naturals ||
         g.kind() == GroundSet::Kind::FinitePoints ||
         g.kind() == GroundSet::Kind::SubsetsOf;
}

// ---------------------------------------------------------------------------
// SetExpr

struct SetExpr::Node {
  Kind kind = Kind::Finite;
  GroundSet ground;
  // Finite
  std::vector<Element> elems;
  // EvPeriodic
  std::vector<Nat> prelude;
  Nat period = 1;
  std::vector<Nat> residues;
  Nat threshold = 0;
  // Generator
  std::string genName;
  std::function<Nat(Nat)> gen;
  mutable std::vector<Nat> genCache;
  mutable bool genSaturated = false;
  // children (Union / Intersection / Complement / Rectangle)
  std::vector<SetExpr> kids;
  // Tagged
  Nat tag = 0;
  // XorCylinder
  Nat center = 0;
  // Procedural
  std::string label;
  std::function<bool(const Element&)> pred;
};

namespace {
constexpr Nat kGenValueCap = Nat{1} << 48;
}

SetExpr::SetExpr() : node_(nullptr) { *this = finite(GroundSet::naturals(), {}); }

SetExpr SetExpr::finite(GroundSet g, std::vector<Element> elems) {
  for (const auto& e : elems)
    if (!g.valid(e))
      throw EncodingError("element " + e.render() + " invalid for ground " +
                          g.render());
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  auto node = std::make_shared<Node>();
  node->kind = Kind::Finite;
  node->ground = std::move(g);
  node->elems = std::move(elems);
  return SetExpr(std::move(node));
}

SetExpr SetExpr::finiteNats(GroundSet g, std::vector<Nat> values) {
  std::vector<Element> elems;
  elems.reserve(values.size());
  for (Nat v : values) elems.push_back(Element::nat(v));
  return finite(std::move(g), std::move(elems));
}

SetExpr SetExpr::singletonOf(GroundSet g, Element e) {
  return finite(std::move(g), {std::move(e)});
}

SetExpr SetExpr::full(GroundSet g) {
  if (g.kind() == GroundSet::Kind::Naturals)
    return evPeriodic(g, {}, 1, {0}, 0);
  if (auto size = g.finiteSize(); size && *size <= (Nat{1} << 16)) {
    std::vector<Element> elems;
    for (Nat i = 0; i < *size; ++i) elems.push_back(g.decode(i));
    return finite(std::move(g), std::move(elems));
  }
  return complementOf(finite(std::move(g), {}));
}

SetExpr SetExpr::interval(GroundSet g, Nat lo, Nat hi) {
  std::vector<Nat> vals;
  for (Nat v = lo; v <= hi; ++v) {
    if (auto s = g.finiteSize(); s && v >= *s) break;
    vals.push_back(v);
  }
  return finiteNats(std::move(g), std::move(vals));
}

SetExpr SetExpr::evPeriodic(GroundSet g, std::vector<Nat> prelude, Nat period,
                            std::vector<Nat> residues, Nat threshold) {
  if (g.kind() != GroundSet::Kind::Naturals)
    throw EncodingError("eventually periodic sets require the ℕ ground");
  if (period == 0) throw EncodingError("eventually periodic period must be positive");
  std::sort(residues.begin(), residues.end());
  residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
  for (Nat r : residues)
    if (r >= period) throw EncodingError("residue exceeds period");
  std::sort(prelude.begin(), prelude.end());
  prelude.erase(std::unique(prelude.begin(), prelude.end()), prelude.end());

  // Empty residue tail: the set is finite.
  if (residues.empty()) {
    std::vector<Nat> members;
    for (Nat p : prelude)
      if (p < threshold) members.push_back(p);
    return finiteNats(std::move(g), std::move(members));
  }

  // Fold to the minimal period: try proper divisors.
  for (Nat d = 1; d < period; ++d) {
    if (period % d != 0) continue;
    std::vector<bool> in(d, false), out(d, false);
    for (Nat r = 0; r < period; ++r) {
      const bool member = std::binary_search(residues.begin(), residues.end(), r);
      (member ? in : out)[r % d] = true;
    }
    bool consistent = true;
    for (Nat r = 0; r < d; ++r)
      if (in[r] && out[r]) {
        consistent = false;
        break;
      }
    if (consistent) {
      std::vector<Nat> folded;
      for (Nat r = 0; r < d; ++r)
        if (in[r]) folded.push_back(r);
      residues = std::move(folded);
      period = d;
      break;
    }
  }

  // Clean prelude: keep members below threshold only.
  {
    std::vector<Nat> cleaned;
    for (Nat p : prelude)
      if (p < threshold) cleaned.push_back(p);
    prelude = std::move(cleaned);
  }

  // Minimal threshold: absorb the boundary while the periodic rule agrees.
  while (threshold > 0) {
    const Nat x = threshold - 1;
    const bool inPrelude = std::binary_search(prelude.begin(), prelude.end(), x);
    const bool periodic =
        std::binary_search(residues.begin(), residues.end(), x % period);
    if (inPrelude != periodic) break;
    if (inPrelude)
      prelude.erase(std::find(prelude.begin(), prelude.end(), x));
    --threshold;
  }

  auto node = std::make_shared<Node>();
  node->kind = Kind::EvPeriodic;
  node->ground = std::move(g);
  node->prelude = std::move(prelude);
  node->period = period;
  node->residues = std::move(residues);
  node->threshold = threshold;
  return SetExpr(std::move(node));
}

SetExpr SetExpr::generator(GroundSet g, std::string name,
                           std::function<Nat(Nat)> gen) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Generator;
  node->ground = std::move(g);
  node->genName = std::move(name);
  node->gen = std::move(gen);
  return SetExpr(std::move(node));
}

namespace {

void requireSameGround(const SetExpr& a, const SetExpr& b) {
  if (!a.ground().same(b.ground()))
    throw GroundMismatchError("set operation across different grounds: " +
                              a.ground().render() + " vs " + b.ground().render());
}

bool natGround(const GroundSet& g) {
  return g.kind() == GroundSet::Kind::Naturals;
}

// Lifts a finite set over ℕ into (prelude, threshold) form.
std::pair<std::vector<Nat>, Nat> finiteToPrelude(const SetExpr& s) {
  std::vector<Nat> vals;
  for (const auto& e : s.finiteElems()) vals.push_back(e.natValue());
  const Nat thr = vals.empty() ? 0 : vals.back() + 1;
  return {std::move(vals), thr};
}

enum class BoolOp { Union, Inter, Diff };

bool applyOp(BoolOp op, bool a, bool b) {
  switch (op) {
    case BoolOp::Union: return a || b;
    case BoolOp::Inter: return a && b;
    case BoolOp::Diff: return a && !b;
  }
  return false;
}

// Exact-tier Boolean combination over ℕ; both inputs Finite or EvPeriodic.
SetExpr exactCombine(const SetExpr& a, const SetExpr& b, BoolOp op) {
  const GroundSet& g = a.ground();
  if (a.kind() == SetExpr::Kind::Finite && b.kind() == SetExpr::Kind::Finite) {
    std::vector<Element> out;
    for (const auto& e : a.finiteElems())
      if (applyOp(op, true, b.contains(e))) out.push_back(e);
    if (op == BoolOp::Union)
      for (const auto& e : b.finiteElems()) out.push_back(e);
    return SetExpr::finite(g, std::move(out));
  }
  if (op == BoolOp::Inter &&
      (a.kind() == SetExpr::Kind::Finite || b.kind() == SetExpr::Kind::Finite)) {
    const SetExpr& fin = a.kind() == SetExpr::Kind::Finite ? a : b;
    const SetExpr& other = a.kind() == SetExpr::Kind::Finite ? b : a;
    std::vector<Element> out;
    for (const auto& e : fin.finiteElems())
      if (other.contains(e)) out.push_back(e);
    return SetExpr::finite(g, std::move(out));
  }
  if (op == BoolOp::Diff && a.kind() == SetExpr::Kind::Finite) {
    std::vector<Element> out;
    for (const auto& e : a.finiteElems())
      if (!b.contains(e)) out.push_back(e);
    return SetExpr::finite(g, std::move(out));
  }
  // At least one eventually periodic side whose tail survives.
  auto period = [](const SetExpr& s) {
    return s.kind() == SetExpr::Kind::EvPeriodic ? s.evPeriod() : Nat{1};
  };
  auto thresholdOf = [](const SetExpr& s) {
    if (s.kind() == SetExpr::Kind::EvPeriodic) return s.evThreshold();
    auto [pre, thr] = finiteToPrelude(s);
    return thr;
  };
  const Nat p = std::lcm(period(a), period(b));
  const Nat thr = std::max(thresholdOf(a), thresholdOf(b));
  std::vector<Nat> prelude;
  for (Nat x = 0; x < thr; ++x)
    if (applyOp(op, a.containsNat(x), b.containsNat(x))) prelude.push_back(x);
  // Residues read off at representatives >= thr with the right congruence.
  std::vector<Nat> residues;
  for (Nat r = 0; r < p; ++r) {
    Nat rep = r;
    while (rep < thr) rep += p;
    if (applyOp(op, a.containsNat(rep), b.containsNat(rep))) residues.push_back(r);
  }
  return SetExpr::evPeriodic(g, std::move(prelude), p, std::move(residues), thr);
}

}  // namespace

SetExpr SetExpr::unionOf(SetExpr a, SetExpr b) {
  requireSameGround(a, b);
  if (a.isExact() && b.isExact() &&
      (natGround(a.ground()) ||
       (a.kind() == Kind::Finite && b.kind() == Kind::Finite)))
    return exactCombine(a, b, BoolOp::Union);
  auto node = std::make_shared<Node>();
  node->kind = Kind::Union;
  node->ground = a.ground();
  node->kids = {std::move(a), std::move(b)};
  return SetExpr(std::move(node));
}

SetExpr SetExpr::intersectionOf(SetExpr a, SetExpr b) {
  requireSameGround(a, b);
  if (a.kind() == Kind::Finite || b.kind() == Kind::Finite)
    return exactCombine(a.kind() == Kind::Finite ? a : b,
                        a.kind() == Kind::Finite ? b : a, BoolOp::Inter);
  if (a.isExact() && b.isExact() && natGround(a.ground()))
    return exactCombine(a, b, BoolOp::Inter);
  auto node = std::make_shared<Node>();
  node->kind = Kind::Intersection;
  node->ground = a.ground();
  node->kids = {std::move(a), std::move(b)};
  return SetExpr(std::move(node));
}

SetExpr SetExpr::differenceOf(SetExpr a, SetExpr b) {
  requireSameGround(a, b);
  if (a.kind() == Kind::Finite) return exactCombine(a, b, BoolOp::Diff);
  if (a.isExact() && b.isExact() && natGround(a.ground()))
    return exactCombine(a, b, BoolOp::Diff);
  return intersectionOf(std::move(a), complementOf(std::move(b)));
}

SetExpr SetExpr::complementOf(SetExpr a) {
  if (natGround(a.ground()) && a.isExact()) {
    if (a.kind() == Kind::Finite) {
      auto [prelude, thr] = finiteToPrelude(a);
      std::vector<Nat> flipped;
      for (Nat x = 0; x < thr; ++x)
        if (!std::binary_search(prelude.begin(), prelude.end(), x))
          flipped.push_back(x);
      return evPeriodic(a.ground(), std::move(flipped), 1, {0}, thr);
    }
    std::vector<Nat> residues;
    for (Nat r = 0; r < a.evPeriod(); ++r)
      if (!std::binary_search(a.evResidues().begin(), a.evResidues().end(), r))
        residues.push_back(r);
    std::vector<Nat> prelude;
    for (Nat x = 0; x < a.evThreshold(); ++x)
      if (!a.containsNat(x)) prelude.push_back(x);
    return evPeriodic(a.ground(), std::move(prelude), a.evPeriod(),
                      std::move(residues), a.evThreshold());
  }
  // Complement of complement cancels.
  if (a.kind() == Kind::Complement) return a.children()[0];
  auto node = std::make_shared<Node>();
  node->kind = Kind::Complement;
  node->ground = a.ground();
  node->kids = {std::move(a)};
  return SetExpr(std::move(node));
}

SetExpr SetExpr::rectangle(GroundSet g, std::vector<SetExpr> sides) {
  if (g.kind() != GroundSet::Kind::TupleSpace ||
      g.components().size() != sides.size())
    throw EncodingError("rectangle arity does not match tuple ground");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Rectangle;
  node->ground = std::move(g);
  node->kids = std::move(sides);
  return SetExpr(std::move(node));
}

SetExpr SetExpr::taggedSet(GroundSet g, Nat tag, SetExpr inner) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Tagged;
  node->ground = std::move(g);
  node->tag = tag;
  node->kids = {std::move(inner)};
  return SetExpr(std::move(node));
}

SetExpr SetExpr::xorCylinder(GroundSet subsetsGround, Nat center,
                             SetExpr allowed) {
  if (subsetsGround.kind() != GroundSet::Kind::SubsetsOf)
    throw EncodingError("xor cylinder requires a subsets ground");
  auto node = std::make_shared<Node>();
  node->kind = Kind::XorCylinder;
  node->ground = std::move(subsetsGround);
  node->center = center;
  node->kids = {std::move(allowed)};
  return SetExpr(std::move(node));
}

SetExpr SetExpr::procedural(GroundSet g, std::string label,
                            std::function<bool(const Element&)> pred) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::Procedural;
  node->ground = std::move(g);
  node->label = std::move(label);
  node->pred = std::move(pred);
  return SetExpr(std::move(node));
}

SetExpr::Kind SetExpr::kind() const { return node_->kind; }
const GroundSet& SetExpr::ground() const { return node_->ground; }
bool SetExpr::isExact() const {
  return node_->kind == Kind::Finite || node_->kind == Kind::EvPeriodic;
}
bool SetExpr::isEmptyFinite() const {
  return node_->kind == Kind::Finite && node_->elems.empty();
}
const std::vector<Element>& SetExpr::finiteElems() const { return node_->elems; }
Nat SetExpr::evPeriod() const { return node_->period; }
Nat SetExpr::evThreshold() const { return node_->threshold; }
const std::vector<Nat>& SetExpr::evResidues() const { return node_->residues; }
const std::vector<Nat>& SetExpr::evPrelude() const { return node_->prelude; }
const std::string& SetExpr::generatorName() const { return node_->genName; }
const std::vector<SetExpr>& SetExpr::children() const { return node_->kids; }
Nat SetExpr::tagValue() const { return node_->tag; }
Nat SetExpr::cylinderCenter() const { return node_->center; }
const SetExpr& SetExpr::cylinderAllowed() const { return node_->kids[0]; }
const std::string& SetExpr::label() const { return node_->label; }

namespace {

// Extends a generator stream until its last value is >= target or the value
// cap is hit. Streams are strictly increasing by contract.
void ensureGen(const SetExpr::Node& n, Nat target) {
  auto& cache = n.genCache;
  while (!n.genSaturated && (cache.empty() || cache.back() < target)) {
    const Nat next = n.gen(cache.size());
    if (!cache.empty() && next <= cache.back())
      throw EncodingError("generator " + n.genName + " is not strictly increasing");
    if (next > kGenValueCap) {
      n.genSaturated = true;
      break;
    }
    cache.push_back(next);
  }
}

}  // namespace

namespace {

// Structural shape of an element against a ground kind; a mismatch means a
// malformed encoding rather than a non-member.
bool shapeOk(const GroundSet& g, const Element& e) {
  switch (g.kind()) {
    case GroundSet::Kind::Naturals:
    case GroundSet::Kind::FinitePoints:
    case GroundSet::Kind::SubsetsOf:
      return e.isNat();
    case GroundSet::Kind::TupleSpace:
      return e.isTuple();
    case GroundSet::Kind::TaggedUnion:
    case GroundSet::Kind::Glued:
      return e.isTagged();
    case GroundSet::Kind::FiniteSupport:
      return e.isSupport();
  }
  return true;
}

}  // namespace

bool SetExpr::contains(const Element& e) const {
  const auto& n = *node_;
  if (!shapeOk(n.ground, e))
    throw EncodingError("element " + e.render() +
                        " is malformed for ground " + n.ground.render());
  switch (n.kind) {
    case Kind::Finite:
      return std::binary_search(n.elems.begin(), n.elems.end(), e);
    case Kind::EvPeriodic: {
      const Nat x = e.natValue();
      if (x < n.threshold)
        return std::binary_search(n.prelude.begin(), n.prelude.end(), x);
      return std::binary_search(n.residues.begin(), n.residues.end(),
                                x % n.period);
    }
    case Kind::Generator: {
      const Nat x = e.natValue();
      ensureGen(n, x);
      return std::binary_search(n.genCache.begin(), n.genCache.end(), x);
    }
    case Kind::Union:
      return n.kids[0].contains(e) || n.kids[1].contains(e);
    case Kind::Intersection:
      return n.kids[0].contains(e) && n.kids[1].contains(e);
    case Kind::Complement:
      return !n.kids[0].contains(e);
    case Kind::Rectangle: {
      if (!e.isTuple() || e.items().size() != n.kids.size()) return false;
      for (std::size_t i = 0; i < n.kids.size(); ++i)
        if (!n.kids[i].contains(e.items()[i])) return false;
      return true;
    }
    case Kind::Tagged:
      return e.isTagged() && e.tag() == n.tag && n.kids[0].contains(e.payload());
    case Kind::XorCylinder: {
      if (!e.isNat()) return false;
      Nat diff = e.natValue() ^ n.center;
      for (Nat bit = 0; diff != 0; ++bit, diff >>= 1)
        if ((diff & 1) && !n.kids[0].containsNat(bit)) return false;
      return true;
    }
    case Kind::Procedural:
      return n.pred(e);
  }
  return false;
}

Verdict SetExpr::finiteness(const Budget& budget) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Finite:
      return Verdict::yes("finite list of " + std::to_string(n.elems.size()));
    case Kind::EvPeriodic:
      // Canonical form keeps a nonempty residue tail only for infinite sets.
      return Verdict::no(std::to_string(n.residues.front()) + " mod " +
                             std::to_string(n.period),
                         "unbounded residue class");
    case Kind::Generator:
      return Verdict::no(n.genName + "(k), k unbounded",
                         "strictly increasing stream");
    case Kind::Union: {
      Verdict a = n.kids[0].finiteness(budget);
      Verdict b = n.kids[1].finiteness(budget);
      if (a.isFalse()) return a;
      if (b.isFalse()) return b;
      if (a.isTrue() && b.isTrue()) return Verdict::yes("both branches finite");
      return Verdict::unknown(budget.horizon, "union of undecided branches");
    }
    case Kind::Intersection: {
      Verdict a = n.kids[0].finiteness(budget);
      Verdict b = n.kids[1].finiteness(budget);
      if (a.isTrue()) return Verdict::yes("left branch finite");
      if (b.isTrue()) return Verdict::yes("right branch finite");
      return Verdict::unknown(budget.horizon, "intersection of infinite branches");
    }
    case Kind::Complement: {
      const SetExpr& inner = n.kids[0];
      if (auto size = n.ground.finiteSize())
        return Verdict::yes("subset of a " + std::to_string(*size) +
                            "-point ground");
      if (inner.kind() == Kind::Finite)
        return Verdict::no("any point beyond the excluded finite list",
                           "cofinite set");
      if (inner.kind() == Kind::Generator) {
        // Infinite complement certificate: a gap of width >= 2 recurs.
        ensureGen(*inner.node_, budget.horizon);
        const auto& cache = inner.node_->genCache;
        Nat gaps = 0;
        Nat lastGapAt = 0;
        Nat prev = 0;
        bool first = true;
        for (Nat v : cache) {
          if (!first && v > prev + 1) {
            ++gaps;
            lastGapAt = prev + 1;
          }
          prev = v;
          first = false;
        }
        if (gaps >= 3)
          return Verdict::no(std::to_string(lastGapAt), "recurring gaps in stream");
        return Verdict::unknown(budget.horizon, "stream nearly consecutive");
      }
      return Verdict::unknown(budget.horizon, "complement of undecided set");
    }
    case Kind::Rectangle: {
      bool allFinite = true;
      for (const auto& k : n.kids) {
        if (k.isEmptyFinite())
          return Verdict::yes("empty side");
        Verdict v = k.finiteness(budget);
        if (v.isFalse()) {
          // Finite only if some other side is empty; checked above.
          bool othersNonEmpty = true;
          for (const auto& other : n.kids)
            if (other.isEmptyFinite()) othersNonEmpty = false;
          if (othersNonEmpty)
            return Verdict::no(v.witness(), "infinite side of rectangle");
        }
        if (!v.isTrue()) allFinite = false;
      }
      if (allFinite) return Verdict::yes("all sides finite");
      return Verdict::unknown(budget.horizon, "undecided rectangle side");
    }
    case Kind::Tagged:
      return n.kids[0].finiteness(budget);
    case Kind::XorCylinder: {
      Verdict v = n.kids[0].finiteness(budget);
      if (v.isTrue()) return Verdict::yes("finitely many flippable bits");
      if (v.isFalse()) return Verdict::no(v.witness(), "unbounded flippable bits");
      return v;
    }
    case Kind::Procedural:
      return Verdict::unknown(budget.horizon, "membership-only set " + n.label);
  }
  return Verdict::unknown(budget.horizon);
}

std::vector<Element> SetExpr::membersUpTo(Nat cap) const {
  const auto& n = *node_;
  std::vector<Element> out;
  // Fast paths over ℕ.
  if (natGround(n.ground)) {
    switch (n.kind) {
      case Kind::Finite:
        for (const auto& e : n.elems)
          if (e.natValue() <= cap) out.push_back(e);
        return out;
      case Kind::EvPeriodic: {
        for (Nat p : n.prelude)
          if (p <= cap) out.push_back(Element::nat(p));
        for (Nat x = n.threshold; x <= cap; ++x)
          if (std::binary_search(n.residues.begin(), n.residues.end(),
                                 x % n.period))
            out.push_back(Element::nat(x));
        std::sort(out.begin(), out.end());
        return out;
      }
      case Kind::Generator: {
        ensureGen(n, cap);
        for (Nat v : n.genCache)
          if (v <= cap) out.push_back(Element::nat(v));
        return out;
      }
      default:
        break;
    }
  }
  const auto size = n.ground.finiteSize();
  const Nat stop = size ? std::min<Nat>(cap, *size - 1) : cap;
  for (Nat i = 0; i <= stop; ++i) {
    Element e = n.ground.decode(i);
    if (contains(e)) out.push_back(std::move(e));
    if (size && i + 1 >= *size) break;
  }
  return out;
}

std::vector<Nat> SetExpr::natMembersUpTo(Nat cap) const {
  std::vector<Nat> out;
  for (const auto& e : membersUpTo(cap)) out.push_back(e.natValue());
  return out;
}

std::optional<Nat> SetExpr::nextNatMember(Nat from, Nat scanCap) const {
  if (node_->kind == Kind::Generator) {
    ensureGen(*node_, from);
    const auto& cache = node_->genCache;
    auto it = std::lower_bound(cache.begin(), cache.end(), from);
    if (it != cache.end()) return *it;
    return std::nullopt;
  }
  for (Nat x = from; x <= from + scanCap; ++x) {
    if (auto s = ground().finiteSize(); s && x >= *s) return std::nullopt;
    if (containsNat(x)) return x;
  }
  return std::nullopt;
}

bool SetExpr::agreesUpTo(const SetExpr& other, Nat cap) const {
  const auto size = ground().finiteSize();
  const Nat stop = size ? std::min<Nat>(cap, *size - 1) : cap;
  for (Nat i = 0; i <= stop; ++i) {
    Element e = ground().decode(i);
    if (contains(e) != other.contains(e)) return false;
  }
  return true;
}

std::string SetExpr::render() const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Finite: {
      std::string out = "(finite";
      for (const auto& e : n.elems) out += " " + e.render();
      return out + ")";
    }
    case Kind::EvPeriodic: {
      std::string out = "(ap period " + std::to_string(n.period) + " residues (";
      for (std::size_t i = 0; i < n.residues.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(n.residues[i]);
      }
      out += ") threshold " + std::to_string(n.threshold) + " prelude (";
      for (std::size_t i = 0; i < n.prelude.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(n.prelude[i]);
      }
      return out + "))";
    }
    case Kind::Generator:
      return "(gen " + n.genName + ")";
    case Kind::Union:
      return "(union " + n.kids[0].render() + " " + n.kids[1].render() + ")";
    case Kind::Intersection:
      return "(inter " + n.kids[0].render() + " " + n.kids[1].render() + ")";
    case Kind::Complement:
      return "(complement " + n.kids[0].render() + ")";
    case Kind::Rectangle: {
      std::string out = "(rect";
      for (const auto& k : n.kids) out += " " + k.render();
      return out + ")";
    }
    case Kind::Tagged:
      return "(tagged " + std::to_string(n.tag) + " " + n.kids[0].render() + ")";
    case Kind::XorCylinder:
      return "(xor-cyl " + std::to_string(n.center) + " " + n.kids[0].render() +
             ")";
    case Kind::Procedural:
      return "(proc " + n.label + ")";
  }
  return "";
}

}  // namespace ballean
