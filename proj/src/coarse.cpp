#include "ballean/coarse.hpp"

#include <algorithm>
#include <set>

namespace ballean {

struct CoarsePresentation::Node {
  GroundSet ground;
  Prov tag = Prov::MetricNat;
  std::function<Entourage(Nat)> chain;
  mutable std::vector<Entourage> cache;
  Verdict countableBase;
  std::string describe;
  Payload payload;
  std::optional<SetExpr> carrier;
};

CoarsePresentation CoarsePresentation::make(GroundSet ground, Prov tag,
                                            std::function<Entourage(Nat)> chain,
                                            Verdict countableBase,
                                            std::string describe) {
  return make(std::move(ground), tag, std::move(chain), std::move(countableBase),
              std::move(describe), Payload{}, std::nullopt);
}

CoarsePresentation CoarsePresentation::make(GroundSet ground, Prov tag,
                                            std::function<Entourage(Nat)> chain,
                                            Verdict countableBase,
                                            std::string describe,
                                            Payload payload,
                                            std::optional<SetExpr> carrier) {
  auto n = std::make_shared<Node>();
  n->ground = std::move(ground);
  n->tag = tag;
  n->chain = std::move(chain);
  n->countableBase = std::move(countableBase);
  n->describe = std::move(describe);
  n->payload = std::move(payload);
  n->carrier = std::move(carrier);
  return CoarsePresentation(std::move(n));
}

const GroundSet& CoarsePresentation::ground() const { return node_->ground; }
Prov CoarsePresentation::provenance() const { return node_->tag; }
const std::string& CoarsePresentation::describe() const {
  return node_->describe;
}
const CoarsePresentation::Payload& CoarsePresentation::payload() const {
  return node_->payload;
}
const Verdict& CoarsePresentation::countableBase() const {
  return node_->countableBase;
}

Entourage CoarsePresentation::at(Nat i) const {
  auto& cache = node_->cache;
  while (cache.size() <= i) cache.push_back(node_->chain(cache.size()));
  return cache[i];
}

SetExpr CoarsePresentation::carrier() const {
  if (node_->carrier) return *node_->carrier;
  return SetExpr::full(node_->ground);
}

bool CoarsePresentation::hasProperCarrier() const {
  return node_->carrier.has_value();
}

std::vector<Element> CoarsePresentation::carrierElements(Nat cap) const {
  if (!node_->carrier) {
    std::vector<Element> out;
    const auto size = node_->ground.finiteSize();
    const Nat stop = size ? std::min<Nat>(cap, *size - 1) : cap;
    for (Nat i = 0; i <= stop; ++i) out.push_back(node_->ground.decode(i));
    return out;
  }
  return node_->carrier->membersUpTo(cap);
}

CoarsePresentation metricNat() {
  GroundSet g = GroundSet::naturals();
  CoarsePresentation::Payload payload;
  payload.ballsFinite = true;
  return CoarsePresentation::make(
      g, Prov::MetricNat, [g](Nat i) { return Entourage::metric(g, i); },
      Verdict::yes("radius chain"), "(metric-nat)", std::move(payload),
      std::nullopt);
}

CoarsePresentation boundedFinite(Nat n) {
  GroundSet g = GroundSet::finitePoints(n);
  const SetExpr all = SetExpr::full(g);
  CoarsePresentation::Payload payload;
  payload.ballsFinite = true;
  payload.boundedByConstruction = true;
  return CoarsePresentation::make(
      g, Prov::FiniteGround,
      [g, all](Nat i) {
        if (i == 0) return Entourage::metric(g, 0);
        return Entourage::block(all);
      },
      Verdict::yes("saturating chain on a finite ground"),
      "(points " + std::to_string(n) + ")", std::move(payload), std::nullopt);
}

namespace {

// Canonical enumeration of ground pairs for connecting entourages.
std::pair<Element, Element> canonicalPair(const GroundSet& g, Nat k) {
  // Shell order over (i, j).
  Nat shell = 0, seen = 0;
  const auto size = g.finiteSize();
  for (;; ++shell) {
    const Nat lim = size ? std::min<Nat>(shell, *size - 1) : shell;
    if (size && shell > 2 * *size) break;
    for (Nat i = 0; i <= lim; ++i) {
      for (Nat j = 0; j <= lim; ++j) {
        if (std::max(i, j) != shell) continue;
        if (seen++ == k) return {g.decode(i), g.decode(j)};
      }
    }
  }
  // Finite ground exhausted: wrap around.
  return {g.decode(0), g.decode(0)};
}

}  // namespace

CoarsePresentation generateStructure(GroundSet ground,
                                     std::vector<Entourage> generators) {
  GroundSet g = ground;
  std::vector<Entourage> gens = std::move(generators);
  auto chain = [g, gens](Nat i) -> Entourage {
    std::vector<Entourage> letters;
    for (const auto& gen : gens)
      letters.push_back(Entourage::unionOf(g, {gen, gen.inverted()}));
    for (Nat k = 0; k < i; ++k) {
      auto [a, b] = canonicalPair(g, k);
      letters.push_back(Entourage::finiteRel(g, {{a, b}}));
    }
    if (letters.empty()) return Entourage::metric(g, 0);
    Entourage step = Entourage::unionOf(g, std::move(letters));
    Entourage acc = step;
    for (Nat w = 1; w < i; ++w) acc = Entourage::compose(acc, step);
    return acc;
  };
  CoarsePresentation::Payload payload;
  payload.ballsFinite = true;
  return CoarsePresentation::make(std::move(ground), Prov::Generated,
                                  std::move(chain),
                                  Verdict::yes("word-length chain"),
                                  "(generated)", std::move(payload),
                                  std::nullopt);
}

CoarsePresentation restrictPresentation(const CoarsePresentation& x,
                                        SetExpr y) {
  SetExpr carrier = x.hasProperCarrier()
                        ? SetExpr::intersectionOf(x.carrier(), y)
                        : y;
  CoarsePresentation parent = x;
  CoarsePresentation::Payload payload;
  payload.parent = std::make_shared<const CoarsePresentation>(x);
  payload.subset = y;
  payload.ballsFinite = x.payload().ballsFinite;
  payload.boundedByConstruction = x.payload().boundedByConstruction;
  auto chain = [parent, y](Nat i) {
    return Entourage::restrictTo(parent.at(i), y);
  };
  return CoarsePresentation::make(
      x.ground(), Prov::Sub, std::move(chain),
      x.countableBase().isTrue()
          ? Verdict::yes("restriction of a chain-indexed base")
          : x.countableBase(),
      "(subballean " + x.describe() + " " + y.render() + ")",
      std::move(payload), std::move(carrier));
}

std::optional<Nat> relatingIndex(const CoarsePresentation& x, const Element& a,
                                 const Element& b, Nat maxIndex) {
  if (x.at(0).relates(a, b)) return Nat{0};
  for (Nat i = 1; i <= maxIndex; i *= 2) {
    if (x.at(i).relates(a, b)) {
      // Binary search the first success inside (i/2, i].
      Nat lo = i / 2 + 1, hi = i;
      while (lo < hi) {
        const Nat mid = lo + (hi - lo) / 2;
        if (x.at(mid).relates(a, b))
          hi = mid;
        else
          lo = mid + 1;
      }
      return lo;
    }
  }
  return std::nullopt;
}

namespace {

// Detects chain stabilization on a sample: the chain at index k and 2k agree
// on all sampled pairs.
bool chainStabilized(const CoarsePresentation& x,
                     const std::vector<Element>& sample, Nat k) {
  const Entourage a = x.at(k);
  const Entourage b = x.at(2 * k);
  for (const auto& p : sample)
    for (const auto& q : sample)
      if (a.relates(p, q) != b.relates(p, q)) return false;
  return true;
}

}  // namespace

Verdict isConnected(const CoarsePresentation& x, const Budget& budget) {
  const auto pts = x.carrierElements(std::min<Nat>(budget.horizon, 40));
  const Nat maxIdx = std::max<Nat>(budget.horizon, 64);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (!relatingIndex(x, pts[i], pts[j], maxIdx)) {
        if (chainStabilized(x, pts, std::max<Nat>(budget.indexCap(), 8)))
          return Verdict::no("(" + pts[i].render() + ", " + pts[j].render() + ")",
                             "no base entourage relates the pair");
        return Verdict::unknown(budget.horizon,
                                "pair (" + pts[i].render() + ", " +
                                    pts[j].render() + ") uncovered at horizon");
      }
    }
  }
  return Verdict::yes("all sampled pairs covered by base entourages");
}

Verdict isLarge(const CoarsePresentation& x, const SetExpr& y,
                const Budget& budget) {
  // Full carrier is trivially large.
  const auto pts = x.carrierElements(budget.horizon);
  // Exact path: metric over ℕ with an exact-tier set.
  if (x.provenance() == Prov::MetricNat && y.isExact()) {
    Verdict fin = y.finiteness(budget);
    if (fin.isTrue() && !y.isEmptyFinite())
      return Verdict::no("any point beyond radius of the finite set",
                         "finite sets are never large on an unbounded ground");
    if (y.isEmptyFinite()) return Verdict::no("0", "empty set");
    for (Nat i = 0; i <= budget.searchCap(); ++i) {
      const SetExpr image = applyEntourage(x.at(i), y, budget);
      if (image.isExact() &&
          SetExpr::complementOf(image).isEmptyFinite())
        return Verdict::yes("E_" + std::to_string(i) + "[Y] covers the ground");
    }
    // Exact tier, no covering radius: gaps exceed every tested radius.
  }
  // Witness sweep: for each tested index find uncovered carrier points.
  bool uncoveredEverywhere = true;
  std::string witness;
  for (Nat i = 1; i <= budget.searchCap(); i *= 2) {
    const Entourage inv = x.at(i).inverted();
    std::optional<Element> uncoveredTop;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      bool covered = false;
      if (auto pre = inv.ballList(*it, 1u << 14)) {
        for (const auto& z : *pre)
          if (y.contains(z)) {
            covered = true;
            break;
          }
      } else {
        return Verdict::unknown(budget.horizon, "inverse balls not enumerable");
      }
      if (!covered) {
        uncoveredTop = *it;
        break;
      }
    }
    if (!uncoveredTop) {
      // Everything at horizon covered by this radius; certify only on the
      // exact tier (handled above), otherwise report the horizon success.
      return Verdict::unknown(budget.horizon,
                              "covered at horizon by index " + std::to_string(i) +
                                  " without a stability certificate");
    }
    // The uncovered point must sit in the stable top window to count as
    // escaping.
    witness = uncoveredTop->render();
    if (pts.size() > 8) {
      const Element& threshold = pts[pts.size() - pts.size() / 4];
      if (Element::cmp(*uncoveredTop, threshold) < 0) uncoveredEverywhere = false;
    }
  }
  if (uncoveredEverywhere && !witness.empty())
    return Verdict::no(witness, "uncovered points persist at every tested radius");
  return Verdict::unknown(budget.horizon);
}

Verdict isCoarseMap(const std::string& name,
                    const std::function<Element(const Element&)>& f,
                    const CoarsePresentation& from, const CoarsePresentation& to,
                    const Budget& budget) {
  (void)name;
  const auto pts = from.carrierElements(std::min<Nat>(budget.horizon, 512));
  const Nat maxIdx = std::max<Nat>(budget.horizon * 2, 64);
  for (Nat i = 0; i <= budget.indexCap(); ++i) {
    const Entourage ei = from.at(i);
    Nat neededMax = 0;
    Nat neededAtMidWindow = 0;
    bool escape = false;
    std::string escapeWitness;
    for (std::size_t pi = 0; pi < pts.size(); ++pi) {
      const Element& x = pts[pi];
      auto ball = ei.ballList(x, 1u << 12);
      if (!ball)
        return Verdict::unknown(budget.horizon, "ball not enumerable at index " +
                                                    std::to_string(i));
      const Element fx = f(x);
      Nat needed = 0;
      for (const auto& yv : *ball) {
        const Element fy = f(yv);
        auto j = relatingIndex(to, fx, fy, maxIdx);
        if (!j) {
          escape = true;
          escapeWitness = "(" + std::to_string(i) + ", " + x.render() + ")";
          break;
        }
        needed = std::max(needed, *j);
      }
      if (escape) break;
      neededMax = std::max(neededMax, needed);
      if (pi == pts.size() / 2) neededAtMidWindow = neededMax;
    }
    if (escape)
      return Verdict::no(escapeWitness, "image escapes every target entourage");
    // Unbounded growth of the needed target index across the sweep window is
    // the escape certificate.
    if (pts.size() > 16 && neededMax > 4 * std::max<Nat>(neededAtMidWindow, 1) &&
        neededMax > budget.indexCap())
      return Verdict::no("(" + std::to_string(i) + ", growing image diameter)",
                         "needed target radius grows without bound");
  }
  return Verdict::yes("every tested entourage maps into a target entourage");
}

Verdict isBounded(const CoarsePresentation& x, const SetExpr& s,
                  const Budget& budget) {
  if (s.isEmptyFinite()) return Verdict::yes("empty set");
  if (x.payload().boundedByConstruction)
    return Verdict::yes("a single base entourage relates the whole carrier");
  if (x.provenance() == Prov::MetricNat) {
    Verdict fin = s.finiteness(budget);
    if (fin.isTrue()) return Verdict::yes("finite set inside a metric ball");
    if (fin.isFalse())
      return Verdict::no(fin.witness(), "metric balls are finite");
    return fin;
  }
  Verdict fin = s.finiteness(budget);
  if (fin.isFalse() && x.payload().ballsFinite)
    return Verdict::no(fin.witness(),
                       "infinite set, every base ball is finite");
  const auto members = s.membersUpTo(budget.horizon);
  if (members.empty())
    return Verdict::unknown(budget.horizon, "no members found at horizon");
  const Element& x0 = members.front();
  // A certainly finite set deserves a horizon-wide ball search; the sweep is
  // logarithmic either way.
  const Nat searchTop =
      fin.isTrue() ? std::max<Nat>(budget.horizon, budget.searchCap())
                   : budget.searchCap();
  for (Nat i = 1; i <= searchTop; i *= 2) {
    const SetExpr ball = x.at(i).ball(x0);
    // Exact inclusion decides.
    const SetExpr escape = SetExpr::differenceOf(s, ball);
    if (escape.isEmptyFinite())
      return Verdict::yes("inside ball of base index " + std::to_string(i));
    if (escape.isExact() && !escape.isEmptyFinite()) continue;
    bool allIn = true;
    for (const auto& m : members)
      if (!x.at(i).relates(x0, m)) {
        allIn = false;
        break;
      }
    if (allIn && fin.isTrue())
      return Verdict::yes("finite set inside ball of base index " +
                          std::to_string(i));
    // Covering the horizon window without a finiteness or exactness
    // certificate does not decide.
  }
  if (fin.isFalse() && x.countableBase().isTrue() && x.payload().ballsFinite)
    return Verdict::no(members.back().render(),
                       "members escape every tested base ball");
  return Verdict::unknown(budget.horizon, "no dominating ball found");
}

BornologyPresentation boundedSets(const CoarsePresentation& x) {
  switch (x.provenance()) {
    case Prov::MetricNat:
      return BornologyPresentation::finiteSubsets(x.ground());
    case Prov::FiniteGround:
      return BornologyPresentation::finiteSubsets(x.ground());
    case Prov::Down:
    case Prov::Up:
      return *x.payload().bornology;
    case Prov::Abstract:
      return *x.payload().bornology;
    case Prov::Product: {
      const auto& factors = x.payload().factors;
      BornologyPresentation acc = boundedSets(factors.front());
      for (std::size_t i = 1; i < factors.size(); ++i)
        acc = productBornology(acc, boundedSets(factors[i]));
      return acc;
    }
    case Prov::Sub: {
      const auto parent = x.payload().parent;
      return BornologyPresentation::restrictedTo(boundedSets(*parent),
                                                 *x.payload().subset);
    }
    default: {
      CoarsePresentation self = x;
      return BornologyPresentation::oracleBacked(
          x.ground(), "bounded-sets(" + x.describe() + ")",
          [self](const SetExpr& s, const Budget& b) {
            return isBounded(self, s, b);
          },
          nullptr, Verdict());
    }
  }
}

}  // namespace ballean
