#include "ballean/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ballean {

namespace {

// ---------------------------------------------------------------------------
// Distance machinery over ℕ carriers.

struct NatSetView {
  std::vector<Nat> members;

  explicit NatSetView(std::vector<Nat> ms) : members(std::move(ms)) {}
  NatSetView(const SetExpr& s, Nat cap) : members(s.natMembersUpTo(cap)) {}

  bool empty() const { return members.empty(); }

  // Distance from x to the nearest member; nullopt for an empty view.
  std::optional<Nat> dist(Nat x) const {
    if (members.empty()) return std::nullopt;
    auto it = std::lower_bound(members.begin(), members.end(), x);
    Nat best = ~Nat{0};
    if (it != members.end()) best = *it - x;
    if (it != members.begin()) best = std::min(best, x - *(it - 1));
    return best;
  }
};

// Cross-gap analysis between two member streams on ℕ: certifies asymptotic
// disjointness by monotone gap growth, refutes it by recurring bounded-gap
// events whose count grows with the window.
Verdict streamGapVerdict(const std::vector<Nat>& ys, const std::vector<Nat>& zs,
                         const Budget& budget, const std::string& what) {
  struct Event {
    Nat pos;
    Nat gap;
  };
  std::vector<Event> events;
  {
    std::vector<std::pair<Nat, int>> merged;
    for (Nat y : ys) merged.push_back({y, 0});
    for (Nat z : zs) merged.push_back({z, 1});
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
      if (merged[i].second != merged[i + 1].second)
        events.push_back({merged[i].first, merged[i + 1].first - merged[i].first});
      else if (merged[i].first == merged[i + 1].first)
        events.push_back({merged[i].first, 0});
    }
  }
  if (events.empty())
    return Verdict::unknown(budget.horizon,
                            what + ": streams do not interleave at horizon");

  // Refutation: events with gap <= 2r keep accumulating.
  for (Nat r = 1; r <= budget.radiusCap(); r *= 2) {
    Nat w1 = 0, w2 = 0, w3 = 0;
    for (const auto& e : events) {
      if (e.gap > 2 * r) continue;
      if (e.pos <= budget.horizon / 4) ++w1;
      if (e.pos <= budget.horizon / 2) ++w2;
      ++w3;
    }
    if (w3 >= 3 && w3 > w2 && w2 > w1) {
      Nat witness = 0;
      for (const auto& e : events)
        if (e.gap <= 2 * r) witness = e.pos;
      return Verdict::no(std::to_string(witness),
                         what + ": radius " + std::to_string(r) +
                             " thickenings meet cofinally");
    }
  }

  // Certification: suffix minima of the gaps grow.
  std::vector<Nat> suffixMin(events.size());
  Nat running = ~Nat{0};
  for (std::size_t i = events.size(); i-- > 0;) {
    running = std::min(running, events[i].gap);
    suffixMin[i] = running;
  }
  bool nondecreasing = true;
  for (std::size_t i = 0; i + 1 < suffixMin.size(); ++i)
    if (suffixMin[i] > suffixMin[i + 1]) nondecreasing = false;
  if (events.size() >= 4 && nondecreasing &&
      suffixMin.back() > suffixMin.front() && events.back().gap > 0)
    return Verdict::yes(what + ": cross-stream gaps grow monotonically");
  return Verdict::unknown(budget.horizon, what + ": gap pattern undetermined");
}

// Growth-vs-stability classification of violating center positions.
struct SweepOutcome {
  enum class Kind { Clean, Stable, Growing } kind = Kind::Clean;
  Nat bound = 0;        // Stable: all violations at or below this position
  Nat lastWitness = 0;  // Growing: a violation high in the sweep
};

SweepOutcome classifySweep(const std::vector<Nat>& violationPositions,
                           Nat horizon) {
  SweepOutcome out;
  if (violationPositions.empty()) return out;
  const Nat maxPos =
      *std::max_element(violationPositions.begin(), violationPositions.end());
  if (maxPos <= horizon - horizon / 4) {
    out.kind = SweepOutcome::Kind::Stable;
    out.bound = maxPos;
    return out;
  }
  Nat w1 = 0, w2 = 0, w3 = 0;
  for (Nat p : violationPositions) {
    if (p <= horizon / 4) ++w1;
    if (p <= horizon / 2) ++w2;
    ++w3;
  }
  if (w3 > w2 && w2 >= w1 && w3 >= 3) {
    out.kind = SweepOutcome::Kind::Growing;
    out.lastWitness = maxPos;
    return out;
  }
  out.kind = SweepOutcome::Kind::Stable;
  out.bound = maxPos;
  return out;
}

// ---------------------------------------------------------------------------
// Glued-carrier projections.

Element toothElem(const Element& alpha, const Element& s) {
  return Element::tagged(GroundSet::kToothTag, Element::tuple({alpha, s}));
}

SetExpr handlePart(const GroundSet& glued, const SetExpr& s) {
  return SetExpr::procedural(
      glued.core(), "(handle-part " + s.render() + ")",
      [s](const Element& x) {
        return s.contains(Element::tagged(GroundSet::kCoreTag, x));
      });
}

SetExpr spinePart(const GroundSet& glued, const SetExpr& s, const Element& alpha) {
  const Element base = glued.spineBase();
  const bool combLike = glued.core().same(glued.attachGround());
  return SetExpr::procedural(
      glued.spine(), "(spine-part " + alpha.render() + " " + s.render() + ")",
      [s, alpha, base, combLike, glued](const Element& sp) {
        if (sp == base) {
          const Element corePt =
              combLike ? alpha : glued.core().decode(0);
          return s.contains(Element::tagged(GroundSet::kCoreTag, corePt));
        }
        return s.contains(toothElem(alpha, sp));
      });
}

// Teeth touched by S at horizon, with the least spine depth seen per tooth.
std::map<Element, Nat> touchedTeeth(const GroundSet&, const SetExpr& s,
                                    Nat cap) {
  std::map<Element, Nat> out;
  for (const auto& e : s.membersUpTo(cap)) {
    if (!e.isTagged() || e.tag() != GroundSet::kToothTag) continue;
    const Element& alpha = e.payload().items()[0];
    const Element& sp = e.payload().items()[1];
    Nat depth = sp.isNat() ? sp.natValue() : 1;
    auto [it, fresh] = out.emplace(alpha, depth);
    if (!fresh) it->second = std::min(it->second, depth);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Asymptotic predicates.

Verdict asymptoticallyDisjoint(const CoarsePresentation& x, const SetExpr& y,
                               const SetExpr& z, const Budget& budget) {
  // One side bounded: every thickening of it is bounded.
  Verdict by = isBounded(x, y, budget);
  Verdict bz = isBounded(x, z, budget);
  if (by.isTrue() || bz.isTrue())
    return Verdict::yes("one side is bounded, so are its thickenings");

  if (x.provenance() == Prov::MetricNat) {
    if (y.isExact() && z.isExact()) {
      // Both infinite eventually periodic: thickenings overlap within a
      // period.
      const Nat bound = std::max<Nat>(y.evPeriod(), z.evPeriod()) + 1;
      for (Nat r = 1; r <= bound; ++r) {
        const SetExpr meet = SetExpr::intersectionOf(
            applyEntourage(x.at(r), y, budget), applyEntourage(x.at(r), z, budget));
        Verdict fin = meet.finiteness(budget);
        if (fin.isFalse())
          return Verdict::no("E_" + std::to_string(r) + "[Y] ∩ E_" +
                                 std::to_string(r) + "[Z] ⊇ " + fin.witness(),
                             "periodic thickenings overlap cofinally");
      }
      return Verdict::yes("all periodic thickenings meet finitely");
    }
    return streamGapVerdict(y.natMembersUpTo(budget.horizon),
                            z.natMembersUpTo(budget.horizon), budget,
                            "metric streams");
  }

  if (x.provenance() == Prov::Down) {
    const SetExpr meet = SetExpr::intersectionOf(y, z);
    Verdict member = x.payload().bornology->member(meet, budget);
    if (member.isTrue())
      return Verdict::yes(
          "Y ∩ Z is bounded and each block adds one bounded set");
    if (member.isFalse())
      return Verdict::no("Y ∩ Z ⊇ " + member.witness(),
                         "the intersection itself is unbounded");
    return Verdict::unknown(budget.horizon, member.note());
  }

  if (x.ground().kind() == GroundSet::Kind::Glued &&
      !x.payload().factors.empty()) {
    const GroundSet& g = x.ground();
    const CoarsePresentation& spine = x.payload().factors.front();
    auto ty = touchedTeeth(g, y, budget.horizon);
    auto tz = touchedTeeth(g, z, budget.horizon);
    // Shared teeth: the projections must be asymptotically disjoint there.
    for (const auto& [alpha, dy] : ty) {
      auto it = tz.find(alpha);
      if (it == tz.end()) continue;
      Verdict v = asymptoticallyDisjoint(spine, spinePart(g, y, alpha),
                                         spinePart(g, z, alpha), budget);
      if (v.isFalse())
        return Verdict::no("tooth " + alpha.render() + ": " + v.witness(),
                           "projections overlap on a shared spine");
      if (!v.isTrue())
        return Verdict::unknown(budget.horizon,
                                "shared spine " + alpha.render() + ": " + v.note());
    }
    const bool combLike = g.core().same(g.attachGround());
    if (!combLike)
      return Verdict::yes(
          "shared spines are asymptotically disjoint and everything else "
          "meets inside the wedge ball");
    // Comb: handle shadows (handle points plus touched teeth bases).
    auto shadow = [&](const SetExpr& s,
                      const std::map<Element, Nat>& teeth) -> std::vector<Nat> {
      std::vector<Nat> out = handlePart(g, s).natMembersUpTo(budget.horizon);
      for (const auto& [alpha, depth] : teeth)
        if (alpha.isNat()) out.push_back(alpha.natValue());
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    };
    const auto sy = shadow(y, ty);
    const auto sz = shadow(z, tz);
    if (sy.empty() || sz.empty() ||
        (sy.size() + sz.size() < 8 &&
         sy.back() + sz.back() < budget.horizon / 2))
      return Verdict::yes("handle shadows are bounded; teeth are separated");
    Verdict v = streamGapVerdict(sy, sz, budget, "handle shadows");
    if (v.isTrue())
      return Verdict::yes("teeth separated and handle shadows gap-grow");
    if (v.isFalse()) return v;
    return Verdict::unknown(budget.horizon, v.note());
  }

  return Verdict::unknown(budget.horizon,
                          "no certification strategy for this presentation");
}

Verdict isAsymptoticNeighborhood(const CoarsePresentation& x, const SetExpr& y,
                                 const SetExpr& u, const Budget& budget) {
  if (u.isExact() || u.kind() == SetExpr::Kind::EvPeriodic) {
    const SetExpr uc = SetExpr::complementOf(u);
    if (uc.isEmptyFinite()) return Verdict::yes("U is the whole carrier");
  }

  if (x.provenance() == Prov::MetricNat && y.isExact() && u.isExact()) {
    const Nat bound = std::max<Nat>(y.evPeriod(), 1) + 1;
    for (Nat r = 1; r <= bound + budget.radiusCap(); ++r) {
      const SetExpr escape =
          SetExpr::differenceOf(applyEntourage(x.at(r), y, budget), u);
      Verdict fin = escape.finiteness(budget);
      if (fin.isFalse())
        return Verdict::no("E_" + std::to_string(r) + "[Y] \\ U ⊇ " +
                               fin.witness(),
                           "unbounded escape at radius " + std::to_string(r));
      if (!fin.isTrue()) return Verdict::unknown(budget.horizon, fin.note());
    }
    return Verdict::yes("periodic escape sets are finite at every radius");
  }

  if (x.provenance() == Prov::Down) {
    const SetExpr escape = SetExpr::differenceOf(y, u);
    Verdict member = x.payload().bornology->member(escape, budget);
    if (member.isTrue())
      return Verdict::yes("Y \\ U bounded; each block adds one bounded set");
    if (member.isFalse())
      return Verdict::no("Y \\ U ⊇ " + member.witness(),
                         "escape before any thickening");
    return Verdict::unknown(budget.horizon, member.note());
  }

  // Sweep: violations are points of E_r[Y] \ U at horizon.
  const auto pts = x.carrierElements(std::min<Nat>(budget.horizon, 4096));
  for (Nat r = 1; r <= budget.radiusCap(); r *= 2) {
    const Entourage inv = x.at(r).inverted();
    std::vector<Nat> violations;
    for (std::size_t rank = 0; rank < pts.size(); ++rank) {
      const Element& p = pts[rank];
      if (u.contains(p)) continue;
      auto pre = inv.ballList(p, 1u << 12);
      if (!pre)
        return Verdict::unknown(budget.horizon, "inverse balls not enumerable");
      for (const auto& q : *pre)
        if (y.contains(q)) {
          violations.push_back(rank);
          break;
        }
    }
    auto outcome = classifySweep(violations, pts.size() ? pts.size() - 1 : 0);
    if (outcome.kind == SweepOutcome::Kind::Growing)
      return Verdict::no(pts[outcome.lastWitness].render(),
                         "escape keeps growing at radius " + std::to_string(r));
  }
  return Verdict::yes("escape sets stay inside a bounded prefix at horizon");
}

SeparatedResult asymptoticallySeparated(const CoarsePresentation& x,
                                        const SetExpr& y, const SetExpr& z,
                                        const Budget& budget) {
  SeparatedResult result;
  Verdict disjoint = asymptoticallyDisjoint(x, y, z, budget);
  if (disjoint.isFalse()) {
    result.verdict =
        Verdict::no(disjoint.witness(), "not asymptotically disjoint");
    return result;
  }
  if (disjoint.isUnknown()) {
    result.verdict = Verdict::unknown(budget.horizon, disjoint.note());
    return result;
  }

  SetExpr u = SetExpr::empty(x.ground());
  SetExpr v = SetExpr::empty(x.ground());
  if (x.provenance() == Prov::Down) {
    u = y;
    v = z;
  } else if (x.provenance() == Prov::MetricNat) {
    auto yv = std::make_shared<NatSetView>(y, budget.scanCap());
    auto zv = std::make_shared<NatSetView>(z, budget.scanCap());
    u = SetExpr::procedural(x.ground(), "(voronoi-le " + y.render() + ")",
                            [yv, zv](const Element& e) {
                              const Nat p = e.natValue();
                              auto dy = yv->dist(p);
                              auto dz = zv->dist(p);
                              if (!dy) return false;
                              if (!dz) return true;
                              return *dy <= *dz;
                            });
    v = SetExpr::complementOf(u);
  } else {
    // Separator-level split.
    try {
      SlowFunction f = synthesizeSeparator(x, y, z, budget);
      const Rational half(1, 2);
      auto fn = f.eval;
      u = SetExpr::procedural(x.ground(), "(separator-low)",
                              [fn, half](const Element& e) { return fn(e) < half; });
      v = SetExpr::complementOf(u);
    } catch (const std::exception& ex) {
      result.verdict = Verdict::unknown(budget.horizon, ex.what());
      return result;
    }
  }
  Verdict nu = isAsymptoticNeighborhood(x, y, u, budget);
  Verdict nv = isAsymptoticNeighborhood(x, z, v, budget);
  if (nu.isTrue() && nv.isTrue()) {
    result.verdict = Verdict::yes("disjoint asymptotic neighbourhoods found");
    result.u = u;
    result.v = v;
    return result;
  }
  if (nu.isFalse() || nv.isFalse()) {
    result.verdict = Verdict::unknown(
        budget.horizon, "candidate neighbourhoods rejected: " +
                            (nu.isFalse() ? nu.note() : nv.note()));
    return result;
  }
  result.verdict = Verdict::unknown(budget.horizon, nu.isUnknown() ? nu.note()
                                                                   : nv.note());
  return result;
}

Verdict isSlowlyOscillating(const CoarsePresentation& x, const SlowFunction& f,
                            const Rational& eps, const Budget& budget) {
  Nat exceptionalBound = 0;

  if (x.provenance() == Prov::MetricNat) {
    const Nat h = budget.horizon;
    const Nat maxR = budget.radiusCap();
    std::vector<Rational> vals;
    vals.reserve(h + maxR + 1);
    for (Nat i = 0; i <= h + maxR; ++i) vals.push_back(f.eval(Element::nat(i)));
    for (Nat r = 1; r <= maxR; r *= 2) {
      std::vector<Nat> violations;
      for (Nat c = 0; c <= h; ++c) {
        const Nat lo = c > r ? c - r : 0;
        const Nat hi = c + r;
        Rational mn = vals[lo], mx = vals[lo];
        for (Nat i = lo + 1; i <= hi; ++i) {
          if (vals[i] < mn) mn = vals[i];
          if (mx < vals[i]) mx = vals[i];
        }
        if (!(mx - mn < eps)) violations.push_back(c);
      }
      auto outcome = classifySweep(violations, h);
      if (outcome.kind == SweepOutcome::Kind::Growing)
        return Verdict::no(std::to_string(outcome.lastWitness),
                           "radius " + std::to_string(r) +
                               " image diameters exceed eps cofinally");
      if (outcome.kind == SweepOutcome::Kind::Stable)
        exceptionalBound = std::max(exceptionalBound, outcome.bound);
    }
    return Verdict::yes("slowly oscillating at horizon; exceptional bound " +
                        std::to_string(exceptionalBound));
  }

  const auto pts = x.carrierElements(std::min<Nat>(budget.horizon, 2048));
  for (Nat r = 1; r <= budget.radiusCap(); r *= 2) {
    const Entourage er = x.at(r);
    std::vector<Nat> violations;
    for (std::size_t rank = 0; rank < pts.size(); ++rank) {
      auto ball = er.ballList(pts[rank], 1u << 12);
      if (!ball)
        return Verdict::unknown(budget.horizon, "ball not enumerable");
      Rational mn(1), mx(0);
      bool first = true;
      for (const auto& q : *ball) {
        const Rational val = f.eval(q);
        if (first) {
          mn = mx = val;
          first = false;
        } else {
          if (val < mn) mn = val;
          if (mx < val) mx = val;
        }
      }
      if (!(mx - mn < eps)) violations.push_back(rank);
    }
    auto outcome = classifySweep(violations, pts.size() ? pts.size() - 1 : 0);
    if (outcome.kind == SweepOutcome::Kind::Growing)
      return Verdict::no(pts[outcome.lastWitness].render(),
                         "image diameters exceed eps cofinally at radius " +
                             std::to_string(r));
    if (outcome.kind == SweepOutcome::Kind::Stable)
      exceptionalBound = std::max(exceptionalBound, outcome.bound);
  }
  return Verdict::yes("slowly oscillating at horizon; exceptional rank bound " +
                      std::to_string(exceptionalBound));
}

namespace {

// Ratio separator on a ℕ carrier: dist(x,Y) / (dist(x,Y) + dist(x,Z)),
// saturating to the indicator values when one side is empty.
std::function<Rational(const Element&)> ratioSeparator(
    std::shared_ptr<NatSetView> yv, std::shared_ptr<NatSetView> zv) {
  return [yv, zv](const Element& e) -> Rational {
    const Nat p = e.natValue();
    auto dy = yv->dist(p);
    auto dz = zv->dist(p);
    if (!dy && !dz) return Rational(1, 2);
    if (!dy) return Rational(1);
    if (!dz) return Rational(0);
    if (*dy == 0 && *dz == 0) return Rational(1, 2);
    return Rational(static_cast<std::int64_t>(*dy),
                    static_cast<std::int64_t>(*dy + *dz));
  };
}

}  // namespace

SlowFunction synthesizeSeparator(const CoarsePresentation& x, const SetExpr& y,
                                 const SetExpr& z, const Budget& budget) {
  // Disjointness of the inputs themselves.
  const SetExpr meet = SetExpr::intersectionOf(y, z);
  if (meet.isExact() && !meet.isEmptyFinite())
    throw PreconditionError("separator inputs intersect: " +
                            meet.finiteElems().front().render());
  if (!meet.isExact() && !meet.membersUpTo(budget.horizon).empty())
    throw PreconditionError("separator inputs intersect at " +
                            meet.membersUpTo(budget.horizon).front().render());
  Verdict disjoint = asymptoticallyDisjoint(x, y, z, budget);
  if (disjoint.isFalse())
    throw PreconditionError("inputs are not asymptotically disjoint: " +
                            disjoint.witness());
  if (disjoint.isUnknown())
    throw DomainError("separator refused: asymptotic disjointness unknown (" +
                      disjoint.note() + ")");

  if (x.provenance() == Prov::Down) {
    SetExpr zz = z;
    return SlowFunction{
        "indicator", "indicator",
        [zz](const Element& e) { return zz.contains(e) ? Rational(1) : Rational(0); }};
  }

  if (x.provenance() == Prov::MetricNat) {
    auto yv = std::make_shared<NatSetView>(y, budget.scanCap());
    auto zv = std::make_shared<NatSetView>(z, budget.scanCap());
    return SlowFunction{"ratio", "metric-quotient", ratioSeparator(yv, zv)};
  }

  if (x.ground().kind() == GroundSet::Kind::Glued) {
    const GroundSet g = x.ground();
    const bool combLike = g.core().same(g.attachGround());
    // Basepoint value: constrained only when the wedge point belongs to an
    // input; otherwise the symmetric choice.
    const Element corePoint = g.core().decode(0);
    const Element coreElem = Element::tagged(GroundSet::kCoreTag, corePoint);
    Rational baseValue(1, 2);
    if (!combLike) {
      if (y.contains(coreElem)) baseValue = Rational(0);
      if (z.contains(coreElem)) baseValue = Rational(1);
    }

    // Handle values: comb uses the shadow ratio, the wedge uses the constant.
    std::function<Rational(const Element&)> handleValue;
    if (combLike) {
      auto ty = touchedTeeth(g, y, budget.horizon);
      auto tz = touchedTeeth(g, z, budget.horizon);
      auto shadowMembers = [&](const SetExpr& s,
                               const std::map<Element, Nat>& teeth) {
        std::vector<Nat> out = handlePart(g, s).natMembersUpTo(budget.scanCap());
        for (const auto& [alpha, depth] : teeth)
          if (alpha.isNat()) out.push_back(alpha.natValue());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
      };
      auto yv = std::make_shared<NatSetView>(shadowMembers(y, ty));
      auto zv = std::make_shared<NatSetView>(shadowMembers(z, tz));
      handleValue = ratioSeparator(yv, zv);
    } else {
      const Rational bv = baseValue;
      handleValue = [bv](const Element&) { return bv; };
    }

    // Per-spine separators, built lazily and cached per tooth.
    auto cache = std::make_shared<
        std::map<Element, std::function<Rational(const Element&)>>>();
    const SetExpr yy = y;
    const SetExpr zz = z;
    const Budget b = budget;
    auto spineFn = [g, yy, zz, b, cache, handleValue,
                    combLike](const Element& alpha)
        -> const std::function<Rational(const Element&)>& {
      auto it = cache->find(alpha);
      if (it != cache->end()) return it->second;
      const SetExpr ys = spinePart(g, yy, alpha);
      const SetExpr zs = spinePart(g, zz, alpha);
      auto yv = std::make_shared<NatSetView>(ys, b.scanCap());
      auto zv = std::make_shared<NatSetView>(zs, b.scanCap());
      std::function<Rational(const Element&)> fn;
      if (yv->empty() && zv->empty()) {
        // Untouched tooth: constant at the handle value of its base.
        const Rational c =
            combLike ? handleValue(alpha) : Rational(1, 2);
        fn = [c](const Element&) { return c; };
      } else {
        fn = ratioSeparator(yv, zv);
      }
      return cache->emplace(alpha, std::move(fn)).first->second;
    };

    const Rational bv = baseValue;
    auto eval = [g, handleValue, spineFn, bv](const Element& e) -> Rational {
      if (e.tag() == GroundSet::kCoreTag) {
        if (g.core().same(g.attachGround())) return handleValue(e.payload());
        return bv;
      }
      const Element& alpha = e.payload().items()[0];
      const Element& sp = e.payload().items()[1];
      return spineFn(alpha)(sp);
    };
    SlowFunction out{combLike ? "comb-split" : "glued", "glued", eval};

    // Pointwise contract at horizon.
    for (const auto& m : y.membersUpTo(budget.horizon))
      if (out.eval(m) != Rational(0))
        throw DomainError("separator misses Y -> 0 at " + m.render());
    for (const auto& m : z.membersUpTo(budget.horizon))
      if (out.eval(m) != Rational(1))
        throw DomainError("separator misses Z -> 1 at " + m.render());
    return out;
  }

  throw UnsupportedPresentationError(
      "no separator synthesis strategy for this presentation");
}

Verdict isDiscrete(const CoarsePresentation& x, const Budget& budget) {
  // Defined for unbounded balleans only.
  if (x.provenance() == Prov::Down) {
    Verdict unb = x.payload().bornology->unbounded(budget);
    if (unb.isFalse())
      throw DomainError("discreteness is defined for unbounded balleans");
    return Verdict::yes("balls are singletons outside each block");
  }
  if (x.ground().finiteSize())
    throw DomainError("discreteness is defined for unbounded balleans");

  const auto pts = x.carrierElements(std::min<Nat>(budget.horizon, 4096));
  Nat bound = 0;
  for (Nat r = 1; r <= budget.radiusCap(); r *= 2) {
    const Entourage er = x.at(r);
    std::vector<Nat> nonSingleton;
    for (std::size_t rank = 0; rank < pts.size(); ++rank) {
      auto ball = er.ballList(pts[rank], 64);
      if (ball) {
        if (ball->size() > 1) nonSingleton.push_back(rank);
      } else {
        nonSingleton.push_back(rank);
      }
    }
    auto outcome = classifySweep(nonSingleton, pts.size() ? pts.size() - 1 : 0);
    if (outcome.kind == SweepOutcome::Kind::Growing)
      return Verdict::no(pts[outcome.lastWitness].render(),
                         "non-singleton balls persist cofinally at radius " +
                             std::to_string(r));
    if (outcome.kind == SweepOutcome::Kind::Stable)
      bound = std::max(bound, outcome.bound);
  }
  return Verdict::yes("balls become singletons beyond rank " +
                      std::to_string(bound));
}

Verdict isAntidiscrete(const CoarsePresentation& x,
                       const std::vector<Entourage>& witnesses,
                       const Budget& budget) {
  if (x.provenance() == Prov::Up)
    return Verdict::yes("largest compatible structure by construction");
  const BornologyPresentation bounded = boundedSets(x);
  for (const auto& w : witnesses) {
    Verdict admissible = largestMembership(bounded, w, budget);
    if (!admissible.isTrue()) continue;
    // Is the witness dominated by some base entourage?
    const auto pts = x.carrierElements(std::min<Nat>(budget.horizon, 2048));
    bool dominatedSomewhere = false;
    bool escapeEverywhere = true;
    for (Nat i = 1; i <= budget.searchCap() && !dominatedSomewhere; i *= 2) {
      const Entourage ei = x.at(i);
      std::vector<Nat> escapes;
      for (std::size_t rank = 0; rank < pts.size(); ++rank) {
        auto wb = w.ballList(pts[rank], 1u << 10);
        if (!wb) return Verdict::unknown(budget.horizon, "witness ball too big");
        for (const auto& q : *wb)
          if (!ei.relates(pts[rank], q)) {
            escapes.push_back(rank);
            break;
          }
      }
      if (escapes.empty()) {
        dominatedSomewhere = true;
        break;
      }
      auto outcome = classifySweep(escapes, pts.size() ? pts.size() - 1 : 0);
      if (outcome.kind != SweepOutcome::Kind::Growing) escapeEverywhere = false;
    }
    if (!dominatedSomewhere && escapeEverywhere)
      return Verdict::no(w.render(),
                         "admissible witness escapes every base entourage");
  }
  return Verdict::unknown(budget.horizon,
                          "equality with the largest structure ranges over all "
                          "admissible relations");
}

Verdict ultranormalSearch(const CoarsePresentation& x,
                          const std::vector<SetExpr>& catalog,
                          const Budget& budget) {
  Nat scanned = 0;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    for (std::size_t j = i + 1; j < catalog.size(); ++j) {
      ++scanned;
      if (!isBounded(x, catalog[i], budget).isFalse()) continue;
      if (!isBounded(x, catalog[j], budget).isFalse()) continue;
      Verdict v = asymptoticallyDisjoint(x, catalog[i], catalog[j], budget);
      if (v.isTrue())
        return Verdict::no("(" + catalog[i].render() + ", " +
                               catalog[j].render() + ")",
                           "unbounded asymptotically disjoint pair");
    }
  }
  return Verdict::unknown(budget.horizon,
                          std::to_string(scanned) +
                              " catalog pairs scanned without a verdict");
}

// ---------------------------------------------------------------------------
// Property report.

const char* propertyName(Property p) {
  switch (p) {
    case Property::Bounded: return "bounded";
    case Property::Connected: return "connected";
    case Property::Metrizable: return "metrizable";
    case Property::Normal: return "normal";
    case Property::Discrete: return "discrete";
    case Property::Antidiscrete: return "antidiscrete";
    case Property::Ultranormal: return "ultranormal";
  }
  return "?";
}

void PropertyReport::assign(Property p, Verdict v, std::string why) {
  auto it = entries_.find(p);
  if (it != entries_.end()) {
    const Truth prev = it->second.verdict.value();
    if (prev == Truth::Unknown) {
      if (!v.isUnknown()) entries_[p] = Entry{std::move(v), std::move(why)};
      return;
    }
    if (v.isUnknown()) return;
    if (v.value() != prev)
      throw InconsistencyError(std::string("rule collision on ") +
                               propertyName(p) + ": " + it->second.why +
                               " vs " + why);
    return;
  }
  entries_[p] = Entry{std::move(v), std::move(why)};
}

const PropertyReport::Entry* PropertyReport::find(Property p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string PropertyReport::render(const std::string& name) const {
  static const Property order[] = {
      Property::Bounded,    Property::Connected,    Property::Metrizable,
      Property::Normal,     Property::Discrete,     Property::Antidiscrete,
      Property::Ultranormal};
  std::string out;
  for (Property p : order) {
    const Entry* e = find(p);
    out += name + ": " + propertyName(p) + ": ";
    if (!e) {
      out += "UNKNOWN [no rule fired]\n";
      continue;
    }
    out += truthName(e->verdict.value());
    out += " [" + e->why;
    if (e->verdict.isFalse() && !e->verdict.witness().empty())
      out += "; witness " + e->verdict.witness();
    out += "]\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ballean expressions.

struct BalleanExpr::Node {
  Kind kind = Kind::MetricNat;
  Nat points = 0;
  std::optional<BornologyPresentation> bornology;
  std::vector<Entourage> witnesses;
  std::vector<BalleanExpr> factors;
  std::optional<ExprFamily> family;
  std::shared_ptr<const BalleanExpr> parent;
  std::optional<SetExpr> subset;
};

BalleanExpr BalleanExpr::metricNatExpr() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::MetricNat;
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::finitePoints(Nat count) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::FinitePointsB;
  n->points = count;
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::down(BornologyPresentation b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Down;
  n->bornology = std::move(b);
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::up(BornologyPresentation b,
                            std::vector<Entourage> witnesses) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Up;
  n->bornology = std::move(b);
  n->witnesses = std::move(witnesses);
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::abstractBallean(BornologyPresentation b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::AbstractB;
  n->bornology = std::move(b);
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::product(std::vector<BalleanExpr> factors) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->factors = std::move(factors);
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::bProductExpr(BornologyPresentation b, ExprFamily family) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::BProduct;
  n->bornology = std::move(b);
  n->family = std::move(family);
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::macrocubeExpr(BornologyPresentation b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Macrocube;
  n->bornology = std::move(b);
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::bouquetExpr(BornologyPresentation b, ExprFamily family) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Bouquet;
  n->bornology = std::move(b);
  n->family = std::move(family);
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::combExpr(BalleanExpr handle, SetExpr attach,
                                  ExprFamily spines) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Comb;
  n->parent = std::make_shared<const BalleanExpr>(std::move(handle));
  n->subset = std::move(attach);
  n->family = std::move(spines);
  return BalleanExpr(std::move(n));
}
BalleanExpr BalleanExpr::subballean(BalleanExpr parent, SetExpr subset) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sub;
  n->parent = std::make_shared<const BalleanExpr>(std::move(parent));
  n->subset = std::move(subset);
  return BalleanExpr(std::move(n));
}

BalleanExpr::Kind BalleanExpr::kind() const { return node_->kind; }
Nat BalleanExpr::pointCount() const { return node_->points; }
const BornologyPresentation& BalleanExpr::bornology() const {
  return *node_->bornology;
}
const std::vector<BalleanExpr>& BalleanExpr::factors() const {
  return node_->factors;
}
const BalleanExpr::ExprFamily& BalleanExpr::family() const {
  return *node_->family;
}
const BalleanExpr& BalleanExpr::parent() const { return *node_->parent; }
const SetExpr& BalleanExpr::subset() const { return *node_->subset; }
const std::vector<Entourage>& BalleanExpr::witnesses() const {
  return node_->witnesses;
}

bool BalleanExpr::concrete() const {
  switch (node_->kind) {
    case Kind::AbstractB:
      return false;
    case Kind::Down:
    case Kind::Up:
      return node_->bornology->baseMemberAt(0).has_value();
    case Kind::Product: {
      for (const auto& f : node_->factors)
        if (!f.concrete()) return false;
      return true;
    }
    case Kind::BProduct:
    case Kind::Bouquet: {
      if (!node_->bornology->baseMemberAt(0)) return false;
      if (node_->family->kind == ExprFamily::Kind::Uniform)
        return node_->family->uniform->concrete();
      for (const auto& m : node_->family->members)
        if (!m.concrete()) return false;
      return true;
    }
    case Kind::Macrocube:
      return node_->bornology->baseMemberAt(0).has_value();
    case Kind::Comb: {
      if (!node_->parent->concrete()) return false;
      if (node_->family->kind == ExprFamily::Kind::Uniform)
        return node_->family->uniform->concrete();
      return false;
    }
    case Kind::Sub:
      return node_->parent->concrete();
    default:
      return true;
  }
}

namespace {

FamilySpec toFamilySpec(const BalleanExpr::ExprFamily& f, const Budget& budget) {
  if (f.kind == BalleanExpr::ExprFamily::Kind::Uniform) {
    Pointed p{f.uniform->build(budget), f.uniformBase};
    return FamilySpec::uniformOver(std::move(p), f.indexSet);
  }
  std::vector<Pointed> members;
  for (std::size_t i = 0; i < f.members.size(); ++i)
    members.push_back(Pointed{f.members[i].build(budget),
                              i < f.basepoints.size() ? f.basepoints[i]
                                                      : Element::nat(0)});
  return FamilySpec::explicitList(std::move(members));
}

}  // namespace

CoarsePresentation BalleanExpr::build(const Budget& budget) const {
  switch (node_->kind) {
    case Kind::MetricNat:
      return metricNat();
    case Kind::FinitePointsB:
      return boundedFinite(node_->points);
    case Kind::Down:
      return smallestCompatible(*node_->bornology);
    case Kind::Up:
      return largestCompatible(*node_->bornology, node_->witnesses);
    case Kind::AbstractB: {
      BornologyPresentation b = *node_->bornology;
      CoarsePresentation::Payload payload;
      payload.bornology = b;
      Verdict cb = b.countableBase();
      return CoarsePresentation::make(
          b.ground(), Prov::Abstract,
          [b](Nat) -> Entourage {
            throw UnsupportedPresentationError(
                "abstract ballean has no computable entourages");
          },
          cb, "(abstract-ballean " + b.render() + ")", std::move(payload),
          std::nullopt);
    }
    case Kind::Product: {
      std::vector<CoarsePresentation> built;
      for (const auto& f : node_->factors) built.push_back(f.build(budget));
      return productOf(std::move(built));
    }
    case Kind::BProduct:
      return bProduct(*node_->bornology, toFamilySpec(*node_->family, budget),
                      budget);
    case Kind::Macrocube:
      return macrocube(*node_->bornology, budget);
    case Kind::Bouquet:
      return bouquet(*node_->bornology, toFamilySpec(*node_->family, budget),
                     budget);
    case Kind::Comb:
      return comb(node_->parent->build(budget), *node_->subset,
                  toFamilySpec(*node_->family, budget), budget);
    case Kind::Sub:
      return restrictPresentation(node_->parent->build(budget), *node_->subset);
  }
  throw DomainError("unreachable ballean expression");
}

std::string BalleanExpr::render() const {
  switch (node_->kind) {
    case Kind::MetricNat:
      return "(metric-nat)";
    case Kind::FinitePointsB:
      return "(points " + std::to_string(node_->points) + ")";
    case Kind::Down:
      return "(down " + node_->bornology->render() + ")";
    case Kind::Up:
      return "(up " + node_->bornology->render() + ")";
    case Kind::AbstractB:
      return "(abstract-ballean " + node_->bornology->render() + ")";
    case Kind::Product: {
      std::string out = "(product";
      for (const auto& f : node_->factors) out += " " + f.render();
      return out + ")";
    }
    case Kind::BProduct:
      return "(b-product " + node_->bornology->render() + " " +
             (node_->family->kind == ExprFamily::Kind::Uniform
                  ? node_->family->uniform->render()
                  : std::string("explicit")) +
             ")";
    case Kind::Macrocube:
      return "(macrocube " + node_->bornology->render() + ")";
    case Kind::Bouquet:
      return "(bouquet " + node_->bornology->render() + " " +
             (node_->family->kind == ExprFamily::Kind::Uniform
                  ? node_->family->uniform->render()
                  : std::string("explicit")) +
             ")";
    case Kind::Comb:
      return "(comb " + node_->parent->render() + " " + node_->subset->render() +
             ")";
    case Kind::Sub:
      return "(subballean " + node_->parent->render() + " " +
             node_->subset->render() + ")";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Inference.

namespace {

struct InferInfo {
  PropertyReport rep;
  std::optional<BornologyPresentation::Invariants> inv;
  // Classification of the node as a family member.
  Verdict bounded;
  Verdict metrizable;
  Verdict normal;
  bool singleton = false;
};

InferInfo inferNode(const BalleanExpr& e, const Budget& budget);

void finishCommon(InferInfo& info) {
  if (const auto* b = info.rep.find(Property::Bounded))
    info.bounded = b->verdict;
  if (const auto* m = info.rep.find(Property::Metrizable))
    info.metrizable = m->verdict;
  if (const auto* n = info.rep.find(Property::Normal)) info.normal = n->verdict;
}

// metrizable => normal; bounded => metrizable.
void propagateImplications(PropertyReport& rep) {
  if (const auto* b = rep.find(Property::Bounded); b && b->verdict.isTrue())
    rep.assign(Property::Metrizable,
               Verdict::yes("a largest entourage is a countable base"),
               "Thm 1 via boundedness");
  if (const auto* m = rep.find(Property::Metrizable); m && m->verdict.isTrue())
    rep.assign(Property::Normal,
               Verdict::yes("linearly ordered bases separate"),
               "metrizable balleans are normal");
  if (const auto* n = rep.find(Property::Normal); n && n->verdict.isFalse())
    rep.assign(Property::Metrizable,
               Verdict::no(n->verdict.witness(), "not normal"),
               "metrizable balleans are normal (contrapositive)");
}

InferInfo inferMetricNat() {
  InferInfo info;
  info.rep.assign(Property::Bounded,
                  Verdict::no("balls are finite, the ground is not", ""),
                  "metric balls are finite intervals");
  info.rep.assign(Property::Connected, Verdict::yes(""), "radius |x-y| relates any pair");
  info.rep.assign(Property::Metrizable, Verdict::yes(""), "Thm 1: the radius chain is a countable base");
  info.rep.assign(Property::Normal, Verdict::yes(""), "metrizable, hence normal");
  info.rep.assign(Property::Discrete,
                  Verdict::no("radius-1 balls are never singletons", ""),
                  "pseudodiscreteness criterion fails");
  info.rep.assign(Property::Antidiscrete,
                  Verdict::no("(pair-fn double)", ""),
                  "an admissible witness escapes every radius");
  info.rep.assign(Property::Ultranormal,
                  Verdict::no("powers of 4 against their doubles", ""),
                  "unbounded asymptotically disjoint pair exists");
  BornologyPresentation::Invariants inv;
  inv.justification = "finite subsets of the naturals";
  info.inv = inv;
  finishCommon(info);
  return info;
}

InferInfo inferFinitePoints(Nat n) {
  InferInfo info;
  info.singleton = n <= 1;
  info.rep.assign(Property::Bounded, Verdict::yes(""), "finite carrier");
  info.rep.assign(Property::Connected, Verdict::yes(""), "full square in the base");
  info.rep.assign(Property::Metrizable, Verdict::yes(""), "Thm 1: one-entourage base");
  info.rep.assign(Property::Normal, Verdict::yes(""), "metrizable, hence normal");
  info.rep.assign(Property::Discrete,
                  Verdict::unknown(0, "defined for unbounded balleans"),
                  "not applicable");
  info.rep.assign(Property::Antidiscrete,
                  Verdict::unknown(0, "defined for unbounded balleans"),
                  "not applicable");
  info.rep.assign(Property::Ultranormal, Verdict::yes(""),
                  "no unbounded subsets at all");
  finishCommon(info);
  return info;
}

InferInfo inferDown(const BornologyPresentation& b, const Budget& budget) {
  InferInfo info;
  Verdict unb = b.unbounded(budget);
  if (unb.isTrue())
    info.rep.assign(Property::Bounded, Verdict::no(unb.note(), ""),
                    "compatible with an unbounded bornology");
  else if (unb.isFalse())
    info.rep.assign(Property::Bounded, Verdict::yes(unb.note()),
                    "the bornology is bounded");
  info.rep.assign(Property::Connected, Verdict::yes(""),
                  "pair blocks over finite members relate any two points");
  Verdict cb = b.countableBase();
  if (cb.isTrue())
    info.rep.assign(Property::Metrizable, Verdict::yes(cb.note()),
                    "Thm 1: block chain over a countable base");
  else if (cb.isFalse())
    info.rep.assign(Property::Metrizable, Verdict::no(cb.witness(), cb.note()),
                    "Thm 1 contrapositive: no countable base");
  if (b.kind() == BornologyPresentation::Kind::ChainBase ||
      b.kind() == BornologyPresentation::Kind::FiniteSubsets)
    info.rep.assign(Property::Normal, Verdict::yes(""),
                    "linearly ordered base");
  if (unb.isTrue())
    info.rep.assign(Property::Discrete, Verdict::yes(""),
                    "balls are singletons outside each block");
  if (unb.isTrue()) info.inv = b.invariants(budget);
  propagateImplications(info.rep);
  finishCommon(info);
  return info;
}

InferInfo inferUp(const BornologyPresentation& b,
                  const Budget& budget) {
  InferInfo info;
  Verdict unb = b.unbounded(budget);
  if (unb.isTrue())
    info.rep.assign(Property::Bounded, Verdict::no(unb.note(), ""),
                    "compatible with an unbounded bornology");
  else if (unb.isFalse())
    info.rep.assign(Property::Bounded, Verdict::yes(unb.note()),
                    "the bornology is bounded");
  info.rep.assign(Property::Connected, Verdict::yes(""),
                  "symmetric pair entourages are admissible");
  info.rep.assign(Property::Antidiscrete, Verdict::yes(""),
                  "largest compatible structure by definition");
  // Final product criterion: cov of one factor below add of the other rules
  // out normality.
  if (b.kind() == BornologyPresentation::Kind::ProductOf && unb.isTrue()) {
    const auto& bx = b.left();
    const auto& by = b.right();
    Verdict lu = bx.unbounded(budget);
    Verdict ru = by.unbounded(budget);
    if (lu.isTrue() && ru.isTrue()) {
      auto ix = bx.invariants(budget);
      auto iy = by.invariants(budget);
      if (SymCard::knownLess(iy.cov, ix.add))
        info.rep.assign(Property::Normal,
                        Verdict::no("cov=" + iy.cov.str() + " < add=" + ix.add.str(), ""),
                        "product criterion: cov(B_Y) < add(B_X) forbids normality");
      else if (SymCard::knownLess(ix.cov, iy.add))
        info.rep.assign(Property::Normal,
                        Verdict::no("cov=" + ix.cov.str() + " < add=" + iy.add.str(), ""),
                        "product criterion: cov(B_X) < add(B_Y) forbids normality");
    }
  }
  if (unb.isTrue()) info.inv = b.invariants(budget);
  propagateImplications(info.rep);
  finishCommon(info);
  return info;
}

InferInfo inferAbstract(const BornologyPresentation& b, const Budget& budget) {
  InferInfo info;
  Verdict unb = b.unbounded(budget);
  if (unb.isTrue())
    info.rep.assign(Property::Bounded, Verdict::no("declared unbounded", ""),
                    "declaration");
  else if (unb.isFalse())
    info.rep.assign(Property::Bounded, Verdict::yes("declared bounded"),
                    "declaration");
  info.rep.assign(Property::Connected, Verdict::yes(""), "standing assumption");
  if (unb.isTrue()) {
    info.inv = b.invariants(budget);
    if (info.inv->cof.kind() == SymCard::Kind::AtLeastAleph1)
      info.rep.assign(Property::Metrizable,
                      Verdict::no("cof=" + info.inv->cof.str(), ""),
                      "Thm 1 contrapositive: a countable base caps cof at aleph0");
  }
  propagateImplications(info.rep);
  finishCommon(info);
  return info;
}

InferInfo inferProduct(const std::vector<BalleanExpr>& factors,
                       const Budget& budget) {
  InferInfo info;
  std::vector<InferInfo> kids;
  for (const auto& f : factors) kids.push_back(inferNode(f, budget));

  bool allBounded = true, anyUnbounded = false;
  bool allMetrizable = true;
  std::string unboundedWitness;
  for (const auto& k : kids) {
    if (!k.bounded.isTrue()) allBounded = false;
    if (k.bounded.isFalse()) {
      anyUnbounded = true;
      unboundedWitness = k.bounded.witness();
    }
    if (!k.metrizable.isTrue()) allMetrizable = false;
  }
  if (allBounded)
    info.rep.assign(Property::Bounded, Verdict::yes(""), "all factors bounded");
  if (anyUnbounded)
    info.rep.assign(Property::Bounded, Verdict::no(unboundedWitness, ""),
                    "an unbounded factor embeds");
  info.rep.assign(Property::Connected, Verdict::yes(""), "componentwise");
  if (allMetrizable)
    info.rep.assign(Property::Metrizable, Verdict::yes(""),
                    "Thm 4: finite product of metrizable balleans");

  // Invariant mismatch rules out normality.
  std::vector<BornologyPresentation::Invariants> invs;
  for (const auto& k : kids)
    if (k.inv) invs.push_back(*k.inv);
  if (invs.size() == kids.size() && invs.size() >= 2) {
    std::vector<SymCard> all;
    for (const auto& iv : invs) {
      all.push_back(iv.add);
      all.push_back(iv.cof);
    }
    for (std::size_t a = 0; a < all.size(); ++a)
      for (std::size_t c = a + 1; c < all.size(); ++c)
        if (SymCard::knownNotEqual(all[a], all[c])) {
          info.rep.assign(
              Property::Normal,
              Verdict::no("add/cof values " + all[a].str() + " vs " +
                              all[c].str(),
                          ""),
              "Thm 3 contrapositive: normal products force add=cof across factors");
          a = all.size();
          break;
        }
    // Product bornology invariants.
    BornologyPresentation::Invariants inv = invs[0];
    for (std::size_t i = 1; i < invs.size(); ++i) {
      inv.add = SymCard::minOf(inv.add, invs[i].add);
      inv.cov = SymCard::maxOf(inv.cov, invs[i].cov);
      inv.cof = SymCard::maxOf(inv.cof, invs[i].cof);
    }
    inv.justification = "product rules: add=min, cov=max, cof=max";
    info.inv = inv;
  }
  propagateImplications(info.rep);
  finishCommon(info);
  return info;
}

// Family classification for bornological products, bouquets, combs.
struct FamilyFacts {
  bool allUnboundedMetrizable = false;
  bool allBoundedNonSingleton = false;
  bool allNormal = false;
  bool allMetrizable = false;
  bool allBounded = false;
};

FamilyFacts classifyFamily(const BalleanExpr::ExprFamily& fam,
                           const Budget& budget) {
  FamilyFacts facts;
  std::vector<InferInfo> infos;
  if (fam.kind == BalleanExpr::ExprFamily::Kind::Uniform) {
    infos.push_back(inferNode(*fam.uniform, budget));
  } else {
    for (const auto& m : fam.members) infos.push_back(inferNode(m, budget));
  }
  facts.allUnboundedMetrizable = !infos.empty();
  facts.allBoundedNonSingleton = !infos.empty();
  facts.allNormal = !infos.empty();
  facts.allMetrizable = !infos.empty();
  facts.allBounded = !infos.empty();
  for (const auto& k : infos) {
    if (!(k.bounded.isFalse() && k.metrizable.isTrue()))
      facts.allUnboundedMetrizable = false;
    if (!(k.bounded.isTrue() && !k.singleton)) facts.allBoundedNonSingleton = false;
    if (!k.normal.isTrue()) facts.allNormal = false;
    if (!k.metrizable.isTrue()) facts.allMetrizable = false;
    if (!k.bounded.isTrue()) facts.allBounded = false;
  }
  return facts;
}

void assignBoundedForSupportedProduct(InferInfo& info,
                                      const BornologyPresentation& b,
                                      const FamilyFacts& facts,
                                      const Budget& budget) {
  Verdict unb = b.unbounded(budget);
  if (unb.isFalse() && facts.allBounded)
    info.rep.assign(Property::Bounded, Verdict::yes(""),
                    "bounded index bornology with bounded factors");
  else if (unb.isTrue())
    info.rep.assign(Property::Bounded,
                    Verdict::no("supports escape every member", ""),
                    "unbounded index bornology");
  else if (!facts.allBounded)
    info.rep.assign(Property::Bounded,
                    Verdict::no("an unbounded factor embeds", ""),
                    "unbounded factor");
}

InferInfo inferBProduct(const BornologyPresentation& b,
                        const BalleanExpr::ExprFamily& fam, const Budget& budget,
                        bool macro) {
  InferInfo info;
  FamilyFacts facts = macro ? FamilyFacts{false, true, true, true, true}
                            : classifyFamily(fam, budget);
  info.rep.assign(Property::Connected, Verdict::yes(""), "construction");
  assignBoundedForSupportedProduct(info, b, facts, budget);

  const bool indexInfinite =
      b.ground().kind() == GroundSet::Kind::Naturals && !b.ground().finiteSize();
  if (facts.allUnboundedMetrizable && indexInfinite) {
    Verdict fs = b.finiteSubsetsSemantically(budget);
    if (fs.isTrue()) {
      info.rep.assign(Property::Metrizable, Verdict::yes(fs.note()),
                      "Thm 5 (3) => (1): countable index set with the "
                      "finite-subsets bornology");
      info.rep.assign(Property::Normal, Verdict::yes(fs.note()),
                      "Thm 5 (3) => (2)");
    } else if (fs.isFalse()) {
      info.rep.assign(Property::Metrizable, Verdict::no(fs.witness(), ""),
                      "Thm 5 not-(3) => not-(1)");
      info.rep.assign(Property::Normal, Verdict::no(fs.witness(), ""),
                      "Thm 5 not-(3) => not-(2)");
    }
  }
  if (facts.allBoundedNonSingleton) {
    Verdict cb = b.countableBase();
    if (cb.isTrue())
      info.rep.assign(Property::Metrizable, Verdict::yes(cb.note()),
                      macro ? "Thm 6 via the macrocube's doubleton factors"
                            : "Thm 6: bounded factors, countable base");
    else if (cb.isFalse())
      info.rep.assign(Property::Metrizable, Verdict::no(cb.witness(), cb.note()),
                      "Thm 6 contrapositive");
  }
  if (!indexInfinite && facts.allMetrizable)
    info.rep.assign(Property::Metrizable, Verdict::yes(""),
                    "Thm 4: finite family");
  propagateImplications(info.rep);
  finishCommon(info);
  return info;
}

InferInfo inferBouquet(const BornologyPresentation& b,
                       const BalleanExpr::ExprFamily& fam, const Budget& budget) {
  InferInfo info;
  FamilyFacts facts = classifyFamily(fam, budget);
  info.rep.assign(Property::Connected, Verdict::yes(""), "construction");
  assignBoundedForSupportedProduct(info, b, facts, budget);

  const bool indexInfinite =
      b.ground().kind() == GroundSet::Kind::Naturals && !b.ground().finiteSize();
  if (facts.allUnboundedMetrizable && indexInfinite) {
    Verdict fs = b.finiteSubsetsSemantically(budget);
    if (fs.isTrue())
      info.rep.assign(Property::Metrizable, Verdict::yes(fs.note()), "Thm 7");
    else if (fs.isFalse())
      info.rep.assign(Property::Metrizable, Verdict::no(fs.witness(), ""),
                      "Thm 7 (only if direction)");
  }
  if (facts.allBoundedNonSingleton) {
    Verdict cb = b.countableBase();
    if (cb.isTrue())
      info.rep.assign(Property::Metrizable, Verdict::yes(cb.note()), "Thm 8");
    else if (cb.isFalse())
      info.rep.assign(Property::Metrizable, Verdict::no(cb.witness(), cb.note()),
                      "Thm 8 (only if direction)");
  }
  if (!indexInfinite && facts.allMetrizable)
    info.rep.assign(Property::Metrizable, Verdict::yes(""),
                    "restriction of a finite product of metrizable balleans");
  if (facts.allNormal)
    info.rep.assign(Property::Normal, Verdict::yes(""),
                    "Thm 9: bouquets of normal balleans are normal");
  propagateImplications(info.rep);
  finishCommon(info);
  return info;
}

InferInfo inferComb(const BalleanExpr& handle, const SetExpr& attach,
                    const BalleanExpr::ExprFamily& fam, const Budget& budget) {
  InferInfo info;
  InferInfo h = inferNode(handle, budget);
  FamilyFacts facts = classifyFamily(fam, budget);
  info.rep.assign(Property::Connected, Verdict::yes(""), "construction");
  if (h.bounded.isFalse())
    info.rep.assign(Property::Bounded, Verdict::no("the handle embeds", ""),
                    "unbounded handle");

  // "A meets every bounded set finitely" holds structurally for metric
  // handles, whose bounded sets are the finite sets.
  const bool inducedFinite = handle.kind() == BalleanExpr::Kind::MetricNat;
  (void)attach;
  if (h.metrizable.isTrue() && facts.allMetrizable && inducedFinite)
    info.rep.assign(Property::Metrizable, Verdict::yes(""),
                    "Thm 10: metric handle meets the attach set finitely in "
                    "every bounded set");
  if (h.normal.isTrue() && facts.allNormal)
    info.rep.assign(Property::Normal, Verdict::yes(""),
                    "Thm 11: comb of normal balleans");
  propagateImplications(info.rep);
  finishCommon(info);
  return info;
}

InferInfo inferNode(const BalleanExpr& e, const Budget& budget) {
  switch (e.kind()) {
    case BalleanExpr::Kind::MetricNat:
      return inferMetricNat();
    case BalleanExpr::Kind::FinitePointsB:
      return inferFinitePoints(e.pointCount());
    case BalleanExpr::Kind::Down:
      return inferDown(e.bornology(), budget);
    case BalleanExpr::Kind::Up:
      return inferUp(e.bornology(), budget);
    case BalleanExpr::Kind::AbstractB:
      return inferAbstract(e.bornology(), budget);
    case BalleanExpr::Kind::Product:
      return inferProduct(e.factors(), budget);
    case BalleanExpr::Kind::BProduct:
      return inferBProduct(e.bornology(), e.family(), budget, false);
    case BalleanExpr::Kind::Macrocube: {
      BalleanExpr::ExprFamily doubletons;
      return inferBProduct(e.bornology(), doubletons, budget, true);
    }
    case BalleanExpr::Kind::Bouquet:
      return inferBouquet(e.bornology(), e.family(), budget);
    case BalleanExpr::Kind::Comb:
      return inferComb(e.parent(), e.subset(), e.family(), budget);
    case BalleanExpr::Kind::Sub: {
      InferInfo p = inferNode(e.parent(), budget);
      InferInfo info;
      info.rep.assign(Property::Connected, Verdict::yes(""),
                      "restriction of a connected structure");
      if (p.metrizable.isTrue())
        info.rep.assign(Property::Metrizable, Verdict::yes(""),
                        "Thm 1: a countable base restricts");
      propagateImplications(info.rep);
      finishCommon(info);
      return info;
    }
  }
  return {};
}

}  // namespace

PropertyReport inferProperties(const BalleanExpr& expr, const Budget& budget) {
  return inferNode(expr, budget).rep;
}

std::optional<SlowFunction> namedSlowFunction(const std::string& name,
                                              const Budget& budget) {
  if (name == "parity")
    return SlowFunction{"parity", "user", [](const Element& e) {
                          return Rational(static_cast<std::int64_t>(
                              e.natValue() % 2));
                        }};
  if (name == "half" || name == "const-half")
    return SlowFunction{"half", "user",
                        [](const Element&) { return Rational(1, 2); }};
  if (name == "zero")
    return SlowFunction{"zero", "user",
                        [](const Element&) { return Rational(0); }};
  if (name == "log-cap") {
    const Nat h = budget.horizon;
    auto bits = [](Nat v) {
      std::int64_t b = 0;
      while (v) {
        ++b;
        v >>= 1;
      }
      return b;
    };
    const std::int64_t denom = std::max<std::int64_t>(bits(1 + h), 1);
    return SlowFunction{"log-cap", "user", [bits, denom](const Element& e) {
                          const std::int64_t num = bits(1 + e.natValue());
                          return num >= denom ? Rational(1)
                                              : Rational(num, denom);
                        }};
  }
  return std::nullopt;
}

}  // namespace ballean
