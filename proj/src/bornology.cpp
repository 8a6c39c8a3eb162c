#include "ballean/bornology.hpp"

#include <algorithm>

namespace ballean {

struct BornologyPresentation::Node {
  Kind kind = Kind::FiniteSubsets;
  GroundSet ground;
  std::string name;
  std::function<SetExpr(Nat)> chain;
  std::optional<bool> membersFiniteHint;
  bool properTail = true;
  std::vector<SetExpr> base;
  std::function<Verdict(const SetExpr&, const Budget&)> memberTest;
  std::function<std::optional<SetExpr>(Nat)> baseHint;
  Verdict unboundedHint;
  SymCard add = SymCard::aleph0(), cov = SymCard::aleph0(),
          cof = SymCard::aleph0();
  bool declaredUnbounded = true;
  std::vector<BornologyPresentation> children;
};

BornologyPresentation BornologyPresentation::finiteSubsets(GroundSet g) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::FiniteSubsets;
  n->ground = std::move(g);
  n->name = "finite-subsets";
  return BornologyPresentation(std::move(n));
}

BornologyPresentation BornologyPresentation::chainBase(
    GroundSet g, std::string name, std::function<SetExpr(Nat)> chain,
    std::optional<bool> membersFiniteHint, bool properTail) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::ChainBase;
  n->ground = std::move(g);
  n->name = std::move(name);
  n->chain = std::move(chain);
  n->membersFiniteHint = membersFiniteHint;
  n->properTail = properTail;
  return BornologyPresentation(std::move(n));
}

BornologyPresentation BornologyPresentation::explicitBase(
    GroundSet g, std::vector<SetExpr> base) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::ExplicitBase;
  n->ground = std::move(g);
  n->name = "explicit";
  n->base = std::move(base);
  return BornologyPresentation(std::move(n));
}

BornologyPresentation BornologyPresentation::oracleBacked(
    GroundSet g, std::string label,
    std::function<Verdict(const SetExpr&, const Budget&)> memberTest,
    std::function<std::optional<SetExpr>(Nat)> baseHint, Verdict unboundedHint) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::OracleBacked;
  n->ground = std::move(g);
  n->name = std::move(label);
  n->memberTest = std::move(memberTest);
  n->baseHint = std::move(baseHint);
  n->unboundedHint = unboundedHint;
  return BornologyPresentation(std::move(n));
}

BornologyPresentation BornologyPresentation::abstractDecl(GroundSet g,
                                                          std::string name,
                                                          SymCard add,
                                                          SymCard cov,
                                                          SymCard cof,
                                                          bool unbounded) {
  if (SymCard::knownLess(cov, add) || SymCard::knownLess(cof, cov) ||
      SymCard::knownLess(cof, add))
    throw DomainError("cardinal declaration violates add <= cov <= cof: add=" +
                      add.str() + " cov=" + cov.str() + " cof=" + cof.str());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Abstract;
  n->ground = std::move(g);
  n->name = std::move(name);
  n->add = add;
  n->cov = cov;
  n->cof = cof;
  n->declaredUnbounded = unbounded;
  return BornologyPresentation(std::move(n));
}

BornologyPresentation BornologyPresentation::productOf(
    BornologyPresentation left, BornologyPresentation right) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::ProductOf;
  n->ground = GroundSet::tupleSpace({left.ground(), right.ground()});
  n->name = "product";
  n->children = {std::move(left), std::move(right)};
  return BornologyPresentation(std::move(n));
}

BornologyPresentation BornologyPresentation::restrictedTo(
    const BornologyPresentation& ambient, SetExpr within) {
  const GroundSet g = within.ground();
  auto test = [ambient, within](const SetExpr& s, const Budget& b) -> Verdict {
    // s must lie inside `within` and be an ambient member.
    for (const auto& e : s.membersUpTo(b.horizon))
      if (!within.contains(e))
        return Verdict::no(e.render(), "escapes the inducing subset");
    Verdict inAmbient = ambient.member(s, b);
    if (inAmbient.isFalse()) return inAmbient;
    if (inAmbient.isUnknown()) return inAmbient;
    return Verdict::yes("ambient member inside the inducing subset");
  };
  auto hint = [ambient, within](Nat i) -> std::optional<SetExpr> {
    auto m = ambient.baseMemberAt(i);
    if (!m) return std::nullopt;
    return SetExpr::intersectionOf(*m, within);
  };
  return oracleBacked(g, "induced(" + ambient.render() + ")", std::move(test),
                      std::move(hint), Verdict());
}

BornologyPresentation::Kind BornologyPresentation::kind() const {
  return node_->kind;
}
const GroundSet& BornologyPresentation::ground() const { return node_->ground; }
const std::string& BornologyPresentation::name() const { return node_->name; }
const BornologyPresentation& BornologyPresentation::left() const {
  return node_->children[0];
}
const BornologyPresentation& BornologyPresentation::right() const {
  return node_->children[1];
}

std::optional<SetExpr> BornologyPresentation::baseMemberAt(Nat i) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::FiniteSubsets: {
      if (auto size = n.ground.finiteSize())
        i = std::min<Nat>(i, *size - 1);
      std::vector<Element> elems;
      elems.reserve(i + 1);
      for (Nat k = 0; k <= i; ++k) elems.push_back(n.ground.decode(k));
      return SetExpr::finite(n.ground, std::move(elems));
    }
    case Kind::ChainBase:
      return n.chain(i);
    case Kind::ExplicitBase: {
      if (n.base.empty()) return SetExpr::empty(n.ground);
      SetExpr acc = n.base[0];
      for (Nat k = 1; k <= i && k < n.base.size(); ++k)
        acc = SetExpr::unionOf(acc, n.base[k]);
      return acc;
    }
    case Kind::OracleBacked:
      if (n.baseHint) return n.baseHint(i);
      return std::nullopt;
    case Kind::Abstract:
      return std::nullopt;
    case Kind::ProductOf: {
      auto l = n.children[0].baseMemberAt(i);
      auto r = n.children[1].baseMemberAt(i);
      if (!l || !r) return std::nullopt;
      return SetExpr::rectangle(n.ground, {*l, *r});
    }
  }
  return std::nullopt;
}

namespace {

// S ⊆ T, exact when both sides decide; horizon probe otherwise.
Verdict subsetVerdict(const SetExpr& s, const SetExpr& t, const Budget& b) {
  const SetExpr escape = SetExpr::differenceOf(s, t);
  if (escape.isEmptyFinite()) return Verdict::yes("exact inclusion");
  if (escape.isExact())
    return Verdict::no(escape.finiteElems().empty()
                           ? escape.render()
                           : escape.finiteElems().front().render(),
                       "exact escape");
  if (escape.kind() == SetExpr::Kind::EvPeriodic)
    return Verdict::no(escape.render(), "periodic escape");
  const auto members = escape.membersUpTo(b.horizon);
  if (!members.empty())
    return Verdict::no(members.front().render(), "escaping point");
  return Verdict::yes("no escape up to horizon " + std::to_string(b.horizon));
}

}  // namespace

Verdict BornologyPresentation::member(const SetExpr& s,
                                      const Budget& budget) const {
  const auto& n = *node_;
  if (!s.ground().same(n.ground))
    throw GroundMismatchError("membership query across grounds");
  switch (n.kind) {
    case Kind::FiniteSubsets:
      return s.finiteness(budget);
    case Kind::ChainBase: {
      Verdict fin = s.finiteness(budget);
      if (n.membersFiniteHint.value_or(false) && fin.isFalse())
        return Verdict::no(fin.witness(),
                           "infinite set, all chain members finite");
      Verdict lastNo = Verdict::unknown(budget.horizon);
      Nat i = 0;
      while (i <= budget.horizon * 2) {
        Verdict v = subsetVerdict(s, n.chain(i), budget);
        if (v.isTrue())
          return Verdict::yes("inside chain member " + std::to_string(i));
        lastNo = v;
        i = i ? i * 2 : 1;
      }
      return Verdict::unknown(budget.horizon,
                              "no dominating chain member found; last escape " +
                                  lastNo.witness());
    }
    case Kind::ExplicitBase: {
      if (n.base.empty())
        return s.isEmptyFinite()
                   ? Verdict::yes("empty set")
                   : Verdict::no(s.membersUpTo(budget.horizon).empty()
                                     ? s.render()
                                     : s.membersUpTo(budget.horizon)
                                           .front()
                                           .render(),
                                 "empty base");
      auto all = baseMemberAt(n.base.size() - 1);
      return subsetVerdict(s, *all, budget);
    }
    case Kind::OracleBacked:
      return n.memberTest(s, budget);
    case Kind::Abstract:
      return Verdict::unknown(budget.horizon, "abstract bornology " + n.name);
    case Kind::ProductOf: {
      // Finite sets: project and test the factors.
      if (s.kind() == SetExpr::Kind::Finite) {
        std::vector<Element> lproj, rproj;
        for (const auto& e : s.finiteElems()) {
          lproj.push_back(e.items()[0]);
          rproj.push_back(e.items()[1]);
        }
        Verdict lv = n.children[0].member(
            SetExpr::finite(n.children[0].ground(), std::move(lproj)), budget);
        Verdict rv = n.children[1].member(
            SetExpr::finite(n.children[1].ground(), std::move(rproj)), budget);
        if (lv.isTrue() && rv.isTrue())
          return Verdict::yes("finite projections are members");
        if (lv.isFalse()) return lv;
        if (rv.isFalse()) return rv;
        return Verdict::unknown(budget.horizon);
      }
      if (s.kind() == SetExpr::Kind::Rectangle) {
        Verdict lv = n.children[0].member(s.children()[0], budget);
        Verdict rv = n.children[1].member(s.children()[1], budget);
        if (s.children()[0].isEmptyFinite() || s.children()[1].isEmptyFinite())
          return Verdict::yes("empty rectangle");
        if (lv.isTrue() && rv.isTrue()) return Verdict::yes("rectangle of members");
        if (lv.isFalse())
          return Verdict::no(lv.witness(), "left side not a member");
        if (rv.isFalse())
          return Verdict::no(rv.witness(), "right side not a member");
        return Verdict::unknown(budget.horizon);
      }
      // General: sweep the rectangle base.
      Nat i = 0;
      while (i <= budget.horizon * 2) {
        auto rect = baseMemberAt(i);
        if (!rect) break;
        if (subsetVerdict(s, *rect, budget).isTrue())
          return Verdict::yes("inside base rectangle " + std::to_string(i));
        i = i ? i * 2 : 1;
      }
      return Verdict::unknown(budget.horizon, "no dominating rectangle found");
    }
  }
  return Verdict::unknown(budget.horizon);
}

AxiomReport BornologyPresentation::checkBornology(const Budget& budget) const {
  AxiomReport report;
  const auto& n = *node_;
  if (n.kind == Kind::Abstract) {
    if (SymCard::knownLess(n.cov, n.add) || SymCard::knownLess(n.cof, n.cov))
      report.fail("declared cardinals violate add <= cov <= cof");
    return report;
  }
  // Singleton containment on a sample of ground points.
  const Nat sample = std::min<Nat>(budget.horizon, 64);
  for (Nat i = 0; i <= sample; ++i) {
    if (auto size = n.ground.finiteSize(); size && i >= *size) break;
    Element e = n.ground.decode(i);
    Verdict v = member(SetExpr::singletonOf(n.ground, e), budget);
    if (v.isFalse()) {
      report.fail("singleton " + e.render() + " not dominated: " + v.note());
      break;
    }
  }
  // Union closure on sampled base members.
  for (Nat i = 0; i < 4; ++i) {
    for (Nat j = i + 1; j < 5; ++j) {
      auto bi = baseMemberAt(i);
      auto bj = baseMemberAt(j);
      if (!bi || !bj) continue;
      Verdict v = member(SetExpr::unionOf(*bi, *bj), budget);
      if (v.isFalse()) {
        report.fail("union of base members " + std::to_string(i) + "," +
                    std::to_string(j) + " escapes: " + v.witness());
        return report;
      }
    }
  }
  // Subset closure holds by the domination semantics of `member`; spot-check
  // one strict subset anyway.
  if (auto b1 = baseMemberAt(1)) {
    auto some = b1->membersUpTo(budget.horizon);
    if (!some.empty()) {
      Verdict v =
          member(SetExpr::finite(n.ground, {some.front()}), budget);
      if (v.isFalse()) report.fail("subset of a base member rejected");
    }
  }
  return report;
}

Verdict BornologyPresentation::unbounded(const Budget& budget) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::FiniteSubsets:
      if (n.ground.finiteSize())
        return Verdict::no("whole ground is finite", "bounded");
      return Verdict::yes("ground is infinite, members are finite");
    case Kind::ChainBase: {
      for (Nat i = 0; i < budget.indexCap(); ++i) {
        const SetExpr complement = SetExpr::complementOf(n.chain(i));
        if (complement.isEmptyFinite())
          return Verdict::no("chain member " + std::to_string(i) +
                                 " covers the ground",
                             "bounded");
      }
      if (n.membersFiniteHint.value_or(false) && !n.ground.finiteSize())
        return Verdict::yes("finite chain members, infinite ground");
      if (n.properTail)
        return Verdict::yes("chain presentation with proper members");
      return Verdict::unknown(budget.horizon, "chain tail undetermined");
    }
    case Kind::ExplicitBase: {
      auto all = baseMemberAt(n.base.empty() ? 0 : n.base.size() - 1);
      const SetExpr complement = SetExpr::complementOf(*all);
      if (complement.isEmptyFinite())
        return Verdict::no("base union covers the ground", "bounded");
      if (complement.isExact() || complement.kind() == SetExpr::Kind::EvPeriodic)
        return Verdict::yes("base union misses " +
                            complement.membersUpTo(budget.horizon)
                                .front()
                                .render());
      auto missing = complement.membersUpTo(budget.horizon);
      if (!missing.empty())
        return Verdict::yes("base union misses " + missing.front().render());
      return Verdict::unknown(budget.horizon);
    }
    case Kind::OracleBacked:
      if (!n.unboundedHint.isUnknown()) return n.unboundedHint;
      {
        Verdict full = n.memberTest(SetExpr::full(n.ground), budget);
        if (full.isTrue()) return Verdict::no("ground itself is a member", "bounded");
        if (full.isFalse()) return Verdict::yes("ground is not a member");
        return Verdict::unknown(budget.horizon);
      }
    case Kind::Abstract:
      return n.declaredUnbounded
                 ? Verdict::yes("declared unbounded")
                 : Verdict::no("declared bounded", "bounded");
    case Kind::ProductOf: {
      Verdict l = n.children[0].unbounded(budget);
      Verdict r = n.children[1].unbounded(budget);
      if (l.isTrue()) return Verdict::yes("left factor unbounded");
      if (r.isTrue()) return Verdict::yes("right factor unbounded");
      if (l.isFalse() && r.isFalse())
        return Verdict::no("both factors bounded", "bounded");
      return Verdict::unknown(budget.horizon);
    }
  }
  return Verdict::unknown(budget.horizon);
}

BornologyPresentation::Invariants BornologyPresentation::invariants(
    const Budget& budget) const {
  const auto& n = *node_;
  Verdict unb = unbounded(budget);
  if (unb.isFalse())
    throw DomainError("cardinal invariants are defined for unbounded bornologies only");
  Invariants inv;
  switch (n.kind) {
    case Kind::FiniteSubsets:
      inv.justification =
          "finite unions of finite sets stay finite (add >= aleph0); the "
          "increasing chain of initial segments is countable, cofinal and "
          "covering (cov, cof <= aleph0)";
      return inv;
    case Kind::ChainBase:
      inv.justification =
          "strictly increasing countable chain covering an unbounded ground: "
          "add >= aleph0 by finite-union closure, the chain itself witnesses "
          "cov <= aleph0 and cof <= aleph0";
      return inv;
    case Kind::OracleBacked:
      if (n.baseHint) {
        inv.justification = "countable base hint supplied by " + n.name;
        return inv;
      }
      throw DomainError("no invariant derivation for oracle-backed bornology " +
                        n.name);
    case Kind::ExplicitBase:
      throw DomainError("explicit finite bases are bounded or fail the axioms");
    case Kind::Abstract:
      inv.add = n.add;
      inv.cov = n.cov;
      inv.cof = n.cof;
      inv.justification = "declared on " + n.name;
      return inv;
    case Kind::ProductOf: {
      // Bounded factors contribute trivially: drop them.
      Verdict lu = n.children[0].unbounded(budget);
      Verdict ru = n.children[1].unbounded(budget);
      if (lu.isFalse()) return n.children[1].invariants(budget);
      if (ru.isFalse()) return n.children[0].invariants(budget);
      Invariants li = n.children[0].invariants(budget);
      Invariants ri = n.children[1].invariants(budget);
      inv.add = SymCard::minOf(li.add, ri.add);
      inv.cov = SymCard::maxOf(li.cov, ri.cov);
      inv.cof = SymCard::maxOf(li.cof, ri.cof);
      inv.justification =
          "rectangle base: a union escapes as soon as one projection escapes "
          "(add = min), covers and cofinal families combine by reindexing "
          "over the larger factor (cov = max, cof = max)";
      return inv;
    }
  }
  return inv;
}

Verdict BornologyPresentation::countableBase() const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::FiniteSubsets:
      return Verdict::yes("initial segments form a countable base");
    case Kind::ChainBase:
      return Verdict::yes("chain-indexed base");
    case Kind::ExplicitBase:
      return Verdict::yes("finite base");
    case Kind::OracleBacked:
      if (n.baseHint) return Verdict::yes("countable base hint");
      return Verdict::unknown(0, "oracle-backed bornology");
    case Kind::Abstract: {
      if (n.cof.kind() == SymCard::Kind::AtLeastAleph1)
        return Verdict::no("cof " + n.cof.str() + " exceeds aleph0",
                           "cofinality above aleph0");
      return Verdict::yes("declared cof " + n.cof.str());
    }
    case Kind::ProductOf: {
      Verdict l = n.children[0].countableBase();
      Verdict r = n.children[1].countableBase();
      if (l.isTrue() && r.isTrue())
        return Verdict::yes("diagonal chain of rectangles");
      if (l.isFalse()) return l;
      if (r.isFalse()) return r;
      return Verdict::unknown(0);
    }
  }
  return Verdict::unknown(0);
}

Verdict BornologyPresentation::allBaseMembersFinite(const Budget& budget) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::FiniteSubsets:
      return Verdict::yes("initial segments are finite");
    case Kind::ChainBase: {
      if (n.membersFiniteHint) {
        if (*n.membersFiniteHint) return Verdict::yes("chain of finite members");
        // Find the first infinite member for the witness.
        for (Nat i = 0; i < budget.indexCap(); ++i) {
          Verdict v = n.chain(i).finiteness(budget);
          if (v.isFalse())
            return Verdict::no("chain member " + std::to_string(i),
                               "infinite base member");
        }
        return Verdict::no("chain member beyond tested range",
                           "infinite base member by presentation");
      }
      for (Nat i = 0; i < budget.indexCap(); ++i) {
        Verdict v = n.chain(i).finiteness(budget);
        if (v.isFalse())
          return Verdict::no("chain member " + std::to_string(i),
                             "infinite base member");
        if (!v.isTrue()) return Verdict::unknown(budget.horizon);
      }
      return Verdict::unknown(budget.horizon, "chain tail undetermined");
    }
    case Kind::ExplicitBase: {
      for (std::size_t i = 0; i < n.base.size(); ++i) {
        Verdict v = n.base[i].finiteness(budget);
        if (v.isFalse())
          return Verdict::no("base member " + std::to_string(i),
                             "infinite base member");
        if (!v.isTrue()) return Verdict::unknown(budget.horizon);
      }
      return Verdict::yes("all base members finite");
    }
    case Kind::OracleBacked:
      return Verdict::unknown(budget.horizon);
    case Kind::Abstract:
      return Verdict::unknown(budget.horizon, "abstract declaration");
    case Kind::ProductOf: {
      Verdict l = n.children[0].allBaseMembersFinite(budget);
      Verdict r = n.children[1].allBaseMembersFinite(budget);
      if (l.isTrue() && r.isTrue()) return Verdict::yes("finite rectangles");
      if (l.isFalse()) return l;
      if (r.isFalse()) return r;
      return Verdict::unknown(budget.horizon);
    }
  }
  return Verdict::unknown(budget.horizon);
}

Verdict BornologyPresentation::finiteSubsetsSemantically(
    const Budget& budget) const {
  Verdict fin = allBaseMembersFinite(budget);
  if (fin.isFalse())
    return Verdict::no(fin.witness(),
                       "contains an infinite member beyond the finite sets");
  if (!fin.isTrue()) return Verdict::unknown(budget.horizon, fin.note());
  return Verdict::yes(
      "every base member is finite, and every finite set is dominated");
}

std::string BornologyPresentation::render() const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::FiniteSubsets:
      return "(finite-subsets " + n.ground.render() + ")";
    case Kind::ChainBase:
      return "(chain " + n.name + ")";
    case Kind::ExplicitBase: {
      std::string out = "(explicit-base";
      for (const auto& b : n.base) out += " " + b.render();
      return out + ")";
    }
    case Kind::OracleBacked:
      return "(oracle " + n.name + ")";
    case Kind::Abstract:
      return "(abstract " + n.name + " :add " + n.add.str() + " :cov " +
             n.cov.str() + " :cof " + n.cof.str() + ")";
    case Kind::ProductOf:
      return "(product " + n.children[0].render() + " " +
             n.children[1].render() + ")";
  }
  return "";
}

BornologyPresentation productBornology(const BornologyPresentation& bx,
                                       const BornologyPresentation& by) {
  return BornologyPresentation::productOf(bx, by);
}

}  // namespace ballean
