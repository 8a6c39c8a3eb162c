#include "ballean/entourage.hpp"

#include <algorithm>
#include <set>

namespace ballean {

struct Entourage::Node {
  Kind kind = Kind::Metric;
  GroundSet ground;
  Nat radius = 0;
  std::vector<std::pair<Element, Element>> pairs;  // sorted
  SetExpr member;  // Block member / XorMask allowed / SupportCyl+Glue beta /
                   // Restrict carrier
  std::vector<Entourage> kids;  // Product / SupportCyl factor / Glue core,spine
                                // / Compose / UnionRel / Restrict inner
  std::string name;
  std::function<Nat(Nat)> fwd;
  std::function<std::optional<Nat>(Nat)> inv;
  std::function<SetExpr(const Element&)> ballFn;
  std::function<SetExpr(const Element&)> invBallFn;
  bool symmetric = false;
};

namespace {

void requireNatLike(const GroundSet& g, const char* what) {
  if (!natLikeGround(g))
    throw EncodingError(std::string(what) + " requires a natural-like ground");
}

Element supportValueAt(const Element& x, Nat key, const Element& basepoint) {
  for (const auto& [k, v] : x.entries())
    if (k == key) return v;
  return basepoint;
}

}  // namespace

Entourage Entourage::metric(GroundSet g, Nat radius) {
  requireNatLike(g, "metric entourage");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Metric;
  n->ground = std::move(g);
  n->radius = radius;
  n->symmetric = true;
  return Entourage(std::move(n));
}

Entourage Entourage::finiteRel(GroundSet g,
                               std::vector<std::pair<Element, Element>> pairs) {
  for (const auto& [a, b] : pairs)
    if (!g.valid(a) || !g.valid(b))
      throw EncodingError("relation pair outside the ground");
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  auto n = std::make_shared<Node>();
  n->kind = Kind::FiniteRel;
  n->ground = std::move(g);
  bool sym = true;
  for (const auto& [a, b] : pairs)
    if (!std::binary_search(pairs.begin(), pairs.end(), std::make_pair(b, a)))
      sym = false;
  n->symmetric = sym;
  n->pairs = std::move(pairs);
  return Entourage(std::move(n));
}

Entourage Entourage::block(SetExpr member) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Block;
  n->ground = member.ground();
  n->member = std::move(member);
  n->symmetric = true;
  return Entourage(std::move(n));
}

Entourage Entourage::productOf(GroundSet tupleGround,
                               std::vector<Entourage> components) {
  if (tupleGround.kind() != GroundSet::Kind::TupleSpace ||
      tupleGround.components().size() != components.size())
    throw EncodingError("product entourage arity mismatch");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->ground = std::move(tupleGround);
  n->symmetric = std::all_of(components.begin(), components.end(),
                             [](const Entourage& e) { return e.symmetricHint(); });
  n->kids = std::move(components);
  return Entourage(std::move(n));
}

Entourage Entourage::xorMask(GroundSet subsetsGround, SetExpr allowed) {
  if (subsetsGround.kind() != GroundSet::Kind::SubsetsOf)
    throw EncodingError("xor-mask entourage requires a subsets ground");
  auto n = std::make_shared<Node>();
  n->kind = Kind::XorMask;
  n->ground = std::move(subsetsGround);
  n->member = std::move(allowed);
  n->symmetric = true;
  return Entourage(std::move(n));
}

Entourage Entourage::supportCyl(GroundSet fsGround, SetExpr beta,
                                Entourage factorEnt) {
  if (fsGround.kind() != GroundSet::Kind::FiniteSupport)
    throw EncodingError("support entourage requires a finite-support ground");
  auto n = std::make_shared<Node>();
  n->kind = Kind::SupportCyl;
  n->ground = std::move(fsGround);
  n->member = std::move(beta);
  n->symmetric = factorEnt.symmetricHint();
  n->kids = {std::move(factorEnt)};
  return Entourage(std::move(n));
}

Entourage Entourage::glue(GroundSet gluedGround, SetExpr beta, Entourage coreEnt,
                          Entourage spineEnt) {
  if (gluedGround.kind() != GroundSet::Kind::Glued)
    throw EncodingError("glue entourage requires a glued ground");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Glue;
  n->ground = std::move(gluedGround);
  n->member = std::move(beta);
  n->symmetric = coreEnt.symmetricHint() && spineEnt.symmetricHint();
  n->kids = {std::move(coreEnt), std::move(spineEnt)};
  return Entourage(std::move(n));
}

Entourage Entourage::compose(Entourage e, Entourage f) {
  if (!e.ground().same(f.ground()))
    throw GroundMismatchError("composition across grounds");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Compose;
  n->ground = e.ground();
  n->symmetric = false;
  n->kids = {std::move(e), std::move(f)};
  return Entourage(std::move(n));
}

Entourage Entourage::unionOf(GroundSet g, std::vector<Entourage> parts) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::UnionRel;
  n->ground = std::move(g);
  n->symmetric = std::all_of(parts.begin(), parts.end(),
                             [](const Entourage& e) { return e.symmetricHint(); });
  n->kids = std::move(parts);
  return Entourage(std::move(n));
}

Entourage Entourage::restrictTo(Entourage e, SetExpr within) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Restrict;
  n->ground = e.ground();
  n->member = std::move(within);
  n->symmetric = e.symmetricHint();
  n->kids = {std::move(e)};
  return Entourage(std::move(n));
}

Entourage Entourage::pairFn(GroundSet g, std::string name,
                            std::function<Nat(Nat)> fwd,
                            std::function<std::optional<Nat>(Nat)> inv) {
  requireNatLike(g, "pair-function entourage");
  auto n = std::make_shared<Node>();
  n->kind = Kind::PairFn;
  n->ground = std::move(g);
  n->name = std::move(name);
  n->fwd = std::move(fwd);
  n->inv = std::move(inv);
  n->symmetric = true;
  return Entourage(std::move(n));
}

Entourage Entourage::ballMap(GroundSet g, std::string name,
                             std::function<SetExpr(const Element&)> ball,
                             std::function<SetExpr(const Element&)> invBall) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::BallMap;
  n->ground = std::move(g);
  n->name = std::move(name);
  n->ballFn = std::move(ball);
  n->invBallFn = std::move(invBall);
  n->symmetric = false;
  return Entourage(std::move(n));
}

Entourage Entourage::saturator(SetExpr member, std::vector<Entourage> witnesses,
                               Nat steps) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Saturator;
  n->ground = member.ground();
  n->member = std::move(member);
  std::vector<Entourage> closed;
  for (auto& w : witnesses) {
    closed.push_back(w.inverted());
    closed.push_back(std::move(w));
  }
  n->kids = std::move(closed);
  n->radius = steps;
  n->symmetric = true;
  return Entourage(std::move(n));
}

namespace {

// Reachable points after at most `steps` block/witness moves from x.
// `blockTouched` records that the whole member was absorbed; its points are
// materialized when the member enumerates within the size budget.
struct SaturatorReach {
  std::set<Element> points;
  bool blockTouched = false;
  bool blockMaterialized = false;
};

SaturatorReach saturatorReach(const Entourage::Node& n, const Element& x,
                              std::size_t sizeBudget) {
  SaturatorReach reach;
  reach.points.insert(x);
  std::vector<Element> frontier{x};
  for (Nat step = 0; step < n.radius; ++step) {
    std::vector<Element> next;
    // Block absorption.
    if (!reach.blockTouched) {
      for (const auto& p : reach.points)
        if (n.member.contains(p)) {
          reach.blockTouched = true;
          break;
        }
      if (reach.blockTouched) {
        Budget b;
        if (n.member.finiteness(b).isTrue()) {
          auto ms = n.member.membersUpTo(b.scanCap());
          if (ms.size() <= sizeBudget) {
            for (auto& m : ms) {
              if (reach.points.insert(m).second) next.push_back(m);
            }
            reach.blockMaterialized = true;
          }
        }
      }
    }
    // Witness edges from the current frontier.
    for (const auto& p : frontier) {
      for (const auto& w : n.kids) {
        auto ball = w.ballList(p, 64);
        if (!ball) continue;
        for (auto& q : *ball)
          if (reach.points.insert(q).second) next.push_back(q);
      }
    }
    if (reach.points.size() > sizeBudget) break;
    frontier = std::move(next);
    if (frontier.empty() && reach.blockTouched) break;
  }
  return reach;
}

}  // namespace

Entourage::Kind Entourage::kind() const { return node_->kind; }
const GroundSet& Entourage::ground() const { return node_->ground; }
Nat Entourage::metricRadius() const { return node_->radius; }
const SetExpr& Entourage::blockMember() const { return node_->member; }
const std::vector<std::pair<Element, Element>>& Entourage::relPairs() const {
  return node_->pairs;
}
const std::vector<Entourage>& Entourage::parts() const { return node_->kids; }
const SetExpr& Entourage::maskAllowed() const { return node_->member; }
bool Entourage::symmetricHint() const { return node_->symmetric; }

bool Entourage::relates(const Element& x, const Element& y) const {
  const auto& n = *node_;
  if (x == y) return true;
  switch (n.kind) {
    case Kind::Metric: {
      const Nat a = x.natValue(), b = y.natValue();
      return (a > b ? a - b : b - a) <= n.radius;
    }
    case Kind::FiniteRel:
      return std::binary_search(n.pairs.begin(), n.pairs.end(),
                                std::make_pair(x, y));
    case Kind::Block:
      return n.member.contains(x) && n.member.contains(y);
    case Kind::Product: {
      for (std::size_t i = 0; i < n.kids.size(); ++i)
        if (!n.kids[i].relates(x.items()[i], y.items()[i])) return false;
      return true;
    }
    case Kind::XorMask: {
      Nat diff = x.natValue() ^ y.natValue();
      for (Nat bit = 0; diff != 0; ++bit, diff >>= 1)
        if ((diff & 1) && !n.member.containsNat(bit)) return false;
      return true;
    }
    case Kind::SupportCyl: {
      const Element& base = n.ground.basepoint();
      std::set<Nat> keys;
      for (const auto& [k, v] : x.entries()) keys.insert(k);
      for (const auto& [k, v] : y.entries()) keys.insert(k);
      for (Nat k : keys) {
        const Element xv = supportValueAt(x, k, base);
        const Element yv = supportValueAt(y, k, base);
        if (n.member.containsNat(k)) {
          if (!n.kids[0].relates(xv, yv)) return false;
        } else if (xv != yv) {
          return false;
        }
      }
      return true;
    }
    case Kind::Glue: {
      const Entourage& coreEnt = n.kids[0];
      const Entourage& spineEnt = n.kids[1];
      const Element& e = n.ground.spineBase();
      const bool xCore = x.tag() == GroundSet::kCoreTag;
      const bool yCore = y.tag() == GroundSet::kCoreTag;
      // Comb carriers attach teeth at handle points; the wedge has a single
      // core point with no first-coordinate condition.
      const bool combLike = n.ground.core().same(n.ground.attachGround());
      auto inBeta = [&](const Element& alpha) { return n.member.contains(alpha); };
      auto handleNear = [&](const Element& corePt, const Element& alpha) {
        return combLike ? coreEnt.relates(corePt, alpha) : true;
      };
      if (xCore && yCore) return coreEnt.relates(x.payload(), y.payload());
      if (xCore && !yCore) {
        const Element& alpha = y.payload().items()[0];
        const Element& t = y.payload().items()[1];
        return handleNear(x.payload(), alpha) && inBeta(alpha) &&
               spineEnt.relates(e, t);
      }
      if (!xCore && yCore) {
        const Element& alpha = x.payload().items()[0];
        const Element& s = x.payload().items()[1];
        return handleNear(y.payload(), alpha) && inBeta(alpha) &&
               spineEnt.relates(s, e);
      }
      const Element& alpha = x.payload().items()[0];
      const Element& s = x.payload().items()[1];
      const Element& gamma = y.payload().items()[0];
      const Element& t = y.payload().items()[1];
      if (combLike && !coreEnt.relates(alpha, gamma)) return false;
      if (alpha == gamma) {
        if (s == t) return true;
        return inBeta(alpha) && spineEnt.relates(s, t);
      }
      return inBeta(alpha) && inBeta(gamma) && spineEnt.relates(s, e) &&
             spineEnt.relates(e, t);
    }
    case Kind::Compose: {
      // (E ∘ F)[x] = F[E[x]].
      if (auto mids = n.kids[0].ballList(x, 4096)) {
        for (const auto& z : *mids)
          if (n.kids[1].relates(z, y)) return true;
        return false;
      }
      if (auto mids = n.kids[1].inverseBallList(y, 4096)) {
        for (const auto& z : *mids)
          if (n.kids[0].relates(x, z)) return true;
        return false;
      }
      throw UnsupportedPresentationError(
          "composite relation with no enumerable side");
    }
    case Kind::UnionRel: {
      for (const auto& part : n.kids)
        if (part.relates(x, y)) return true;
      return false;
    }
    case Kind::Restrict:
      return n.member.contains(x) && n.member.contains(y) &&
             n.kids[0].relates(x, y);
    case Kind::PairFn: {
      const Nat a = x.natValue(), b = y.natValue();
      return n.fwd(a) == b || n.fwd(b) == a;
    }
    case Kind::BallMap:
      return n.ballFn(x).contains(y);
    case Kind::Saturator: {
      // Symmetric closure of the bounded-word reachability.
      auto one = saturatorReach(n, x, 1u << 16);
      if (one.points.count(y)) return true;
      if (one.blockTouched && !one.blockMaterialized && n.member.contains(y))
        return true;
      auto two = saturatorReach(n, y, 1u << 16);
      if (two.points.count(x)) return true;
      return two.blockTouched && !two.blockMaterialized && n.member.contains(x);
    }
  }
  return false;
}

std::optional<std::vector<Element>> Entourage::ballList(
    const Element& x, std::size_t sizeBudget) const {
  const auto& n = *node_;
  std::vector<Element> out;
  auto push = [&](Element e) -> bool {
    out.push_back(std::move(e));
    return out.size() <= sizeBudget;
  };
  switch (n.kind) {
    case Kind::Metric: {
      const Nat v = x.natValue();
      const Nat lo = v > n.radius ? v - n.radius : 0;
      auto size = n.ground.finiteSize();
      for (Nat y = lo; y <= v + n.radius; ++y) {
        if (size && y >= *size) break;
        if (!push(Element::nat(y))) return std::nullopt;
      }
      return out;
    }
    case Kind::FiniteRel: {
      out.push_back(x);
      auto it = std::lower_bound(
          n.pairs.begin(), n.pairs.end(), std::make_pair(x, Element::nat(0)),
          [](const auto& a, const auto& b) { return a.first < b.first; });
      for (; it != n.pairs.end() && it->first == x; ++it)
        if (!push(it->second)) return std::nullopt;
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case Kind::Block: {
      if (!n.member.contains(x)) return std::vector<Element>{x};
      Budget b;
      if (!n.member.finiteness(b).isTrue()) return std::nullopt;
      auto members = n.member.membersUpTo(Nat{1} << 20);
      if (members.size() > sizeBudget) return std::nullopt;
      return members;
    }
    case Kind::Product: {
      std::vector<std::vector<Element>> lists;
      std::size_t total = 1;
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        auto l = n.kids[i].ballList(x.items()[i], sizeBudget);
        if (!l) return std::nullopt;
        total *= l->size();
        if (total > sizeBudget) return std::nullopt;
        lists.push_back(std::move(*l));
      }
      std::vector<std::vector<Element>::size_type> idx(lists.size(), 0);
      for (;;) {
        std::vector<Element> items;
        for (std::size_t i = 0; i < lists.size(); ++i)
          items.push_back(lists[i][idx[i]]);
        out.push_back(Element::tuple(std::move(items)));
        std::size_t i = lists.size();
        for (; i-- > 0;) {
          if (++idx[i] < lists[i].size()) break;
          idx[i] = 0;
          if (i == 0) return out;
        }
        if (i == static_cast<std::size_t>(-1)) break;
      }
      return out;
    }
    case Kind::XorMask: {
      Budget b;
      if (!n.member.finiteness(b).isTrue()) {
        // Infinite flip set: the ball is infinite (up to encoding width).
        return std::nullopt;
      }
      const auto bits = n.member.natMembersUpTo(63);
      if (bits.size() > 20 || (Nat{1} << bits.size()) > sizeBudget)
        return std::nullopt;
      const Nat center = x.natValue();
      for (Nat sub = 0; sub < (Nat{1} << bits.size()); ++sub) {
        Nat mask = 0;
        for (std::size_t i = 0; i < bits.size(); ++i)
          if (sub & (Nat{1} << i)) mask |= Nat{1} << bits[i];
        Element cand = Element::nat(center ^ mask);
        if (n.ground.valid(cand)) out.push_back(std::move(cand));
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    case Kind::SupportCyl: {
      Budget b;
      // Positions where a change is possible: β members with a non-singleton
      // factor ball, plus the current support inside β.
      std::vector<Nat> positions;
      if (n.member.finiteness(b).isTrue()) {
        for (Nat k : n.member.natMembersUpTo(Nat{1} << 16)) positions.push_back(k);
      } else {
        // Infinite β: ball is infinite unless the factor entourage is trivial.
        return std::nullopt;
      }
      const Element& base = n.ground.basepoint();
      std::vector<std::vector<Element>> choices;
      std::size_t total = 1;
      for (Nat k : positions) {
        auto l = n.kids[0].ballList(supportValueAt(x, k, base), sizeBudget);
        if (!l) return std::nullopt;
        total *= l->size();
        if (total > sizeBudget) return std::nullopt;
        choices.push_back(std::move(*l));
      }
      std::vector<std::size_t> idx(positions.size(), 0);
      for (;;) {
        std::vector<std::pair<Nat, Element>> entries;
        for (const auto& [k, v] : x.entries())
          if (std::find(positions.begin(), positions.end(), k) ==
              positions.end())
            entries.emplace_back(k, v);
        for (std::size_t i = 0; i < positions.size(); ++i)
          if (choices[i][idx[i]] != base)
            entries.emplace_back(positions[i], choices[i][idx[i]]);
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        out.push_back(Element::support(std::move(entries)));
        std::size_t i = positions.size();
        bool advanced = false;
        for (; i-- > 0;) {
          if (++idx[i] < choices[i].size()) {
            advanced = true;
            std::fill(idx.begin() + static_cast<long>(i) + 1, idx.end(), 0);
            break;
          }
          idx[i] = 0;
        }
        if (!advanced) break;
        if (positions.empty()) break;
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case Kind::Glue: {
      const Entourage& coreEnt = n.kids[0];
      const Entourage& spineEnt = n.kids[1];
      const Element& e = n.ground.spineBase();
      const bool combLike = n.ground.core().same(n.ground.attachGround());
      auto spineNear = [&](const Element& s) {
        return spineEnt.ballList(s, sizeBudget);
      };
      // Teeth indexes reachable from a core point / across the wedge point.
      auto reachableIndexes =
          [&](const std::optional<Element>& from) -> std::optional<std::vector<Element>> {
        const SetExpr eligible =
            SetExpr::intersectionOf(n.ground.attach(), n.member);
        if (combLike && from) {
          auto cb = coreEnt.ballList(*from, sizeBudget);
          if (!cb) return std::nullopt;
          std::vector<Element> keep;
          for (const auto& c : *cb)
            if (eligible.contains(c)) keep.push_back(c);
          return keep;
        }
        Budget b;
        if (!eligible.finiteness(b).isTrue()) return std::nullopt;
        auto members = eligible.membersUpTo(b.scanCap());
        if (members.size() > sizeBudget) return std::nullopt;
        return members;
      };
      auto pushTeethAt = [&](const std::vector<Element>& indexes) -> bool {
        auto eBall = spineNear(e);
        if (!eBall) return false;
        for (const auto& gamma : indexes)
          for (const auto& t : *eBall) {
            if (t == e) continue;
            out.push_back(Element::tagged(GroundSet::kToothTag,
                                          Element::tuple({gamma, t})));
          }
        return true;
      };
      if (x.tag() == GroundSet::kCoreTag) {
        auto cb = coreEnt.ballList(x.payload(), sizeBudget);
        if (!cb) return std::nullopt;
        for (const auto& c : *cb)
          out.push_back(Element::tagged(GroundSet::kCoreTag, c));
        auto idx = reachableIndexes(x.payload());
        if (!idx || !pushTeethAt(*idx)) return std::nullopt;
      } else {
        const Element alpha = x.payload().items()[0];
        const Element s = x.payload().items()[1];
        if (!n.member.contains(alpha)) return std::vector<Element>{x};
        auto sb = spineNear(s);
        if (!sb) return std::nullopt;
        for (const auto& t : *sb) {
          if (t == e) continue;
          out.push_back(Element::tagged(GroundSet::kToothTag,
                                        Element::tuple({alpha, t})));
        }
        if (spineEnt.relates(s, e)) {
          // Through the wedge point: core points near the attach index and
          // other teeth near their base.
          if (combLike) {
            auto cb = coreEnt.ballList(alpha, sizeBudget);
            if (!cb) return std::nullopt;
            for (const auto& c : *cb)
              out.push_back(Element::tagged(GroundSet::kCoreTag, c));
          } else {
            auto coreSize = n.ground.core().finiteSize();
            for (Nat ci = 0; coreSize && ci < *coreSize; ++ci)
              out.push_back(Element::tagged(GroundSet::kCoreTag,
                                            n.ground.core().decode(ci)));
          }
          auto idx = reachableIndexes(alpha);
          if (!idx) return std::nullopt;
          std::vector<Element> others;
          for (const auto& c : *idx)
            if (c != alpha) others.push_back(c);
          if (!pushTeethAt(others)) return std::nullopt;
        }
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      if (out.size() > sizeBudget) return std::nullopt;
      return out;
    }
    case Kind::Compose: {
      auto first = n.kids[0].ballList(x, sizeBudget);
      if (!first) return std::nullopt;
      std::set<Element> acc;
      for (const auto& z : *first) {
        auto second = n.kids[1].ballList(z, sizeBudget);
        if (!second) return std::nullopt;
        acc.insert(second->begin(), second->end());
        if (acc.size() > sizeBudget) return std::nullopt;
      }
      return std::vector<Element>(acc.begin(), acc.end());
    }
    case Kind::UnionRel: {
      std::set<Element> acc;
      for (const auto& part : n.kids) {
        auto l = part.ballList(x, sizeBudget);
        if (!l) return std::nullopt;
        acc.insert(l->begin(), l->end());
        if (acc.size() > sizeBudget) return std::nullopt;
      }
      acc.insert(x);
      return std::vector<Element>(acc.begin(), acc.end());
    }
    case Kind::Restrict: {
      if (!n.member.contains(x)) return std::vector<Element>{x};
      auto l = n.kids[0].ballList(x, sizeBudget);
      if (!l) return std::nullopt;
      for (auto& e : *l)
        if (n.member.contains(e)) out.push_back(std::move(e));
      return out;
    }
    case Kind::PairFn: {
      const Nat v = x.natValue();
      out.push_back(x);
      Element fw = Element::nat(n.fwd(v));
      if (n.ground.valid(fw)) out.push_back(std::move(fw));
      if (n.inv) {
        if (auto pre = n.inv(v)) out.push_back(Element::nat(*pre));
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case Kind::BallMap: {
      const SetExpr b = n.ballFn(x);
      Budget budget;
      if (!b.finiteness(budget).isTrue()) return std::nullopt;
      auto members = b.membersUpTo(budget.scanCap());
      if (members.size() > sizeBudget) return std::nullopt;
      return members;
    }
    case Kind::Saturator: {
      auto reach = saturatorReach(n, x, sizeBudget);
      if (reach.blockTouched && !reach.blockMaterialized) return std::nullopt;
      if (reach.points.size() > sizeBudget) return std::nullopt;
      return std::vector<Element>(reach.points.begin(), reach.points.end());
    }
  }
  return std::nullopt;
}

std::optional<std::vector<Element>> Entourage::inverseBallList(
    const Element& x, std::size_t sizeBudget) const {
  if (node_->symmetric) return ballList(x, sizeBudget);
  return inverted().ballList(x, sizeBudget);
}

SetExpr Entourage::ball(const Element& x) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Metric: {
      const Nat v = x.natValue();
      return SetExpr::interval(n.ground, v > n.radius ? v - n.radius : 0,
                               v + n.radius);
    }
    case Kind::Block:
      if (n.member.contains(x))
        return SetExpr::unionOf(n.member, SetExpr::singletonOf(n.ground, x));
      return SetExpr::singletonOf(n.ground, x);
    case Kind::XorMask:
      return SetExpr::xorCylinder(n.ground, x.natValue(), n.member);
    case Kind::Product: {
      std::vector<SetExpr> sides;
      for (std::size_t i = 0; i < n.kids.size(); ++i)
        sides.push_back(n.kids[i].ball(x.items()[i]));
      return SetExpr::rectangle(n.ground, std::move(sides));
    }
    case Kind::BallMap:
      return n.ballFn(x);
    default: {
      if (auto list = ballList(x, 1u << 12))
        return SetExpr::finite(n.ground, std::move(*list));
      Entourage self = *this;
      return SetExpr::procedural(
          n.ground, "(ball " + render() + " " + x.render() + ")",
          [self, x](const Element& y) { return self.relates(x, y); });
    }
  }
}

Entourage Entourage::inverted() const {
  const auto& n = *node_;
  if (n.symmetric) return *this;
  switch (n.kind) {
    case Kind::FiniteRel: {
      std::vector<std::pair<Element, Element>> swapped;
      swapped.reserve(n.pairs.size());
      for (const auto& [a, b] : n.pairs) swapped.emplace_back(b, a);
      return finiteRel(n.ground, std::move(swapped));
    }
    case Kind::Product: {
      std::vector<Entourage> inv;
      for (const auto& k : n.kids) inv.push_back(k.inverted());
      return productOf(n.ground, std::move(inv));
    }
    case Kind::SupportCyl:
      return supportCyl(n.ground, n.member, n.kids[0].inverted());
    case Kind::Glue:
      return glue(n.ground, n.member, n.kids[0].inverted(),
                  n.kids[1].inverted());
    case Kind::Compose:
      return compose(n.kids[1].inverted(), n.kids[0].inverted());
    case Kind::UnionRel: {
      std::vector<Entourage> inv;
      for (const auto& k : n.kids) inv.push_back(k.inverted());
      return unionOf(n.ground, std::move(inv));
    }
    case Kind::Restrict:
      return restrictTo(n.kids[0].inverted(), n.member);
    case Kind::BallMap:
      if (!n.invBallFn)
        throw UnsupportedPresentationError(
            "ball-map entourage without a computable inverse image");
      return ballMap(n.ground, n.name + "^{-1}", n.invBallFn, n.ballFn);
    default:
      return *this;
  }
}

std::string Entourage::render() const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Metric:
      return "(metric " + std::to_string(n.radius) + ")";
    case Kind::FiniteRel: {
      std::string out = "(pairs";
      for (const auto& [a, b] : n.pairs)
        out += " (" + a.render() + " " + b.render() + ")";
      return out + ")";
    }
    case Kind::Block:
      return "(block " + n.member.render() + ")";
    case Kind::Product: {
      std::string out = "(product-ent";
      for (const auto& k : n.kids) out += " " + k.render();
      return out + ")";
    }
    case Kind::XorMask:
      return "(xor-mask " + n.member.render() + ")";
    case Kind::SupportCyl:
      return "(support-ent " + n.member.render() + " " + n.kids[0].render() + ")";
    case Kind::Glue:
      return "(glue-ent " + n.member.render() + " " + n.kids[0].render() + " " +
             n.kids[1].render() + ")";
    case Kind::Compose:
      return "(compose " + n.kids[0].render() + " " + n.kids[1].render() + ")";
    case Kind::UnionRel: {
      std::string out = "(union-ent";
      for (const auto& k : n.kids) out += " " + k.render();
      return out + ")";
    }
    case Kind::Restrict:
      return "(restrict-ent " + n.kids[0].render() + " " + n.member.render() +
             ")";
    case Kind::PairFn:
      return "(pair-fn " + n.name + ")";
    case Kind::BallMap:
      return "(ball-map " + n.name + ")";
    case Kind::Saturator: {
      std::string out = "(saturator " + std::to_string(n.radius) + " " +
                        n.member.render();
      for (const auto& k : n.kids) out += " " + k.render();
      return out + ")";
    }
  }
  return "";
}

SetExpr applyEntourage(const Entourage& e, const SetExpr& s,
                       const Budget& budget) {
  if (!e.ground().same(s.ground()))
    throw GroundMismatchError("entourage applied across grounds");

  // Metric over ℕ with exact tier: shift arithmetic stays exact.
  if (e.kind() == Entourage::Kind::Metric && s.isExact() &&
      s.ground().kind() == GroundSet::Kind::Naturals) {
    const Nat r = e.metricRadius();
    if (s.kind() == SetExpr::Kind::Finite) {
      std::vector<Nat> values;
      for (const auto& el : s.finiteElems()) {
        const Nat v = el.natValue();
        for (Nat y = (v > r ? v - r : 0); y <= v + r; ++y) values.push_back(y);
      }
      return SetExpr::finiteNats(s.ground(), std::move(values));
    }
    // Eventually periodic: x ∈ E_r[S] iff [x-r, x+r] meets S. Beyond
    // s.threshold + r the answer depends on x mod p only.
    const Nat p = s.evPeriod();
    const Nat thr = s.evThreshold() + r + 1;
    std::vector<Nat> prelude;
    for (Nat x = 0; x < thr; ++x) {
      bool hit = false;
      for (Nat y = (x > r ? x - r : 0); y <= x + r && !hit; ++y)
        if (s.containsNat(y)) hit = true;
      if (hit) prelude.push_back(x);
    }
    std::vector<Nat> tail;
    for (Nat rr = 0; rr < p; ++rr) {
      bool hit = false;
      // Representative far beyond the threshold.
      const Nat rep = thr + ((rr + p - thr % p) % p);
      for (Nat y = rep - r; y <= rep + r && !hit; ++y)
        if (s.containsNat(y)) hit = true;
      if (hit) tail.push_back(rr);
    }
    return SetExpr::evPeriodic(s.ground(), std::move(prelude), p, std::move(tail),
                               thr);
  }

  // Finite sets with enumerable balls: the image is an explicit finite set.
  if (s.kind() == SetExpr::Kind::Finite) {
    std::vector<Element> out;
    bool enumerable = true;
    for (const auto& m : s.finiteElems()) {
      auto ball = e.ballList(m, 1u << 14);
      if (!ball) {
        enumerable = false;
        break;
      }
      out.insert(out.end(), ball->begin(), ball->end());
    }
    if (enumerable) return SetExpr::finite(s.ground(), std::move(out));
  }

  if (e.kind() == Entourage::Kind::Block) {
    const SetExpr& member = e.blockMember();
    const SetExpr overlap = SetExpr::intersectionOf(s, member);
    bool meets;
    if (overlap.isExact()) {
      meets = !overlap.isEmptyFinite();
    } else {
      meets = !overlap.membersUpTo(budget.horizon).empty();
    }
    return meets ? SetExpr::unionOf(s, member) : s;
  }

  // General case: y ∈ E[S] iff the inverse ball of y meets S.
  const Entourage inv = e.inverted();
  return SetExpr::procedural(
      s.ground(), "(image " + e.render() + " " + s.render() + ")",
      [inv, s](const Element& y) {
        if (auto pre = inv.ballList(y, 1u << 12)) {
          for (const auto& z : *pre)
            if (s.contains(z)) return true;
          return false;
        }
        throw UnsupportedPresentationError(
            "entourage image needs an enumerable inverse ball");
      });
}

}  // namespace ballean
