#include "ballean/constructions.hpp"

#include <algorithm>

namespace ballean {

namespace {

bool presentationBounded(const CoarsePresentation& p) {
  if (p.payload().boundedByConstruction) return true;
  switch (p.provenance()) {
    case Prov::FiniteGround:
      return true;
    case Prov::MetricNat:
    case Prov::Generated:
      return false;
    default:
      return p.ground().finiteSize().has_value();
  }
}

bool presentationMetrizableHint(const CoarsePresentation& p) {
  return p.countableBase().isTrue();
}

Entourage identityOn(const GroundSet& g) {
  return Entourage::finiteRel(g, {});
}

// Countable-base analysis shared by the bornological products: the base is
// indexed by pairs (member, radii over the member). A countable cofinal
// family exists exactly when the index bornology has one and infinite
// members never meet unbounded factors (otherwise the radii functions over an
// infinite member diagonalize past any countable family).
Verdict supportedBaseVerdict(const BornologyPresentation& b, bool factorsBounded,
                             const Budget& budget) {
  Verdict cb = b.countableBase();
  if (cb.isFalse())
    return Verdict::no(cb.witness(), "index bornology without a countable base");
  Verdict fin = b.allBaseMembersFinite(budget);
  if (cb.isTrue() && fin.isTrue())
    return Verdict::yes("countable base of finite members, finitely many radii each");
  if (cb.isTrue() && factorsBounded)
    return Verdict::yes("countable base, one saturating radius per member");
  if (cb.isTrue() && fin.isFalse())
    return Verdict::no(fin.witness(),
                       "radii over an infinite member diagonalize past any "
                       "countable family");
  return Verdict::unknown(budget.horizon, "base shape undetermined");
}

}  // namespace

CoarsePresentation productOf(std::vector<CoarsePresentation> factors) {
  if (factors.empty()) throw PreconditionError("product of an empty family");
  if (factors.size() == 1) return factors.front();
  std::vector<GroundSet> grounds;
  for (const auto& f : factors) grounds.push_back(f.ground());
  GroundSet g = GroundSet::tupleSpace(std::move(grounds));

  Verdict cb = Verdict::yes("diagonal chain over the factor chains");
  for (const auto& f : factors) {
    if (f.countableBase().isFalse()) {
      cb = Verdict::no(f.countableBase().witness(),
                       "a factor has no countable base, and factors embed");
      break;
    }
    if (!f.countableBase().isTrue())
      cb = Verdict::unknown(0, "factor base undetermined");
  }

  std::string describe = "(product";
  for (const auto& f : factors) describe += " " + f.describe();
  describe += ")";

  CoarsePresentation::Payload payload;
  payload.factors = factors;
  payload.ballsFinite = std::all_of(
      factors.begin(), factors.end(),
      [](const CoarsePresentation& f) { return f.payload().ballsFinite; });
  payload.boundedByConstruction =
      std::all_of(factors.begin(), factors.end(), [](const CoarsePresentation& f) {
        return presentationBounded(f);
      });

  auto chain = [g, factors](Nat i) {
    std::vector<Entourage> comps;
    comps.reserve(factors.size());
    for (const auto& f : factors) comps.push_back(f.at(i));
    return Entourage::productOf(g, std::move(comps));
  };
  return CoarsePresentation::make(g, Prov::Product, std::move(chain),
                                  std::move(cb), std::move(describe),
                                  std::move(payload), std::nullopt);
}

CoarsePresentation bProduct(const BornologyPresentation& indexBornology,
                            const FamilySpec& family, const Budget& budget) {
  if (!indexBornology.baseMemberAt(0))
    throw PreconditionError(
        "bornological product needs a base-presented index bornology");

  if (family.kind == FamilySpec::Kind::Explicit) {
    const auto& members = family.members;
    if (members.empty()) throw PreconditionError("empty family");
    std::vector<GroundSet> grounds;
    for (const auto& m : members) grounds.push_back(m.space.ground());
    GroundSet g = GroundSet::tupleSpace(std::move(grounds));
    bool allBounded = true;
    for (const auto& m : members) allBounded &= presentationBounded(m.space);

    BornologyPresentation idx = indexBornology;
    std::vector<Pointed> ms = members;
    auto chain = [g, idx, ms](Nat i) {
      const SetExpr beta = *idx.baseMemberAt(i);
      std::vector<Entourage> comps;
      for (std::size_t a = 0; a < ms.size(); ++a)
        comps.push_back(beta.containsNat(a) ? ms[a].space.at(i)
                                            : identityOn(ms[a].space.ground()));
      return Entourage::productOf(g, std::move(comps));
    };
    CoarsePresentation::Payload payload;
    payload.bornology = indexBornology;
    payload.factorsBounded = allBounded;
    payload.ballsFinite =
        std::all_of(ms.begin(), ms.end(), [](const Pointed& m) {
          return m.space.payload().ballsFinite;
        });
    payload.boundedByConstruction =
        allBounded && indexBornology.unbounded(budget).isFalse();
    for (const auto& m : ms) payload.factors.push_back(m.space);
    return CoarsePresentation::make(
        g, Prov::BProduct, std::move(chain),
        supportedBaseVerdict(indexBornology, allBounded, budget),
        "(b-product " + indexBornology.render() + " explicit)",
        std::move(payload), std::nullopt);
  }

  const Pointed& factor = *family.uniform;
  SetExpr index = family.indexSet ? *family.indexSet
                                  : SetExpr::full(indexBornology.ground());
  GroundSet g =
      GroundSet::finiteSupport(index, factor.space.ground(), factor.basepoint);
  const bool bounded = presentationBounded(factor.space);

  BornologyPresentation idx = indexBornology;
  CoarsePresentation fs = factor.space;
  auto chain = [g, idx, fs](Nat i) {
    return Entourage::supportCyl(g, *idx.baseMemberAt(i), fs.at(i));
  };
  CoarsePresentation::Payload payload;
  payload.bornology = indexBornology;
  payload.factorsBounded = bounded;
  payload.factorsUnboundedMetrizable =
      !bounded && presentationMetrizableHint(factor.space);
  payload.ballsFinite = factor.space.payload().ballsFinite &&
                        indexBornology.allBaseMembersFinite(budget).isTrue();
  payload.boundedByConstruction =
      bounded && indexBornology.unbounded(budget).isFalse();
  payload.factors.push_back(factor.space);
  payload.pointedAt = Element::support({});
  return CoarsePresentation::make(
      g, Prov::BProduct, std::move(chain),
      supportedBaseVerdict(indexBornology, bounded, budget),
      "(b-product " + indexBornology.render() + " uniform)", std::move(payload),
      std::nullopt);
}

CoarsePresentation macrocube(const BornologyPresentation& indexBornology,
                             const Budget& budget) {
  if (!indexBornology.baseMemberAt(0))
    throw PreconditionError("macrocube needs a base-presented index bornology");
  GroundSet g = GroundSet::subsetsOf(SetExpr::full(indexBornology.ground()));
  BornologyPresentation idx = indexBornology;
  auto chain = [g, idx](Nat i) {
    return Entourage::xorMask(g, *idx.baseMemberAt(i));
  };
  CoarsePresentation::Payload payload;
  payload.bornology = indexBornology;
  payload.factorsBounded = true;
  payload.ballsFinite = indexBornology.allBaseMembersFinite(budget).isTrue();
  payload.boundedByConstruction = indexBornology.unbounded(budget).isFalse();
  payload.pointedAt = Element::nat(0);
  // Doubleton factors are bounded: Thm-6 shape, one entourage per member.
  return CoarsePresentation::make(
      g, Prov::Macrocube, std::move(chain),
      supportedBaseVerdict(indexBornology, true, budget),
      "(macrocube " + indexBornology.render() + ")", std::move(payload),
      std::nullopt);
}

namespace {

CoarsePresentation glueFamily(Prov tag, const CoarsePresentation& core,
                              const GroundSet& attachGround,
                              const SetExpr& attach, const Pointed& spine,
                              const BornologyPresentation& beta,
                              Verdict baseVerdict, std::string describe,
                              CoarsePresentation::Payload payload) {
  GroundSet g = GroundSet::glued(core.ground(), attachGround, attach,
                                 spine.space.ground(), spine.basepoint);
  CoarsePresentation coreP = core;
  CoarsePresentation spineP = spine.space;
  BornologyPresentation b = beta;
  auto chain = [g, coreP, spineP, b](Nat i) -> Entourage {
    auto member = b.baseMemberAt(i);
    if (!member)
      throw UnsupportedPresentationError(
          "glued construction needs a base-presented index bornology");
    return Entourage::glue(g, *member, coreP.at(i), spineP.at(i));
  };
  // Wedges are pointed at the identified basepoint; combs stay unpointed.
  if (tag == Prov::Bouquet)
    payload.pointedAt =
        Element::tagged(GroundSet::kCoreTag, core.ground().decode(0));
  return CoarsePresentation::make(g, tag, std::move(chain),
                                  std::move(baseVerdict), std::move(describe),
                                  std::move(payload), std::nullopt);
}

}  // namespace

CoarsePresentation bouquet(const BornologyPresentation& indexBornology,
                           const FamilySpec& family, const Budget& budget) {
  if (family.kind != FamilySpec::Kind::Uniform)
    throw PreconditionError(
        "bouquets take one spine presentation repeated over the index set");
  const Pointed& spine = *family.uniform;
  const bool bounded = presentationBounded(spine.space);
  SetExpr index = family.indexSet ? *family.indexSet
                                  : SetExpr::full(indexBornology.ground());
  CoarsePresentation::Payload payload;
  payload.bornology = indexBornology;
  payload.factorsBounded = bounded;
  payload.factorsUnboundedMetrizable =
      !bounded && presentationMetrizableHint(spine.space);
  payload.ballsFinite = spine.space.payload().ballsFinite &&
                        indexBornology.allBaseMembersFinite(budget).isTrue();
  payload.boundedByConstruction =
      bounded && indexBornology.unbounded(budget).isFalse();
  payload.factors.push_back(spine.space);
  // Balls at the wedge point see the whole radii tuple over a member, so the
  // countable-base analysis of the ambient bornological product applies
  // unchanged.
  Verdict cb = supportedBaseVerdict(indexBornology, bounded, budget);
  return glueFamily(Prov::Bouquet, boundedFinite(1), indexBornology.ground(),
                    index, spine, indexBornology, std::move(cb),
                    "(bouquet " + indexBornology.render() + ")",
                    std::move(payload));
}

CoarsePresentation comb(const CoarsePresentation& handle, const SetExpr& attach,
                        const FamilySpec& spines, const Budget& budget) {
  if (spines.kind != FamilySpec::Kind::Uniform)
    throw PreconditionError(
        "combs take one spine presentation repeated over the attach set");
  if (!attach.ground().same(handle.ground()))
    throw GroundMismatchError("attach set must live in the handle ground");
  const Pointed& spine = *spines.uniform;
  // The spine index bornology is always the one induced by the handle.
  BornologyPresentation induced =
      BornologyPresentation::restrictedTo(boundedSets(handle), attach);
  const bool bounded = presentationBounded(spine.space);

  Verdict cb = Verdict::unknown(budget.horizon, "induced bornology shape");
  // Metric handles have finite bounded sets, so the induced base is a chain
  // of finite sets.
  if (handle.provenance() == Prov::MetricNat) {
    if (spine.space.countableBase().isTrue() || bounded)
      cb = Verdict::yes(
          "handle chain times the induced finite-member bouquet chain");
  } else if (handle.countableBase().isFalse()) {
    cb = Verdict::no(handle.countableBase().witness(),
                     "handle has no countable base");
  }
  CoarsePresentation::Payload payload;
  payload.bornology = induced;
  payload.parent = std::make_shared<const CoarsePresentation>(handle);
  payload.subset = attach;
  payload.factorsBounded = bounded;
  payload.factorsUnboundedMetrizable =
      !bounded && presentationMetrizableHint(spine.space);
  payload.ballsFinite = handle.payload().ballsFinite &&
                        spine.space.payload().ballsFinite &&
                        handle.provenance() == Prov::MetricNat;
  payload.factors.push_back(spine.space);
  return glueFamily(Prov::Comb, handle, handle.ground(), attach, spine, induced,
                    std::move(cb),
                    "(comb " + handle.describe() + " " + attach.render() + ")",
                    std::move(payload));
}

CoarsePresentation smallestCompatible(const BornologyPresentation& b) {
  if (!b.baseMemberAt(0))
    throw PreconditionError(
        "the smallest compatible structure needs a base-presented bornology");
  BornologyPresentation bb = b;
  auto chain = [bb](Nat i) { return Entourage::block(*bb.baseMemberAt(i)); };
  CoarsePresentation::Payload payload;
  payload.bornology = b;
  {
    Budget budget;
    payload.ballsFinite = b.allBaseMembersFinite(budget).isTrue();
    payload.boundedByConstruction = b.unbounded(budget).isFalse();
  }
  Verdict cb = b.countableBase();
  if (cb.isTrue())
    cb = Verdict::yes("block chain over the countable base: " + cb.note());
  return CoarsePresentation::make(b.ground(), Prov::Down, std::move(chain), cb,
                                  "(down " + b.render() + ")",
                                  std::move(payload), std::nullopt);
}

Verdict largestMembership(const BornologyPresentation& b, const Entourage& e,
                          const Budget& budget) {
  if (!e.ground().same(b.ground()))
    throw GroundMismatchError("entourage over a different ground than the bornology");
  if (!e.symmetricHint()) {
    // Structural asymmetry; confirm with a concrete pair when possible.
    const auto pts = [&] {
      std::vector<Element> out;
      const auto size = e.ground().finiteSize();
      const Nat stop =
          size ? std::min<Nat>(std::min<Nat>(budget.horizon, 64), *size - 1)
               : std::min<Nat>(budget.horizon, 64);
      for (Nat i = 0; i <= stop; ++i) out.push_back(e.ground().decode(i));
      return out;
    }();
    for (const auto& x : pts)
      for (const auto& y : pts)
        if (e.relates(x, y) != e.relates(y, x))
          return Verdict::no("(" + x.render() + ", " + y.render() + ")",
                             "not symmetric");
    return Verdict::no(e.render(), "presentation is not symmetric");
  }
  for (Nat i = 0; i < budget.indexCap(); ++i) {
    auto member = b.baseMemberAt(i);
    if (!member) break;
    const SetExpr image = applyEntourage(e, *member, budget);
    Verdict v = b.member(image, budget);
    if (v.isFalse())
      return Verdict::no("E[" + member->render() + "]",
                         "image of a member escapes the bornology: " + v.note());
    if (v.isUnknown())
      return Verdict::unknown(budget.horizon,
                              "membership of an image undecided: " + v.note());
  }
  return Verdict::yes("symmetric, images of base members stay members");
}

CoarsePresentation largestCompatible(const BornologyPresentation& b,
                                     std::vector<Entourage> witnesses) {
  if (!b.baseMemberAt(0))
    throw PreconditionError(
        "the largest compatible structure needs a base-presented bornology");
  BornologyPresentation bb = b;
  std::vector<Entourage> ws = std::move(witnesses);
  GroundSet g = b.ground();
  auto chain = [bb, ws](Nat i) -> Entourage {
    const Nat steps = 1 + std::min<Nat>(2, i / 4);
    return Entourage::saturator(*bb.baseMemberAt(i), ws, steps);
  };
  CoarsePresentation::Payload payload;
  payload.bornology = b;
  payload.witnesses = ws;
  Budget budget;
  Verdict cb =
      b.unbounded(budget).isFalse()
          ? Verdict::yes("bounded bornology: the full square is cofinal")
          : Verdict::unknown(0,
                             "ranges over all admissible symmetric relations; "
                             "enumeration is an under-approximation");
  return CoarsePresentation::make(g, Prov::Up, std::move(chain), cb,
                                  "(up " + b.render() + ")", std::move(payload),
                                  std::nullopt);
}

}  // namespace ballean
