#include "ballean/instance.hpp"

#include <algorithm>

namespace ballean {

namespace {

[[noreturn]] void evalError(const Sexpr& at, const std::string& msg) {
  throw ParseError(msg, at.line, at.col);
}

Nat asNat(const Sexpr& e) {
  if (!e.isInteger() || e.integerValue() < 0)
    evalError(e, "expected a natural number");
  return static_cast<Nat>(e.integerValue());
}

Element parseElement(const Sexpr& e) {
  if (e.isInteger()) return Element::nat(asNat(e));
  if (!e.isList()) evalError(e, "expected an element");
  const std::string head = e.head();
  const auto& items = e.items();
  if (head == "tuple") {
    std::vector<Element> parts;
    for (std::size_t i = 1; i < items.size(); ++i)
      parts.push_back(parseElement(items[i]));
    return Element::tuple(std::move(parts));
  }
  if (head == "tag") {
    if (items.size() != 3) evalError(e, "tag takes a label and a payload");
    return Element::tagged(asNat(items[1]), parseElement(items[2]));
  }
  if (head == "support") {
    std::vector<std::pair<Nat, Element>> entries;
    for (std::size_t i = 1; i < items.size(); ++i) {
      if (!items[i].isList() || items[i].items().size() != 2)
        evalError(items[i], "support entries are (index value)");
      entries.emplace_back(asNat(items[i].items()[0]),
                           parseElement(items[i].items()[1]));
    }
    return Element::support(std::move(entries));
  }
  if (head == "mask") {
    Nat mask = 0;
    for (std::size_t i = 1; i < items.size(); ++i)
      mask |= Nat{1} << asNat(items[i]);
    return Element::nat(mask);
  }
  evalError(e, "unknown element form " + head);
}

std::optional<std::function<Nat(Nat)>> namedGenerator(const std::string& name) {
  if (name == "pow2") return [](Nat k) { return Nat{1} << k; };
  if (name == "pow4") return [](Nat k) { return Nat{1} << (2 * k); };
  if (name == "two-pow4") return [](Nat k) { return Nat{2} << (2 * k); };
  if (name == "squares") return [](Nat k) { return k * k; };
  if (name == "cubes") return [](Nat k) { return k * k * k; };
  if (name == "fib")
    return [](Nat k) {
      Nat a = 1, b = 2;
      for (Nat i = 0; i < k; ++i) {
        const Nat c = a + b;
        a = b;
        b = c;
      }
      return a;
    };
  return std::nullopt;
}

std::optional<MapValue> namedMap(const std::string& name) {
  if (name == "identity")
    return MapValue{"identity", [](const Element& e) { return e; }};
  if (name == "double")
    return MapValue{"double", [](const Element& e) {
                      return Element::nat(2 * e.natValue());
                    }};
  if (name == "square")
    return MapValue{"square", [](const Element& e) {
                      const Nat v = e.natValue();
                      return Element::nat(v * v);
                    }};
  if (name == "half")
    return MapValue{"half", [](const Element& e) {
                      return Element::nat(e.natValue() / 2);
                    }};
  return std::nullopt;
}

BornologyPresentation namedChain(const Sexpr& at, const std::string& name) {
  GroundSet nat = GroundSet::naturals();
  if (name == "intervals")
    return BornologyPresentation::chainBase(
        nat, "intervals",
        [nat](Nat i) { return SetExpr::interval(nat, 0, i); }, true, true);
  if (name == "evens-blocks")
    return BornologyPresentation::chainBase(
        nat, "evens-blocks",
        [nat](Nat i) {
          return SetExpr::unionOf(SetExpr::arithmetic(nat, 2, {0}),
                                  SetExpr::interval(nat, 0, i));
        },
        false, true);
  evalError(at, "unknown chain family " + name);
}

const Sexpr* keywordArg(const Sexpr& form, const std::string& key) {
  const auto& items = form.items();
  for (std::size_t i = 0; i + 1 < items.size(); ++i)
    if (items[i].isSymbol(key)) return &items[i + 1];
  return nullptr;
}

bool hasKeyword(const Sexpr& form, const std::string& key) {
  for (const auto& item : form.items())
    if (item.isSymbol(key)) return true;
  return false;
}

// Positional (non-keyword) arguments after the head.
std::vector<const Sexpr*> positionalArgs(const Sexpr& form, std::size_t skip) {
  std::vector<const Sexpr*> out;
  const auto& items = form.items();
  for (std::size_t i = skip; i < items.size(); ++i) {
    if (items[i].isSymbol() && !items[i].sym().empty() &&
        items[i].sym()[0] == ':') {
      ++i;  // skip keyword value
      continue;
    }
    out.push_back(&items[i]);
  }
  return out;
}

}  // namespace

Value Runner::eval(const Sexpr& e) {
  if (e.isSymbol()) {
    auto it = env_.find(e.sym());
    if (it == env_.end()) evalError(e, "unresolved name " + e.sym());
    return it->second;
  }
  if (!e.isList() || e.items().empty() || !e.items()[0].isSymbol())
    evalError(e, "expected a node-labeled form");
  const std::string head = e.head();
  const auto& items = e.items();
  const GroundSet nat = GroundSet::naturals();

  auto evalSet = [&](const Sexpr& s) -> SetExpr {
    Value v = eval(s);
    if (auto* set = std::get_if<SetExpr>(&v)) return *set;
    evalError(s, "expected a set expression");
  };
  auto evalBorn = [&](const Sexpr& s) -> BornologyPresentation {
    Value v = eval(s);
    if (auto* b = std::get_if<BornologyPresentation>(&v)) return *b;
    evalError(s, "expected a bornology");
  };
  auto evalBallean = [&](const Sexpr& s) -> BalleanExpr {
    Value v = eval(s);
    if (auto* b = std::get_if<BalleanExpr>(&v)) return *b;
    evalError(s, "expected a ballean");
  };
  auto evalEnt = [&](const Sexpr& s) -> Entourage {
    Value v = eval(s);
    if (auto* ent = std::get_if<Entourage>(&v)) return *ent;
    evalError(s, "expected an entourage");
  };
  auto groundArg = [&](std::size_t idx) -> GroundSet {
    if (items.size() <= idx) return nat;
    const Sexpr& g = items[idx];
    if (g.isSymbol("nat") || g.isSymbol("omega")) return nat;
    if (g.isList() && g.head() == "points")
      return GroundSet::finitePoints(asNat(g.items()[1]));
    evalError(g, "expected a ground (nat | omega | (points n))");
  };
  auto parseFamily = [&](const Sexpr& f) -> BalleanExpr::ExprFamily {
    BalleanExpr::ExprFamily fam;
    if (f.isList() && f.head() == "rays") {
      fam.kind = BalleanExpr::ExprFamily::Kind::Uniform;
      fam.uniform =
          std::make_shared<const BalleanExpr>(BalleanExpr::metricNatExpr());
      fam.uniformBase = Element::nat(0);
      return fam;
    }
    if (f.isList() && f.head() == "doubletons") {
      fam.kind = BalleanExpr::ExprFamily::Kind::Uniform;
      fam.uniform =
          std::make_shared<const BalleanExpr>(BalleanExpr::finitePoints(2));
      fam.uniformBase = Element::nat(0);
      return fam;
    }
    if (f.isList() && f.head() == "spines") {
      fam.kind = BalleanExpr::ExprFamily::Kind::Uniform;
      fam.uniform = std::make_shared<const BalleanExpr>(evalBallean(f.items()[1]));
      fam.uniformBase = f.items().size() > 2 ? parseElement(f.items()[2])
                                             : Element::nat(0);
      return fam;
    }
    if (f.isList() && f.head() == "family") {
      fam.kind = BalleanExpr::ExprFamily::Kind::Explicit;
      for (std::size_t i = 1; i < f.items().size(); ++i) {
        const Sexpr& m = f.items()[i];
        if (m.isList() && m.head() == "pointed") {
          fam.members.push_back(evalBallean(m.items()[1]));
          fam.basepoints.push_back(parseElement(m.items()[2]));
        } else {
          fam.members.push_back(evalBallean(m));
          fam.basepoints.push_back(Element::nat(0));
        }
      }
      return fam;
    }
    evalError(f, "expected a family: (rays) | (doubletons) | (spines X) | (family ...)");
  };

  // --- sets ---
  if (head == "finite") {
    std::vector<Element> elems;
    for (std::size_t i = 1; i < items.size(); ++i)
      elems.push_back(parseElement(items[i]));
    return SetExpr::finite(nat, std::move(elems));
  }
  if (head == "range")
    return SetExpr::interval(nat, asNat(items[1]), asNat(items[2]));
  if (head == "evens") return SetExpr::arithmetic(nat, 2, {0});
  if (head == "odds") return SetExpr::arithmetic(nat, 2, {1});
  if (head == "all-nat") return SetExpr::full(nat);
  if (head == "ap") {
    Nat period = 0, threshold = 0;
    std::vector<Nat> residues, prelude;
    for (std::size_t i = 1; i + 1 < items.size(); ++i) {
      if (items[i].isSymbol("period")) period = asNat(items[i + 1]);
      if (items[i].isSymbol("residue")) residues.push_back(asNat(items[i + 1]));
      if (items[i].isSymbol("threshold")) threshold = asNat(items[i + 1]);
      if (items[i].isSymbol("residues")) {
        for (const auto& r : items[i + 1].items()) residues.push_back(asNat(r));
      }
      if (items[i].isSymbol("prelude")) {
        for (const auto& p : items[i + 1].items()) prelude.push_back(asNat(p));
      }
    }
    if (period == 0) evalError(e, "ap needs a positive period");
    return SetExpr::evPeriodic(nat, std::move(prelude), period,
                               std::move(residues), threshold);
  }
  if (head == "gen") {
    if (items.size() != 2 || !items[1].isSymbol())
      evalError(e, "gen takes a generator name");
    auto fn = namedGenerator(items[1].sym());
    if (!fn) evalError(items[1], "unknown generator " + items[1].sym());
    return SetExpr::generator(nat, items[1].sym(), *fn);
  }
  if (head == "union" || head == "inter" || head == "diff") {
    if (items.size() < 3) evalError(e, head + " takes at least two sets");
    SetExpr acc = evalSet(items[1]);
    for (std::size_t i = 2; i < items.size(); ++i) {
      const SetExpr next = evalSet(items[i]);
      if (head == "union") acc = SetExpr::unionOf(acc, next);
      if (head == "inter") acc = SetExpr::intersectionOf(acc, next);
      if (head == "diff") acc = SetExpr::differenceOf(acc, next);
    }
    return acc;
  }
  if (head == "complement") return SetExpr::complementOf(evalSet(items[1]));
  if (head == "tooth-set") {
    // (tooth-set X alpha S): spine points of tooth alpha inside S, over the
    // glued carrier of X.
    if (items.size() != 4) evalError(e, "tooth-set takes X, an index and a set");
    const GroundSet g = evalBallean(items[1]).build(opt_.budget).ground();
    if (g.kind() != GroundSet::Kind::Glued)
      evalError(items[1], "tooth-set needs a bouquet or comb");
    const Element alpha = parseElement(items[2]);
    const SetExpr spineSet = evalSet(items[3]);
    return SetExpr::procedural(
        g, "(tooth-set " + alpha.render() + " " + spineSet.render() + ")",
        [alpha, spineSet](const Element& el) {
          return el.isTagged() && el.tag() == GroundSet::kToothTag &&
                 el.payload().items()[0] == alpha &&
                 spineSet.contains(el.payload().items()[1]);
        });
  }
  if (head == "handle-set") {
    // (handle-set X S): handle points of the glued carrier of X inside S.
    if (items.size() != 3) evalError(e, "handle-set takes X and a set");
    const GroundSet g = evalBallean(items[1]).build(opt_.budget).ground();
    if (g.kind() != GroundSet::Kind::Glued)
      evalError(items[1], "handle-set needs a bouquet or comb");
    const SetExpr coreSet = evalSet(items[2]);
    return SetExpr::procedural(
        g, "(handle-set " + coreSet.render() + ")",
        [coreSet](const Element& el) {
          return el.isTagged() && el.tag() == GroundSet::kCoreTag &&
                 coreSet.contains(el.payload());
        });
  }

  // --- bornologies ---
  if (head == "finite-subsets")
    return BornologyPresentation::finiteSubsets(groundArg(1));
  if (head == "chain") {
    if (items.size() != 2 || !items[1].isSymbol())
      evalError(e, "chain takes a family name");
    return namedChain(e, items[1].sym());
  }
  if (head == "explicit-base") {
    std::vector<SetExpr> base;
    for (std::size_t i = 1; i < items.size(); ++i) base.push_back(evalSet(items[i]));
    return BornologyPresentation::explicitBase(nat, std::move(base));
  }
  if (head == "powerset") {
    GroundSet g = groundArg(1);
    return BornologyPresentation::explicitBase(g, {SetExpr::full(g)});
  }
  if (head == "abstract") {
    if (items.size() < 2 || !items[1].isSymbol())
      evalError(e, "abstract takes a name and cardinal keywords");
    auto card = [&](const char* key, SymCard dflt) {
      const Sexpr* v = keywordArg(e, key);
      if (!v) return dflt;
      if (v->isInteger()) return SymCard::fin(asNat(*v));
      return parseSymCard(v->sym());
    };
    const SymCard dflt = SymCard::atLeastAleph1(items[1].sym());
    return BornologyPresentation::abstractDecl(
        nat, items[1].sym(), card(":add", dflt), card(":cov", dflt),
        card(":cof", dflt), !hasKeyword(e, ":bounded"));
  }
  if (head == "product-born")
    return productBornology(evalBorn(items[1]), evalBorn(items[2]));

  // --- balleans ---
  if (head == "metric-nat") return BalleanExpr::metricNatExpr();
  if (head == "points") return BalleanExpr::finitePoints(asNat(items[1]));
  if (head == "down") return BalleanExpr::down(evalBorn(items[1]));
  if (head == "up") {
    std::vector<Entourage> ws = witnesses_;
    for (std::size_t i = 2; i < items.size(); ++i) ws.push_back(evalEnt(items[i]));
    return BalleanExpr::up(evalBorn(items[1]), std::move(ws));
  }
  if (head == "abstract-ballean")
    return BalleanExpr::abstractBallean(evalBorn(items[1]));
  if (head == "product") {
    // Balleans or bornologies, decided by the first argument.
    Value first = eval(items[1]);
    if (std::holds_alternative<BornologyPresentation>(first)) {
      BornologyPresentation acc = std::get<BornologyPresentation>(first);
      for (std::size_t i = 2; i < items.size(); ++i)
        acc = productBornology(acc, evalBorn(items[i]));
      return acc;
    }
    std::vector<BalleanExpr> factors;
    factors.push_back(std::get<BalleanExpr>(first));
    for (std::size_t i = 2; i < items.size(); ++i)
      factors.push_back(evalBallean(items[i]));
    return BalleanExpr::product(std::move(factors));
  }
  if (head == "b-product")
    return BalleanExpr::bProductExpr(evalBorn(items[1]), parseFamily(items[2]));
  if (head == "macrocube") return BalleanExpr::macrocubeExpr(evalBorn(items[1]));
  if (head == "bouquet")
    return BalleanExpr::bouquetExpr(evalBorn(items[1]), parseFamily(items[2]));
  if (head == "comb") {
    BalleanExpr handle = evalBallean(items[1]);
    SetExpr attach = evalSet(items[2]);
    return BalleanExpr::combExpr(std::move(handle), std::move(attach),
                                 parseFamily(items[3]));
  }
  if (head == "subballean")
    return BalleanExpr::subballean(evalBallean(items[1]), evalSet(items[2]));

  // --- entourages ---
  if (head == "metric") return Entourage::metric(nat, asNat(items[1]));
  if (head == "pairs") {
    std::vector<std::pair<Element, Element>> ps;
    for (std::size_t i = 1; i < items.size(); ++i) {
      if (!items[i].isList() || items[i].items().size() != 2)
        evalError(items[i], "pairs entries are (a b)");
      ps.emplace_back(parseElement(items[i].items()[0]),
                      parseElement(items[i].items()[1]));
    }
    return Entourage::finiteRel(nat, std::move(ps));
  }
  if (head == "block") return Entourage::block(evalSet(items[1]));
  if (head == "doubling")
    return Entourage::pairFn(
        nat, "double", [](Nat v) { return 2 * v; },
        [](Nat v) -> std::optional<Nat> {
          if (v % 2 == 0 && v > 0) return v / 2;
          return std::nullopt;
        });

  // --- maps and slow functions ---
  if (head == "map") {
    if (items.size() != 2 || !items[1].isSymbol())
      evalError(e, "map takes a name");
    auto m = namedMap(items[1].sym());
    if (!m) evalError(items[1], "unknown map " + items[1].sym());
    return *m;
  }
  if (head == "slow-fn") {
    if (items.size() != 2 || !items[1].isSymbol())
      evalError(e, "slow-fn takes a name");
    auto f = namedSlowFunction(items[1].sym(), opt_.budget);
    if (!f) evalError(items[1], "unknown slow function " + items[1].sym());
    return *f;
  }

  evalError(e, "unknown node label " + head);
}

void Runner::recordVerdict(const std::string& name, const std::string& property,
                           const Verdict& v, const Sexpr* expectForm) {
  bool expected = false;
  bool mismatch = false;
  if (expectForm) {
    const std::string want = expectForm->isSymbol() ? expectForm->sym() : "";
    const Truth got = v.value();
    const bool match = (want == "true" && got == Truth::True) ||
                       (want == "false" && got == Truth::False) ||
                       (want == "unknown" && got == Truth::Unknown);
    expected = match;
    mismatch = !match;
  }
  std::string line = name + ": " + property + ": " + v.render();
  if (expectForm)
    line += expected ? "  (as expected)" : "  (EXPECTATION FAILED)";
  lines_.push_back(line);
  records_.push_back(name + "\t" + property + "\t" + truthName(v.value()));
  if (mismatch) {
    sawFalse_ = true;
    return;
  }
  if (expected) return;
  if (v.isFalse()) sawFalse_ = true;
  if (v.isUnknown()) sawUnknown_ = true;
}

void Runner::directiveCheck(const Sexpr& form) {
  const auto& items = form.items();
  if (items.size() < 2 || !items[1].isSymbol())
    evalError(form, "check takes a predicate name");
  const std::string pred = items[1].sym();
  const Sexpr* expect = keywordArg(form, ":expect");
  const Sexpr* spaceForm = keywordArg(form, ":space");
  const Budget& budget = opt_.budget;
  auto args = positionalArgs(form, 2);

  auto space = [&]() -> CoarsePresentation {
    const Sexpr* src = spaceForm ? spaceForm : (args.empty() ? nullptr : args[0]);
    if (!src) evalError(form, "predicate needs a space");
    Value v = eval(*src);
    if (auto* b = std::get_if<BalleanExpr>(&v)) return b->build(budget);
    evalError(*src, "expected a ballean");
  };
  auto setArg = [&](std::size_t i) -> SetExpr {
    Value v = eval(*args.at(i));
    if (auto* s = std::get_if<SetExpr>(&v)) return *s;
    evalError(*args.at(i), "expected a set");
  };
  auto nameOf = [&](std::size_t i) {
    return args.at(i)->isSymbol() ? args.at(i)->sym() : args.at(i)->render();
  };

  try {
    if (pred == "finiteness") {
      recordVerdict(nameOf(0), pred, setArg(0).finiteness(budget), expect);
    } else if (pred == "bounded") {
      recordVerdict(nameOf(0), pred, isBounded(space(), setArg(0), budget),
                    expect);
    } else if (pred == "connected") {
      recordVerdict(spaceForm ? spaceForm->render() : nameOf(0), pred,
                    isConnected(space(), budget), expect);
    } else if (pred == "large") {
      recordVerdict(nameOf(0), pred, isLarge(space(), setArg(0), budget),
                    expect);
    } else if (pred == "coarse-map") {
      Value v = eval(*args.at(0));
      auto* m = std::get_if<MapValue>(&v);
      if (!m) evalError(*args.at(0), "expected a map");
      const Sexpr* fromF = keywordArg(form, ":from");
      const Sexpr* toF = keywordArg(form, ":to");
      if (!fromF || !toF) evalError(form, "coarse-map needs :from and :to");
      Value fv = eval(*fromF);
      Value tv = eval(*toF);
      recordVerdict(m->name, pred,
                    isCoarseMap(m->name, m->fn,
                                std::get<BalleanExpr>(fv).build(budget),
                                std::get<BalleanExpr>(tv).build(budget), budget),
                    expect);
    } else if (pred == "asymptotically-disjoint") {
      recordVerdict(nameOf(0) + "," + nameOf(1), pred,
                    asymptoticallyDisjoint(space(), setArg(0), setArg(1), budget),
                    expect);
    } else if (pred == "asymptotic-neighborhood") {
      recordVerdict(
          nameOf(0) + "," + nameOf(1), pred,
          isAsymptoticNeighborhood(space(), setArg(0), setArg(1), budget),
          expect);
    } else if (pred == "asymptotically-separated") {
      auto res = asymptoticallySeparated(space(), setArg(0), setArg(1), budget);
      recordVerdict(nameOf(0) + "," + nameOf(1), pred, res.verdict, expect);
      if (res.verdict.isTrue() && res.u)
        lines_.push_back("  neighbourhoods: U=" + res.u->render() +
                         " V=" + res.v->render());
    } else if (pred == "slowly-oscillating") {
      Value v = eval(*args.at(0));
      auto* f = std::get_if<SlowFunction>(&v);
      if (!f) evalError(*args.at(0), "expected a slow function");
      Rational eps(1, 4);
      if (const Sexpr* ef = keywordArg(form, ":eps"))
        eps = Rational::parse(ef->isSymbol() ? ef->sym()
                                             : std::to_string(ef->integerValue()));
      recordVerdict(f->name, pred, isSlowlyOscillating(space(), *f, eps, budget),
                    expect);
    } else if (pred == "discrete") {
      recordVerdict(nameOf(0), pred, isDiscrete(space(), budget), expect);
    } else if (pred == "antidiscrete") {
      recordVerdict(nameOf(0), pred,
                    isAntidiscrete(space(), witnesses_, budget), expect);
    } else if (pred == "ultranormal") {
      recordVerdict(nameOf(0), pred,
                    ultranormalSearch(space(), catalog_, budget), expect);
    } else if (pred == "bornology") {
      Value v = eval(*args.at(0));
      auto* b = std::get_if<BornologyPresentation>(&v);
      if (!b) evalError(*args.at(0), "expected a bornology");
      auto report = b->checkBornology(budget);
      recordVerdict(nameOf(0), pred,
                    report.pass
                        ? Verdict::yes("axioms hold on the sampled base")
                        : Verdict::no(report.problems.front(), "axiom failure"),
                    expect);
    } else if (pred == "unbounded") {
      Value v = eval(*args.at(0));
      auto* b = std::get_if<BornologyPresentation>(&v);
      if (!b) evalError(*args.at(0), "expected a bornology");
      recordVerdict(nameOf(0), pred, b->unbounded(budget), expect);
    } else if (pred == "bounded-member") {
      Value v = eval(*args.at(0));
      auto* b = std::get_if<BornologyPresentation>(&v);
      if (!b) evalError(*args.at(0), "expected a bornology");
      recordVerdict(nameOf(1), pred, b->member(setArg(1), budget), expect);
    } else if (pred == "largest-member") {
      Value v = eval(*args.at(0));
      auto* b = std::get_if<BornologyPresentation>(&v);
      if (!b) evalError(*args.at(0), "expected a bornology");
      Value ev = eval(*args.at(1));
      auto* ent = std::get_if<Entourage>(&ev);
      if (!ent) evalError(*args.at(1), "expected an entourage");
      recordVerdict(nameOf(1), pred, largestMembership(*b, *ent, budget), expect);
    } else {
      evalError(items[1], "unknown predicate " + pred);
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& ex) {
    lines_.push_back("error: " + std::string(ex.what()));
    sawError_ = true;
  }
}

void Runner::directiveInfer(const Sexpr& form) {
  const auto args = positionalArgs(form, 1);
  if (args.empty()) evalError(form, "infer takes a ballean");
  Value v = eval(*args[0]);
  auto* b = std::get_if<BalleanExpr>(&v);
  if (!b) evalError(*args[0], "expected a ballean");
  const std::string name =
      args[0]->isSymbol() ? args[0]->sym() : args[0]->render();
  try {
    PropertyReport rep = inferProperties(*b, opt_.budget);
    std::string rendered = rep.render(name);
    std::size_t start = 0;
    while (start < rendered.size()) {
      auto end = rendered.find('\n', start);
      if (end == std::string::npos) end = rendered.size();
      lines_.push_back(rendered.substr(start, end - start));
      start = end + 1;
    }
    for (const auto& [prop, entry] : rep.entries())
      records_.push_back(name + "\t" + propertyName(prop) + "\t" +
                         truthName(entry.verdict.value()));
  } catch (const std::exception& ex) {
    lines_.push_back("error: " + std::string(ex.what()));
    sawError_ = true;
  }
}

void Runner::directiveSeparate(const Sexpr& form) {
  const auto args = positionalArgs(form, 1);
  const Sexpr* spaceForm = keywordArg(form, ":space");
  if (args.size() < 2 || !spaceForm)
    evalError(form, "separate takes Y Z :space X");
  try {
    Value sv = eval(*spaceForm);
    CoarsePresentation space = std::get<BalleanExpr>(sv).build(opt_.budget);
    Value yv = eval(*args[0]);
    Value zv = eval(*args[1]);
    const SetExpr y = std::get<SetExpr>(yv);
    const SetExpr z = std::get<SetExpr>(zv);
    SlowFunction f = synthesizeSeparator(space, y, z, opt_.budget);
    lines_.push_back("separator: " + f.name + " (" + f.provenance + ")");
    const auto pts = space.carrierElements(opt_.budget.horizon);
    for (const auto& p : pts)
      lines_.push_back("  " + p.render() + "\t" + f.eval(p).str());
    bool allPass = true;
    for (const auto& eps : opt_.epsGrid) {
      Verdict v = isSlowlyOscillating(space, f, eps, opt_.budget);
      lines_.push_back("verify eps=" + eps.str() + ": " + v.render());
      records_.push_back("separator\teps=" + eps.str() + "\t" +
                         truthName(v.value()));
      if (!v.isTrue()) allPass = false;
      if (v.isFalse()) sawFalse_ = true;
      if (v.isUnknown()) sawUnknown_ = true;
    }
    lines_.push_back(std::string("verification: ") +
                     (allPass ? "all eps pass" : "failures above"));
  } catch (const std::exception& ex) {
    lines_.push_back("error: " + std::string(ex.what()));
    sawError_ = true;
  }
}

void Runner::directiveInvariants(const Sexpr& form) {
  const auto args = positionalArgs(form, 1);
  if (args.empty()) evalError(form, "invariants takes a bornology");
  try {
    Value v = eval(*args[0]);
    auto* b = std::get_if<BornologyPresentation>(&v);
    if (!b) evalError(*args[0], "expected a bornology");
    auto inv = b->invariants(opt_.budget);
    const std::string name =
        args[0]->isSymbol() ? args[0]->sym() : args[0]->render();
    lines_.push_back(name + ": add=" + inv.add.str() + " cov=" + inv.cov.str() +
                     " cof=" + inv.cof.str());
    lines_.push_back("  justification: " + inv.justification);
    records_.push_back(name + "\tinvariants\t" + inv.add.str() + "<=" +
                       inv.cov.str() + "<=" + inv.cof.str());
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& ex) {
    lines_.push_back("error: " + std::string(ex.what()));
    sawError_ = true;
  }
}

void Runner::directiveEnumerate(const Sexpr& form) {
  const auto args = positionalArgs(form, 1);
  if (args.empty()) evalError(form, "enumerate-finite takes a point count");
  try {
    const int n = static_cast<int>(asNat(*args[0]));
    auto count = finiterel::countCoarseStructures(n, 1u << 20);
    if (!count) {
      lines_.push_back("error: structure count exceeds the enumeration budget");
      sawError_ = true;
      return;
    }
    lines_.push_back(std::to_string(*count) + " coarse structures on " +
                     std::to_string(n) + " points");
    records_.push_back("enumerate-finite\t" + std::to_string(n) + "\t" +
                       std::to_string(*count));
  } catch (const std::exception& ex) {
    lines_.push_back("error: " + std::string(ex.what()));
    sawError_ = true;
  }
}

void Runner::directiveCrossValidate(const Sexpr& form) {
  (void)form;
  Nat inconsistencies = 0;
  Nat checksRun = 0;
  const Budget& budget = opt_.budget;
  for (const auto& [name, expr] : declaredBalleans_) {
    PropertyReport rep;
    try {
      rep = inferProperties(expr, budget);
    } catch (const std::exception& ex) {
      lines_.push_back("error: " + name + ": " + ex.what());
      sawError_ = true;
      continue;
    }
    if (!expr.concrete()) {
      lines_.push_back(name + ": abstract instance, symbolic consistency only");
      continue;
    }
    CoarsePresentation pres = expr.build(budget);
    std::vector<SetExpr> localCatalog;
    for (const auto& s : catalog_)
      if (s.ground().same(pres.ground())) localCatalog.push_back(s);
    auto compare = [&](Property prop, const std::function<Verdict()>& exec) {
      const auto* entry = rep.find(prop);
      if (!entry || entry->verdict.isUnknown()) return;
      ++checksRun;
      Verdict got;
      try {
        got = exec();
      } catch (const std::exception& ex) {
        got = Verdict::unknown(budget.horizon, ex.what());
      }
      const bool clash =
          (!got.isUnknown()) && got.value() != entry->verdict.value();
      if (clash) ++inconsistencies;
      lines_.push_back(name + ": " + propertyName(prop) + ": rule " +
                       truthName(entry->verdict.value()) + " [" + entry->why +
                       "] vs executable " + truthName(got.value()) +
                       (clash ? "  INCONSISTENT" : "  consistent"));
      records_.push_back(name + "\t" + propertyName(prop) + "\t" +
                         (clash ? "INCONSISTENT" : "consistent"));
    };
    compare(Property::Metrizable, [&] { return pres.countableBase(); });
    compare(Property::Connected, [&] { return isConnected(pres, budget); });
    const Verdict boundedExec = isBounded(pres, pres.carrier(), budget);
    compare(Property::Bounded, [&] { return boundedExec; });
    if (boundedExec.isFalse()) {
      compare(Property::Discrete, [&] { return isDiscrete(pres, budget); });
      compare(Property::Antidiscrete,
              [&] { return isAntidiscrete(pres, witnesses_, budget); });
    }
    compare(Property::Ultranormal,
            [&] { return ultranormalSearch(pres, localCatalog, budget); });
    // Normal=True on concrete bouquets/combs: the separator must exist for
    // every asymptotically disjoint catalog pair.
    const auto* normal = rep.find(Property::Normal);
    if (normal && normal->verdict.isTrue() &&
        (expr.kind() == BalleanExpr::Kind::Bouquet ||
         expr.kind() == BalleanExpr::Kind::Comb)) {
      for (std::size_t i = 0; i < localCatalog.size(); ++i) {
        for (std::size_t j = i + 1; j < localCatalog.size(); ++j) {
          const SetExpr meet =
              SetExpr::intersectionOf(localCatalog[i], localCatalog[j]);
          if (!meet.membersUpTo(budget.horizon).empty()) continue;
          Verdict ad = asymptoticallyDisjoint(pres, localCatalog[i],
                                              localCatalog[j], budget);
          if (!ad.isTrue()) continue;
          ++checksRun;
          bool ok = true;
          std::string why;
          try {
            SlowFunction f = synthesizeSeparator(pres, localCatalog[i],
                                                 localCatalog[j], budget);
            for (const auto& eps : opt_.epsGrid)
              if (!isSlowlyOscillating(pres, f, eps, budget).isTrue()) {
                ok = false;
                why = "separator fails eps=" + eps.str();
              }
          } catch (const std::exception& ex) {
            ok = false;
            why = ex.what();
          }
          if (!ok) ++inconsistencies;
          lines_.push_back(name + ": normal: separator for catalog pair (" +
                           std::to_string(i) + "," + std::to_string(j) + ") " +
                           (ok ? "verified  consistent"
                               : "failed (" + why + ")  INCONSISTENT"));
          records_.push_back(name + "\tnormal-separator\t" +
                             (ok ? "consistent" : "INCONSISTENT"));
        }
      }
    }
  }
  lines_.push_back("cross-validate: " + std::to_string(checksRun) +
                   " checks, " + std::to_string(inconsistencies) +
                   " inconsistencies");
  records_.push_back("cross-validate\tsummary\t" +
                     std::to_string(inconsistencies));
  if (inconsistencies > 0) sawFalse_ = true;
}

void Runner::execForm(const Sexpr& form) {
  if (!form.isList() || form.items().empty())
    evalError(form, "top-level forms are lists");
  const std::string head = form.head();
  if (head == "def") {
    if (form.items().size() < 3 || !form.items()[1].isSymbol())
      evalError(form, "def takes a name and an expression");
    const std::string name = form.items()[1].sym();
    Value v = eval(form.items()[2]);
    if (auto* b = std::get_if<BalleanExpr>(&v))
      declaredBalleans_.emplace_back(name, *b);
    env_[name] = std::move(v);
    return;
  }
  if (head == "catalog") {
    for (std::size_t i = 1; i < form.items().size(); ++i) {
      Value v = eval(form.items()[i]);
      if (auto* s = std::get_if<SetExpr>(&v))
        catalog_.push_back(*s);
      else
        evalError(form.items()[i], "catalog entries are sets");
    }
    return;
  }
  if (head == "witness") {
    for (std::size_t i = 1; i < form.items().size(); ++i) {
      Value v = eval(form.items()[i]);
      if (auto* ent = std::get_if<Entourage>(&v))
        witnesses_.push_back(*ent);
      else
        evalError(form.items()[i], "witness entries are entourages");
    }
    return;
  }
  if (head == "check") return directiveCheck(form);
  if (head == "infer") return directiveInfer(form);
  if (head == "separate") return directiveSeparate(form);
  if (head == "invariants") return directiveInvariants(form);
  if (head == "enumerate-finite") return directiveEnumerate(form);
  if (head == "cross-validate") return directiveCrossValidate(form);
  evalError(form, "unknown directive " + head);
}

void Runner::execDocument(const std::string& text) {
  for (const auto& form : Sexpr::parseAll(text)) execForm(form);
}

void Runner::loadWitnesses(const std::string& text) {
  for (const auto& form : Sexpr::parseAll(text)) {
    if (form.isList() && form.head() == "def") {
      Value v = eval(form.items()[2]);
      if (auto* ent = std::get_if<Entourage>(&v)) witnesses_.push_back(*ent);
      env_[form.items()[1].sym()] = std::move(v);
    }
  }
}

int Runner::exitCode() const {
  if (sawError_) return 3;
  if (sawFalse_) return 1;
  if (sawUnknown_) return 2;
  return 0;
}

std::string Runner::renderedReport() const {
  std::string out;
  if (opt_.format == "lines") {
    for (const auto& r : records_) out += r + "\n";
    return out;
  }
  for (const auto& l : lines_) out += l + "\n";
  return out;
}

}  // namespace ballean
