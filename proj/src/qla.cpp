#include "qlatk/qla.hpp"

#include "qlatk/graph.hpp"
#include "qlatk/qwa.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace qlatk {

namespace {

bool isAvg(RunAgg f) { return f == RunAgg::LimInfAvg || f == RunAgg::LimSupAvg; }
bool isStd(RunAgg f) {
  return f == RunAgg::Inf || f == RunAgg::Sup || f == RunAgg::LimInf || f == RunAgg::LimSup;
}
bool isLimit(WordAgg g) { return g == WordAgg::LimInf || g == WordAgg::LimSup; }
bool isLimit(LangAgg h) { return h == LangAgg::LimInf || h == LangAgg::LimSup; }

} // namespace

OutcomeClass routeCell(ProblemKind problem, LangAgg h, WordAgg g, RunAgg f) {
  switch (problem) {
    case ProblemKind::EvalNonProb: {
      if (g == WordAgg::E) return OutcomeClass::Undecidable;
      if (isStd(f)) return OutcomeClass::Algorithm;
      bool matched = (g == WordAgg::Sup && h == LangAgg::Sup) ||
                     (g == WordAgg::Inf && h == LangAgg::Inf);
      if (isAvg(f)) return matched ? OutcomeClass::Algorithm : OutcomeClass::Undecidable;
      return matched ? OutcomeClass::Algorithm : OutcomeClass::OpenHard;  // DSum
    }
    case ProblemKind::EvalProb: {
      if (g == WordAgg::E) return OutcomeClass::Algorithm;
      if (isLimit(g)) return OutcomeClass::OpenHard;
      if (isStd(f)) return OutcomeClass::Algorithm;
      return isAvg(f) ? OutcomeClass::Undecidable : OutcomeClass::OpenHard;
    }
    case ProblemKind::Nonemptiness: {
      if (g == WordAgg::E) return OutcomeClass::Undecidable;
      if (isLimit(h) && !isStd(f)) return OutcomeClass::OpenHard;
      if (g == WordAgg::Sup) return OutcomeClass::Algorithm;
      // g = Inf or a limit word aggregator
      if (isStd(f)) return OutcomeClass::Algorithm;
      return isAvg(f) ? OutcomeClass::Undecidable : OutcomeClass::OpenHard;
    }
    case ProblemKind::Universality:
      return routeCell(ProblemKind::Nonemptiness, dualOf(h), dualOf(g), dualOf(f));
  }
  return OutcomeClass::Undecidable;
}

// ---------------------------------------------------------------------------
// Exact-value automaton of a spec with word aggregator Sup or Inf, for the
// weight sweep machinery. For g = Inf the dual system is used: the words of
// value x under Inf are the words of value -x under Sup on the dual.
// ---------------------------------------------------------------------------

namespace {

struct NormalizedQwa {
  QwaSpec spec;  // g == Sup, standard f
};

// Brings the word aggregator to Sup (dualizing flips the h-side; the caller
// tracks signs separately where needed).
QwaSpec lowerToSupOrInf(const QwaSpec& a) {
  if (a.g == WordAgg::Sup || a.g == WordAgg::Inf) return a;
  return lowerLimitWordAgg(a);
}

BuchiAutomaton exactValueAut(const QwaSpec& a, const Rational& x) {
  // pre: g == Sup, f standard
  return thresholdAutomaton(a, x, ThresholdRel::Eq);
}

// Largest (or smallest) weight whose exact-value language is infinite; always
// exists because the value languages partition Σ^ω.
Rational infiniteValueAnchor(const QwaSpec& a, bool largest) {
  auto ws = a.system.weightSet();
  if (largest) std::reverse(ws.begin(), ws.end());
  for (const Rational& x : ws)
    if (isInfinite(exactValueAut(a, x))) return x;
  throw std::logic_error("infiniteValueAnchor: no infinite value language");
}

} // namespace

// ---------------------------------------------------------------------------
// evalRegular
// ---------------------------------------------------------------------------

namespace {

EvalOutcome evalRegularStd(const QlaSpec& spec0, const BuchiAutomaton& lang0);

// f in {LimInfAvg, LimSupAvg}, g = h = Sup: product SCCs and Karp.
EvalOutcome evalRegularAvg(const QlaSpec& spec, const BuchiAutomaton& lang0) {
  const Wlts& t = spec.qwa.system;
  BuchiAutomaton lang = reachTrim(remapAlphabet(toBuchi(lang0), t.alphabet));
  const int nb = lang.numStates;
  auto id = [&](int q, int b) { return q * nb + b; };

  WeightedDigraph g;
  g.n = t.numStates() * nb;
  for (int q = 0; q < t.numStates(); ++q)
    for (int b = 0; b < nb; ++b)
      for (int l = 0; l < t.alphabet.size(); ++l)
        for (const auto& e : t.edges[q][l])
          for (int bd : lang.edges[b][l])
            g.edges.push_back({id(q, b), e.weight, id(e.target, bd), -1});

  // Reachability from initial pairs.
  std::vector<bool> reach(g.n, false);
  {
    auto out = g.outIndex();
    std::vector<int> stack;
    for (int q : t.initialSupport())
      for (int b : lang.initial)
        if (!reach[id(q, b)]) {
          reach[id(q, b)] = true;
          stack.push_back(id(q, b));
        }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int ei : out[v]) {
        int d = g.edges[ei].dst;
        if (!reach[d]) {
          reach[d] = true;
          stack.push_back(d);
        }
      }
    }
  }
  WeightedDigraph gr;
  gr.n = g.n;
  for (const auto& e : g.edges)
    if (reach[e.src] && reach[e.dst]) gr.edges.push_back(e);

  std::optional<Rational> best;
  for (const auto& comp : sccs(gr)) {
    if (sccIsTrivial(gr, comp)) continue;
    bool hasAccepting = false;
    for (int v : comp) hasAccepting = hasAccepting || lang.accepting[v % nb];
    if (!hasAccepting) continue;
    std::set<int> in(comp.begin(), comp.end());
    WeightedDigraph sub;
    sub.n = gr.n;
    for (const auto& e : gr.edges)
      if (in.count(e.src) && in.count(e.dst)) sub.edges.push_back(e);
    auto mm = maxMeanCycle(sub);
    if (mm.value.isFinite() && (!best || mm.value.finite() > *best)) best = mm.value.finite();
  }
  if (!best) throw std::logic_error("evalRegularAvg: no accepting component for nonempty input");
  return EvalOutcome::mkValue(ExtValue(*best));
}

// f = DSum, g = h = Sup: safety closure, sink-free product, discounted optimum.
EvalOutcome evalRegularDsum(const QlaSpec& spec, const BuchiAutomaton& lang0) {
  const Wlts& t = spec.qwa.system;
  BuchiAutomaton closure = remapAlphabet(safetyClosure(lang0), t.alphabet);
  // The closure marks exactly its live states accepting; the sink is the
  // unique rejecting state.
  const int nb = closure.numStates;
  auto id = [&](int q, int b) { return q * nb + b; };
  std::vector<bool> keepB(nb);
  for (int b = 0; b < nb; ++b) keepB[b] = closure.accepting[b];

  WeightedDigraph g;
  g.n = t.numStates() * nb;
  for (int q = 0; q < t.numStates(); ++q)
    for (int b = 0; b < nb; ++b) {
      if (!keepB[b]) continue;
      for (int l = 0; l < t.alphabet.size(); ++l)
        for (const auto& e : t.edges[q][l])
          for (int bd : closure.edges[b][l])
            if (keepB[bd]) g.edges.push_back({id(q, b), e.weight, id(e.target, bd), -1});
    }
  // Keep only nodes with sink-avoiding infinite continuations.
  auto out = g.outIndex();
  std::vector<bool> alive(g.n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int v = 0; v < g.n; ++v) {
      if (!alive[v]) continue;
      bool has = false;
      for (int ei : out[v])
        if (alive[g.edges[ei].dst]) has = true;
      if (!has) {
        alive[v] = false;
        changed = true;
      }
    }
  }
  WeightedDigraph g2;
  std::vector<int> map(g.n, -1);
  g2.n = 0;
  for (int v = 0; v < g.n; ++v)
    if (alive[v]) map[v] = g2.n++;
  for (const auto& e : g.edges)
    if (alive[e.src] && alive[e.dst]) g2.edges.push_back({map[e.src], e.weight, map[e.dst], -1});

  std::optional<Rational> best;
  if (g2.n > 0) {
    auto r = discountedBestValue(g2, *spec.qwa.lambda, true);
    for (int q : t.initialSupport())
      for (int b : closure.initial) {
        if (!keepB[b] || map[id(q, b)] < 0) continue;
        Rational v = r.value[map[id(q, b)]];
        if (!best || v > *best) best = v;
      }
  }
  if (!best) throw std::logic_error("evalRegularDsum: nonempty closure without live product");
  return EvalOutcome::mkValue(ExtValue(*best));
}

// f standard, g = Sup after normalization.
EvalOutcome evalRegularStd(const QlaSpec& spec, const BuchiAutomaton& lang) {
  const QwaSpec& a = spec.qwa;
  auto ws = a.system.weightSet();

  auto geq = [&](const Rational& x) { return thresholdAutomaton(a, x, ThresholdRel::Geq); };

  // Candidate set Z: all weights, or the infinitely-achieved ones plus the
  // anchor for limit language aggregators.
  std::vector<Rational> z;
  if (spec.h == LangAgg::Inf || spec.h == LangAgg::Sup) {
    z = ws;
  } else {
    for (const Rational& x : ws)
      if (diffIsInfinite(intersect(lang, geq(x)), thresholdAutomaton(a, x, ThresholdRel::Gt)))
        z.push_back(x);
    Rational anchor = infiniteValueAnchor(a, spec.h == LangAgg::LimInf);
    if (std::find(z.begin(), z.end(), anchor) == z.end()) z.push_back(anchor);
    std::sort(z.begin(), z.end());
  }

  for (auto it = z.rbegin(); it != z.rend(); ++it) {
    const Rational& x = *it;
    bool ok = false;
    switch (spec.h) {
      case LangAgg::Sup:
      case LangAgg::LimSup:
        ok = !isEmpty(intersect(lang, geq(x))).empty;
        break;
      case LangAgg::Inf:
        ok = includes(lang, geq(x)).included;
        break;
      case LangAgg::LimInf:
        // All but finitely many words of the language reach the threshold.
        ok = !diffIsInfinite(lang, geq(x));
        break;
      default:
        break;
    }
    if (ok) return EvalOutcome::mkValue(ExtValue(x));
  }
  throw std::logic_error("evalRegularStd: sweep found no value");
}

} // namespace

EvalOutcome evalRegular(const QlaSpec& spec00, const BuchiAutomaton& lang) {
  if (spec00.h == LangAgg::E)
    throw std::invalid_argument("evalRegular: use evalMarkov for the probabilistic problem");
  {
    auto v = validate(spec00.qwa);
    if (!v.empty()) throw std::invalid_argument("invalid QWA: " + v.front().message);
  }
  if (!spec00.qwa.system.alphabet.sameLetters(lang.alphabet))
    throw std::invalid_argument("evalRegular: alphabet mismatch");

  QlaSpec spec0 = spec00;
  // A deterministic system has a single run per word; all word aggregators
  // coincide, so pick the one matching the language aggregator.
  if (spec0.qwa.system.isDeterministic()) {
    switch (spec0.h) {
      case LangAgg::Inf: spec0.qwa.g = WordAgg::Inf; break;
      default: spec0.qwa.g = WordAgg::Sup; break;
    }
  }

  OutcomeClass route = routeCell(ProblemKind::EvalNonProb, spec0.h, spec0.qwa.g, spec0.qwa.f);
  if (route != OutcomeClass::Algorithm) {
    if (spec0.qwa.g == WordAgg::E)
      return EvalOutcome::unsupported(UnsupportedReason::Undecidable, "evaluation:prob");
    if (isAvg(spec0.qwa.f))
      return EvalOutcome::unsupported(UnsupportedReason::Undecidable, "evaluation:avg");
    return EvalOutcome::unsupported(UnsupportedReason::OpenHard, "evaluation:dsum");
  }

  QlaSpec spec = spec0;
  // Normalize a limit word aggregator (value-equal construction, f standard).
  if (isLimit(spec.qwa.g)) spec.qwa = lowerToSupOrInf(spec.qwa);
  // Dualize a universal word automaton.
  if (spec.qwa.g == WordAgg::Inf) {
    auto r = evalRegular(dualQla(spec), lang);
    if (!r.isValue()) return r;
    return EvalOutcome::mkValue(-r.value);
  }

  // Conventions for empty and finite inputs come before the sweeps.
  if (isEmpty(lang).empty) {
    switch (spec.h) {
      case LangAgg::Inf: {
        auto t = topValue(spec.qwa);
        return t;
      }
      case LangAgg::Sup:
        return bottomValue(spec.qwa);
      case LangAgg::LimInf:
        return EvalOutcome::mkValue(ExtValue(infiniteValueAnchor(spec.qwa, true)));
      case LangAgg::LimSup:
        return EvalOutcome::mkValue(ExtValue(infiniteValueAnchor(spec.qwa, false)));
      default:
        break;
    }
  }
  if (isLimit(spec.h) && !isStd(spec.qwa.f))
    return EvalOutcome::unsupported(UnsupportedReason::OpenHard, "evaluation:limit-lang-agg");
  if (isLimit(spec.h) && !isInfinite(remapAlphabet(lang, spec.qwa.system.alphabet))) {
    bool top = spec.h == LangAgg::LimInf;
    return EvalOutcome::mkValue(ExtValue(infiniteValueAnchor(spec.qwa, top)));
  }

  BuchiAutomaton lang2 = remapAlphabet(toBuchi(lang), spec.qwa.system.alphabet);
  if (isStd(spec.qwa.f)) return evalRegularStd(spec, lang2);
  if (isAvg(spec.qwa.f)) return evalRegularAvg(spec, lang2);
  return evalRegularDsum(spec, lang2);
}

// ---------------------------------------------------------------------------
// Top/bottom of a QLA
// ---------------------------------------------------------------------------

EvalOutcome qlaTop(const QlaSpec& spec) {
  if (!isLimit(spec.h)) return topValue(spec.qwa);
  if (!isStd(spec.qwa.f) && !(spec.qwa.f == RunAgg::Inf || spec.qwa.f == RunAgg::Sup))
    return EvalOutcome::unsupported(UnsupportedReason::OpenHard, "extremes:limit-lang-agg");
  QwaSpec a = spec.qwa;
  if (isLimit(a.g)) a = lowerLimitWordAgg(a);
  if (a.g == WordAgg::Inf) {
    // Value languages of the dual at -x are the value-x languages.
    QwaSpec d = dualQwa(a);
    auto ws = d.system.weightSet();
    for (const Rational& x : ws)  // ascending in d = descending in original
      if (isInfinite(exactValueAut(d, x))) return EvalOutcome::mkValue(ExtValue(-x));
    throw std::logic_error("qlaTop: no infinite value language");
  }
  return EvalOutcome::mkValue(ExtValue(infiniteValueAnchor(a, true)));
}

EvalOutcome qlaBot(const QlaSpec& spec) {
  if (!isLimit(spec.h)) return bottomValue(spec.qwa);
  auto t = qlaTop(QlaSpec{dualOf(spec.h), dualQwa(spec.qwa)});
  if (!t.isValue()) return t;
  return EvalOutcome::mkValue(-t.value);
}

// ---------------------------------------------------------------------------
// Nonemptiness / universality
// ---------------------------------------------------------------------------

namespace {

std::string emptinessTag(const QlaSpec& spec, const ProblemVariant& v) {
  const QwaSpec& a = spec.qwa;
  if (a.g == WordAgg::E) {
    // Undecidable in general; some finite-state sub-cells are open.
    bool finiteKnown = spec.h != LangAgg::E || (a.f == RunAgg::DSum && v.strict);
    if (v.finiteState && !finiteKnown) return "emptiness:prob:finite-open";
    return "emptiness:prob";
  }
  if (isLimit(spec.h) && !isStd(a.f)) return "emptiness:limit-lang-agg";
  if (isAvg(a.f)) {
    bool finiteKnown = spec.h != LangAgg::E || (a.f == RunAgg::LimInfAvg && v.strict);
    if (v.finiteState && !finiteKnown) return "emptiness:avg:finite-open";
    return "emptiness:avg";
  }
  bool finiteKnown = spec.h == LangAgg::Sup || v.strict;
  if (v.finiteState && !finiteKnown) return "emptiness:dsum:finite-open";
  return "emptiness:dsum";
}

EvalOutcome refusal(OutcomeClass cls, const std::string& tag) {
  return EvalOutcome::unsupported(
      cls == OutcomeClass::Undecidable ? UnsupportedReason::Undecidable
                                       : UnsupportedReason::OpenHard,
      tag);
}

} // namespace

EvalOutcome decideNonemptiness(const QlaSpec& spec00, const Rational& k, const ProblemVariant& v) {
  {
    auto viol = validate(spec00.qwa);
    if (!viol.empty()) throw std::invalid_argument("invalid QWA: " + viol.front().message);
  }
  QlaSpec spec0 = spec00;
  if (spec0.qwa.system.isDeterministic()) spec0.qwa.g = WordAgg::Sup;
  OutcomeClass route = routeCell(ProblemKind::Nonemptiness, spec0.h, spec0.qwa.g, spec0.qwa.f);
  if (route != OutcomeClass::Algorithm) {
    // Open finite-state sub-cells keep the open-hard class.
    std::string tag = emptinessTag(spec0, v);
    if (v.finiteState && tag.ends_with(":finite-open")) return refusal(OutcomeClass::OpenHard, tag);
    return refusal(route, tag);
  }

  QlaSpec spec = spec0;
  if (isLimit(spec.qwa.g)) spec.qwa = lowerToSupOrInf(spec.qwa);

  // Decidable cells coincide with their finite-state restrictions.
  if (!isLimit(spec.h)) {
    auto t = topValue(spec.qwa);
    if (!t.isValue()) return t;
    return EvalOutcome::mkDecision(v.strict ? t.value > ExtValue(k) : t.value >= ExtValue(k));
  }
  auto t = qlaTop(spec);
  if (!t.isValue()) return t;
  return EvalOutcome::mkDecision(v.strict ? t.value > ExtValue(k) : t.value >= ExtValue(k));
}

EvalOutcome decideUniversality(const QlaSpec& spec, const Rational& k, const ProblemVariant& v) {
  // A is >=-universal for k iff its dual is not >-nonempty for -k (and the
  // strict case swaps the relations).
  ProblemVariant dualVariant = v;
  dualVariant.strict = !v.strict;
  auto inner = decideNonemptiness(dualQla(spec), -k, dualVariant);
  if (inner.isUnsupported()) {
    std::string tag = inner.citation;
    auto pos = tag.find("emptiness:");
    if (pos == 0) tag = "universality:" + tag.substr(std::string("emptiness:").size());
    return EvalOutcome::unsupported(inner.reason, tag);
  }
  return EvalOutcome::mkDecision(!inner.decision);
}

// ---------------------------------------------------------------------------
// QLA inclusion (all six aggregators in {Inf, Sup, LimInf, LimSup})
// ---------------------------------------------------------------------------

namespace {

struct SideNormal {
  int sign = 1;       // value(S) = sign * primed(S)
  QlaSpec primed;     // word aggregator Sup, standard f
};

SideNormal normalizeSide(const QlaSpec& s) {
  SideNormal out;
  out.primed = s;
  if (isLimit(out.primed.qwa.g)) out.primed.qwa = lowerLimitWordAgg(out.primed.qwa);
  if (out.primed.qwa.g == WordAgg::Inf) {
    out.sign = -1;
    out.primed = dualQla(out.primed);
  }
  return out;
}

} // namespace

InclusionOutcome qlaInclusion(const QlaSpec& lhs, const QlaSpec& rhs, bool strict) {
  auto stdAggs = [&](const QlaSpec& s) {
    return s.h != LangAgg::E && s.qwa.g != WordAgg::E && isStd(s.qwa.f);
  };
  if (!stdAggs(lhs) || !stdAggs(rhs))
    throw std::invalid_argument("qlaInclusion: aggregators must be in {inf,sup,liminf,limsup}");
  if (!lhs.qwa.system.alphabet.sameLetters(rhs.qwa.system.alphabet))
    throw std::invalid_argument("qlaInclusion: alphabet mismatch");

  SideNormal A = normalizeSide(lhs);
  SideNormal B = normalizeSide(rhs);
  const Alphabet& sigma = A.primed.qwa.system.alphabet;

  auto wsA = A.primed.qwa.system.weightSet();
  auto wsB = B.primed.qwa.system.weightSet();

  auto infinitary = [&](const QwaSpec& a, const std::vector<Rational>& ws) {
    std::set<std::string> y;
    for (const Rational& x : ws)
      if (isInfinite(exactValueAut(a, x))) y.insert(x.str());
    return y;
  };
  auto yA = infinitary(A.primed.qwa, wsA);
  auto yB = infinitary(B.primed.qwa, wsB);

  auto adjust = [&](const QlaSpec& side, const std::set<std::string>& y, const Rational& x) {
    if (!isLimit(side.h) || y.count(x.str())) return x;
    return infiniteValueAnchor(side.qwa, side.h == LangAgg::LimInf);
  };

  for (const Rational& x : wsA) {
    BuchiAutomaton ax = exactValueAut(A.primed.qwa, x);
    for (const Rational& yv : wsB) {
      BuchiAutomaton by = remapAlphabet(exactValueAut(B.primed.qwa, yv), sigma);
      BuchiAutomaton inter = intersect(ax, by);
      if (isEmpty(inter).empty) continue;
      Rational xv = adjust(A.primed, yA, x);
      Rational yv2 = adjust(B.primed, yB, yv);
      Rational left = Rational(A.sign) * xv;
      Rational right = Rational(B.sign) * yv2;
      bool ok = strict ? left > right : left >= right;
      if (!ok) {
        InclusionOutcome r;
        r.outcome = EvalOutcome::mkDecision(false);
        r.counterexample = inter;
        return r;
      }
    }
  }
  InclusionOutcome r;
  r.outcome = EvalOutcome::mkDecision(true);
  return r;
}

} // namespace qlatk
