#include "qlatk/prob.hpp"

#include "qlatk/graph.hpp"
#include "qlatk/qwa.hpp"
#include "qlatk/wmc.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace qlatk {

namespace {

// BSCC decomposition of a WeightedMc viewed as a MarkovChain (letters unused).
MarkovChain wmcAsChain(const WeightedMc& mc) {
  MarkovChain m;
  m.alphabet.letters = {"_"};
  m.stateNames.reserve(mc.n);
  for (int q = 0; q < mc.n; ++q) m.stateNames.push_back("n" + std::to_string(q));
  m.initial = mc.initial;
  m.edges.assign(mc.n, {});
  for (int q = 0; q < mc.n; ++q)
    for (const auto& e : mc.edges[q]) m.edges[q].push_back({0, e.prob, e.target});
  return m;
}

// Probability, per state, of ever taking an edge satisfying `hot`, assuming
// start in that state.
std::vector<Rational> everProbability(const WeightedMc& mc,
                                      const std::function<bool(const WeightedMc::Edge&)>& hot) {
  // C = states that can reach a hot edge.
  std::vector<std::vector<int>> radj(mc.n);
  std::vector<bool> canHot(mc.n, false);
  std::vector<int> stack;
  for (int q = 0; q < mc.n; ++q)
    for (const auto& e : mc.edges[q]) {
      radj[e.target].push_back(q);
      if (hot(e) && !canHot[q]) {
        canHot[q] = true;
        stack.push_back(q);
      }
    }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : radj[v])
      if (!canHot[u]) {
        canHot[u] = true;
        stack.push_back(u);
      }
  }
  std::vector<int> idx(mc.n, -1), nodes;
  for (int q = 0; q < mc.n; ++q)
    if (canHot[q]) {
      idx[q] = static_cast<int>(nodes.size());
      nodes.push_back(q);
    }
  std::vector<Rational> r(mc.n, Rational(0));
  if (nodes.empty()) return r;
  int k = static_cast<int>(nodes.size());
  std::vector<std::vector<Rational>> mat(k, std::vector<Rational>(k, Rational(0)));
  std::vector<Rational> rhs(k, Rational(0));
  for (int i = 0; i < k; ++i) {
    mat[i][i] += Rational(1);
    for (const auto& e : mc.edges[nodes[i]]) {
      if (hot(e)) {
        rhs[i] += e.prob;
      } else if (idx[e.target] >= 0) {
        mat[i][idx[e.target]] -= e.prob;
      }
    }
  }
  auto x = solveLinear(std::move(mat), std::move(rhs));
  for (int i = 0; i < k; ++i) r[nodes[i]] = x[i];
  return r;
}

Rational weightedInitialSum(const WeightedMc& mc, const std::vector<Rational>& perState) {
  Rational s;
  for (int q = 0; q < mc.n; ++q) s += mc.initial[q] * perState[q];
  return s;
}

std::vector<Rational> wmcWeightSet(const WeightedMc& mc) {
  std::vector<Rational> ws;
  for (const auto& per : mc.edges)
    for (const auto& e : per) ws.push_back(e.weight);
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  return ws;
}

} // namespace

ExtValue expectedRunValue(const WeightedMc& mc, RunAgg f, const std::optional<Rational>& lambda) {
  switch (f) {
    case RunAgg::DSum: {
      // v = r + lambda P v, exactly.
      std::vector<std::vector<Rational>> mat(mc.n, std::vector<Rational>(mc.n, Rational(0)));
      std::vector<Rational> rhs(mc.n, Rational(0));
      for (int q = 0; q < mc.n; ++q) {
        mat[q][q] += Rational(1);
        for (const auto& e : mc.edges[q]) {
          mat[q][e.target] -= *lambda * e.prob;
          rhs[q] += e.prob * e.weight;
        }
      }
      auto v = solveLinear(std::move(mat), std::move(rhs));
      return ExtValue(weightedInitialSum(mc, v));
    }
    case RunAgg::LimInfAvg:
    case RunAgg::LimSupAvg: {
      // Almost surely both averages equal the stationary mean of the
      // absorbing BSCC.
      MarkovChain m = wmcAsChain(mc);
      auto b = bsccs(m);
      Rational total;
      for (std::size_t i = 0; i < b.components.size(); ++i) {
        if (b.reachProb[i].isZero()) continue;
        const auto& comp = b.components[i];
        Rational mean = stationaryMean(
            m,
            [&](int src, const McEdge& e) {
              std::size_t j = static_cast<std::size_t>(&e - m.edges[src].data());
              return mc.edges[src][j].weight;
            },
            comp);
        total += b.reachProb[i] * mean;
      }
      return ExtValue(total);
    }
    case RunAgg::Inf:
    case RunAgg::Sup:
    case RunAgg::LimInf:
    case RunAgg::LimSup: {
      auto ws = wmcWeightSet(mc);
      const int k = static_cast<int>(ws.size());
      // P[value >= ws[i]] for each i; telescoping expectation.
      std::vector<Rational> pGeq(k, Rational(0));
      std::optional<BsccResult> b;
      std::optional<MarkovChain> m;
      if (f == RunAgg::LimInf || f == RunAgg::LimSup) {
        m = wmcAsChain(mc);
        b = bsccs(*m);
      }
      for (int i = 0; i < k; ++i) {
        const Rational& x = ws[i];
        switch (f) {
          case RunAgg::Sup: {
            auto r = everProbability(mc, [&](const WeightedMc::Edge& e) { return e.weight >= x; });
            pGeq[i] = weightedInitialSum(mc, r);
            break;
          }
          case RunAgg::Inf: {
            auto r = everProbability(mc, [&](const WeightedMc::Edge& e) { return e.weight < x; });
            pGeq[i] = Rational(1) - weightedInitialSum(mc, r);
            break;
          }
          case RunAgg::LimSup: {
            // Reach a BSCC containing a >= x edge.
            for (std::size_t c = 0; c < b->components.size(); ++c) {
              bool hotc = false;
              for (int v : b->components[c])
                for (const auto& e : mc.edges[v]) hotc = hotc || (e.weight >= x);
              if (hotc) pGeq[i] += b->reachProb[c];
            }
            break;
          }
          case RunAgg::LimInf: {
            // Reach a BSCC whose edges all satisfy >= x.
            for (std::size_t c = 0; c < b->components.size(); ++c) {
              bool all = true;
              for (int v : b->components[c])
                for (const auto& e : mc.edges[v]) all = all && (e.weight >= x);
              if (all) pGeq[i] += b->reachProb[c];
            }
            break;
          }
          default: break;
        }
      }
      Rational total;
      for (int i = 0; i < k; ++i) {
        Rational pNext = i + 1 < k ? pGeq[i + 1] : Rational(0);
        total += ws[i] * (pGeq[i] - pNext);
      }
      return ExtValue(total);
    }
  }
  throw std::logic_error("expectedRunValue: unreachable");
}

// ---------------------------------------------------------------------------
// measureBuchi
// ---------------------------------------------------------------------------

namespace {

// Pair graph of automaton states with MC states, over positive-probability MC
// edges; the automaton side is resolved nondeterministically.
struct PairGraph {
  int na, nm;
  std::vector<std::vector<int>> adj;  // (a * nm + m) -> successors
  int id(int qa, int qm) const { return qa * nm + qm; }
};

PairGraph buildPairGraph(const BuchiAutomaton& a, const MarkovChain& mc,
                         const std::vector<int>& letterMap) {
  PairGraph g;
  g.na = a.numStates;
  g.nm = mc.numStates();
  g.adj.assign(static_cast<std::size_t>(g.na) * g.nm, {});
  for (int qa = 0; qa < g.na; ++qa)
    for (int qm = 0; qm < g.nm; ++qm)
      for (const auto& e : mc.edges[qm]) {
        int la = letterMap[e.letter];
        for (int da : a.edges[qa][la]) g.adj[g.id(qa, qm)].push_back(g.id(da, e.target));
      }
  return g;
}

// Pairs from which, under some run choice, acceptance happens with positive
// probability: those that can reach an accepting end component.
std::vector<bool> goodPairs(const BuchiAutomaton& a, const MarkovChain& mc,
                            const std::vector<int>& letterMap) {
  PairGraph g = buildPairGraph(a, mc, letterMap);
  const int N = g.na * g.nm;

  // Maximal end component decomposition: iteratively prune pairs that cannot
  // cover all probabilistic moves inside their candidate component.
  std::vector<bool> alive(N, true);
  bool changed = true;
  std::vector<int> compOf(N, -1);
  while (changed) {
    changed = false;
    // SCCs of the alive subgraph.
    std::vector<int> index(N, -1), low(N, 0), stk;
    std::vector<bool> onStack(N, false);
    int counter = 0, comps = 0;
    compOf.assign(N, -1);
    for (int root = 0; root < N; ++root) {
      if (!alive[root] || index[root] >= 0) continue;
      std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
      index[root] = low[root] = counter++;
      stk.push_back(root);
      onStack[root] = true;
      while (!frames.empty()) {
        auto& [v, child] = frames.back();
        if (child < g.adj[v].size()) {
          int w = g.adj[v][child++];
          if (!alive[w]) continue;
          if (index[w] < 0) {
            index[w] = low[w] = counter++;
            stk.push_back(w);
            onStack[w] = true;
            frames.push_back({w, 0});
          } else if (onStack[w]) {
            low[v] = std::min(low[v], index[w]);
          }
        } else {
          int v2 = v;
          frames.pop_back();
          if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[v2]);
          if (low[v2] == index[v2]) {
            while (true) {
              int w = stk.back();
              stk.pop_back();
              onStack[w] = false;
              compOf[w] = comps;
              if (w == v2) break;
            }
            ++comps;
          }
        }
      }
    }
    // A pair stays only if, for every MC move, some automaton successor
    // remains in the same component.
    for (int qa = 0; qa < g.na; ++qa)
      for (int qm = 0; qm < g.nm; ++qm) {
        int v = g.id(qa, qm);
        if (!alive[v]) continue;
        bool ok = true;
        for (const auto& e : mc.edges[qm]) {
          int la = letterMap[e.letter];
          bool covered = false;
          for (int da : a.edges[qa][la]) {
            int w = g.id(da, e.target);
            if (alive[w] && compOf[w] == compOf[v]) covered = true;
          }
          if (!covered) ok = false;
        }
        if (!ok) {
          alive[v] = false;
          changed = true;
        }
      }
  }

  // Accepting end components: an alive component with an internal move and an
  // accepting automaton state.
  std::vector<bool> accComp;
  {
    int maxComp = -1;
    for (int v = 0; v < N; ++v) maxComp = std::max(maxComp, alive[v] ? compOf[v] : -1);
    accComp.assign(maxComp + 1, false);
    std::vector<bool> internal(maxComp + 1, false);
    for (int v = 0; v < N; ++v) {
      if (!alive[v]) continue;
      for (int w : g.adj[v])
        if (alive[w] && compOf[w] == compOf[v]) internal[compOf[v]] = true;
    }
    for (int v = 0; v < N; ++v)
      if (alive[v] && a.accepting[v / g.nm]) accComp[compOf[v]] = accComp[compOf[v]] || true;
    for (std::size_t c = 0; c < accComp.size(); ++c) accComp[c] = accComp[c] && internal[c];
  }

  // Pairs that can reach an accepting end component.
  std::vector<bool> good(N, false);
  std::vector<int> stack;
  for (int v = 0; v < N; ++v)
    if (alive[v] && compOf[v] >= 0 && compOf[v] < static_cast<int>(accComp.size()) &&
        accComp[compOf[v]]) {
      good[v] = true;
      stack.push_back(v);
    }
  std::vector<std::vector<int>> radj(N);
  for (int v = 0; v < N; ++v)
    for (int w : g.adj[v]) radj[w].push_back(v);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : radj[v])
      if (!good[u]) {
        good[u] = true;
        stack.push_back(u);
      }
  }
  return good;
}

} // namespace

Rational measureBuchi(const BuchiAutomaton& lang, const MarkovChain& mc) {
  BuchiAutomaton a = toBuchi(lang);
  // Letters of the chain must exist in the automaton's alphabet.
  std::vector<int> letterMap(mc.alphabet.size());
  for (int l = 0; l < mc.alphabet.size(); ++l) {
    int la = a.alphabet.index(mc.alphabet.name(l));
    if (la < 0) throw std::invalid_argument("measureBuchi: alphabet mismatch");
    letterMap[l] = la;
  }

  auto good = goodPairs(a, mc, letterMap);
  const int nm = mc.numStates();

  // Deterministic subset tracking próduct with the chain.
  struct SState {
    int m;
    std::set<int> s;
  };
  std::map<std::pair<int, std::vector<int>>, int> ids;
  std::vector<std::pair<int, std::vector<int>>> keys;
  WeightedMc prod;
  auto intern = [&](int m, std::vector<int> s) {
    auto key = std::make_pair(m, std::move(s));
    auto it = ids.find(key);
    if (it != ids.end()) return std::make_pair(it->second, false);
    int id = prod.n++;
    ids[key] = id;
    keys.push_back(ids.find(key)->first);
    prod.edges.emplace_back();
    checkCap(static_cast<std::size_t>(prod.n), "measureBuchi");
    return std::make_pair(id, true);
  };

  std::vector<int> initSubset(a.initial.begin(), a.initial.end());
  std::sort(initSubset.begin(), initSubset.end());
  initSubset.erase(std::unique(initSubset.begin(), initSubset.end()), initSubset.end());

  std::vector<std::pair<int, Rational>> initNodes;
  std::vector<int> work;
  for (int m0 = 0; m0 < nm; ++m0) {
    if (mc.initial[m0].isZero()) continue;
    auto [id, fresh] = intern(m0, initSubset);
    if (fresh) work.push_back(id);
    initNodes.push_back({id, mc.initial[m0]});
  }
  while (!work.empty()) {
    int id = work.back();
    work.pop_back();
    auto [m, subset] = keys[id];
    for (const auto& e : mc.edges[m]) {
      int la = letterMap[e.letter];
      std::set<int> nxt;
      for (int q : subset)
        for (int d : a.edges[q][la]) nxt.insert(d);
      auto [nid, fresh] = intern(e.target, std::vector<int>(nxt.begin(), nxt.end()));
      if (fresh) work.push_back(nid);
      prod.edges[id].push_back({e.prob, Rational(0), nid});
    }
  }
  prod.initial.assign(prod.n, Rational(0));
  for (auto& [id, p] : initNodes) prod.initial[id] += p;

  // Merge parallel edges for the BSCC analysis.
  for (auto& per : prod.edges) {
    std::map<int, Rational> merged;
    for (const auto& e : per) merged[e.target] += e.prob;
    per.clear();
    for (auto& [t, p] : merged) per.push_back({p, Rational(0), t});
  }

  MarkovChain chain = wmcAsChain(prod);
  auto b = bsccs(chain);
  // A BSCC is accepting iff some member carries a good (state, chain) pair:
  // conditioned on absorption the acceptance probability is then 1 by the
  // zero-one law, and 0 otherwise.
  Rational mu;
  for (std::size_t c = 0; c < b.components.size(); ++c) {
    if (b.reachProb[c].isZero()) continue;
    bool acc = false;
    for (int v : b.components[c]) {
      const auto& [m, subset] = keys[v];
      for (int q : subset)
        if (good[q * nm + m]) acc = true;
    }
    if (acc) mu += b.reachProb[c];
  }
  return mu;
}

// ---------------------------------------------------------------------------
// evalMarkov
// ---------------------------------------------------------------------------

EvalOutcome evalMarkov(const QlaSpec& spec, const MarkovChain& mc) {
  if (spec.h != LangAgg::E) throw std::invalid_argument("evalMarkov: language aggregator must be exp");
  {
    auto v = validate(spec.qwa);
    if (!v.empty()) throw std::invalid_argument("invalid QWA: " + v.front().message);
    auto vm = validate(mc);
    if (!vm.empty()) throw std::invalid_argument("invalid Markov chain: " + vm.front().message);
  }
  QwaSpec normalized = spec.qwa;
  // A deterministic system has one run per word, so all word aggregators
  // coincide and the probabilistic-system algorithm applies.
  if (normalized.g != WordAgg::E && normalized.system.isDeterministic())
    normalized.g = WordAgg::E;
  const QwaSpec& a = normalized;
  switch (a.g) {
    case WordAgg::Inf: {
      QlaSpec d;
      d.h = LangAgg::E;
      d.qwa = dualQwa(a);
      auto r = evalMarkov(d, mc);
      if (!r.isValue()) return r;
      return EvalOutcome::mkValue(-r.value);
    }
    case WordAgg::LimSup:
    case WordAgg::LimInf:
      return EvalOutcome::unsupported(UnsupportedReason::OpenHard, "stochastic:limit-word-agg");
    case WordAgg::E: {
      // Product of the probabilistic system with the chain is a finite MC.
      const Wlts& t = a.system;
      std::vector<int> letterMap(mc.alphabet.size());
      for (int l = 0; l < mc.alphabet.size(); ++l) {
        int la = t.alphabet.index(mc.alphabet.name(l));
        if (la < 0) throw std::invalid_argument("evalMarkov: alphabet mismatch");
        letterMap[l] = la;
      }
      WeightedMc prod;
      const int nm = mc.numStates();
      prod.n = t.numStates() * nm;
      prod.initial.assign(prod.n, Rational(0));
      prod.edges.assign(prod.n, {});
      auto id = [&](int q, int m) { return q * nm + m; };
      for (int q = 0; q < t.numStates(); ++q)
        for (int m = 0; m < nm; ++m)
          for (const auto& em : mc.edges[m])
            for (const auto& et : t.edges[q][letterMap[em.letter]])
              prod.edges[id(q, m)].push_back({em.prob * et.prob, et.weight, id(et.target, em.target)});
      for (int q = 0; q < t.numStates(); ++q)
        for (int m = 0; m < nm; ++m) prod.initial[id(q, m)] = t.initial[q] * mc.initial[m];
      return EvalOutcome::mkValue(expectedRunValue(prod, a.f, a.lambda));
    }
    case WordAgg::Sup:
      break;
  }
  // g = Sup.
  switch (a.f) {
    case RunAgg::LimInfAvg:
    case RunAgg::LimSupAvg:
      return EvalOutcome::unsupported(UnsupportedReason::Undecidable, "stochastic:avg");
    case RunAgg::DSum:
      return EvalOutcome::unsupported(UnsupportedReason::OpenHard, "stochastic:dsum");
    default:
      break;
  }
  // Standard run aggregators: telescoping over the weight thresholds.
  auto ws = a.system.weightSet();
  const int k = static_cast<int>(ws.size());
  std::vector<Rational> pGeq(k);
  for (int i = 0; i < k; ++i)
    pGeq[i] = measureBuchi(thresholdAutomaton(a, ws[i], ThresholdRel::Geq), mc);
  Rational total;
  for (int i = 0; i < k; ++i) {
    Rational pNext = i + 1 < k ? pGeq[i + 1] : Rational(0);
    total += ws[i] * (pGeq[i] - pNext);
  }
  return EvalOutcome::mkValue(ExtValue(total));
}

} // namespace qlatk
