#include "qlatk/qwa.hpp"

#include "qlatk/graph.hpp"
#include "qlatk/wmc.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace qlatk {

namespace {

void requireValid(const QwaSpec& a) {
  auto v = validate(a);
  if (!v.empty()) throw std::invalid_argument("invalid QWA: " + v.front().message);
}

// ---------------------------------------------------------------------------
// Lasso product: runs of the system on u v^ω are the infinite paths of this
// finite graph.
// ---------------------------------------------------------------------------

struct LProd {
  int n = 0;  // states * L
  int L = 0, pref = 0;
  struct E {
    int src, dst;
    Rational weight, prob;
  };
  std::vector<E> edges;
  std::vector<std::vector<int>> out;
  std::vector<int> initials;
  std::vector<Rational> initProb;  // over nodes
};

LProd lassoProduct(const Wlts& t, const LassoWord& w) {
  LProd p;
  p.pref = static_cast<int>(w.prefix.size());
  p.L = p.pref + static_cast<int>(w.period.size());
  p.n = t.numStates() * p.L;
  std::vector<int> letters(p.L);
  for (int i = 0; i < p.L; ++i) {
    const std::string& s = i < p.pref ? w.prefix[i] : w.period[i - p.pref];
    letters[i] = t.alphabet.index(s);
    if (letters[i] < 0) throw std::invalid_argument("evalLasso: unknown letter " + s);
  }
  p.out.assign(p.n, {});
  for (int q = 0; q < t.numStates(); ++q)
    for (int pos = 0; pos < p.L; ++pos) {
      int next = pos + 1 < p.L ? pos + 1 : p.pref;
      for (const auto& e : t.edges[q][letters[pos]]) {
        LProd::E pe{q * p.L + pos, e.target * p.L + next, e.weight, e.prob};
        p.out[pe.src].push_back(static_cast<int>(p.edges.size()));
        p.edges.push_back(pe);
      }
    }
  p.initProb.assign(p.n, Rational(0));
  for (int q = 0; q < t.numStates(); ++q)
    if (!t.initial[q].isZero()) {
      p.initials.push_back(q * p.L + 0);
      p.initProb[q * p.L + 0] = t.initial[q];
    }
  return p;
}

std::vector<bool> lpReach(const LProd& p) {
  std::vector<bool> seen(p.n, false);
  std::vector<int> stack;
  for (int q : p.initials)
    if (!seen[q]) {
      seen[q] = true;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int ei : p.out[v]) {
      int d = p.edges[ei].dst;
      if (!seen[d]) {
        seen[d] = true;
        stack.push_back(d);
      }
    }
  }
  return seen;
}

WeightedDigraph lpDigraph(const LProd& p, const std::vector<bool>& keep) {
  WeightedDigraph g;
  g.n = p.n;
  for (const auto& e : p.edges)
    if (keep[e.src] && keep[e.dst]) g.edges.push_back({e.src, e.weight, e.dst, -1});
  return g;
}

// Strongly connected components (indices) of an edge-filtered subgraph.
std::vector<std::vector<int>> lpSccs(const LProd& p, const std::vector<bool>& nodeKeep,
                                     const std::function<bool(const LProd::E&)>& edgeKeep) {
  WeightedDigraph g;
  g.n = p.n;
  for (const auto& e : p.edges)
    if (nodeKeep[e.src] && nodeKeep[e.dst] && edgeKeep(e))
      g.edges.push_back({e.src, e.weight, e.dst, -1});
  return sccs(g);
}

bool anyInternalEdge(const LProd& p, const std::vector<int>& comp,
                     const std::function<bool(const LProd::E&)>& edgeKeep) {
  std::set<int> in(comp.begin(), comp.end());
  for (int v : comp)
    for (int ei : p.out[v]) {
      const auto& e = p.edges[ei];
      if (edgeKeep(e) && in.count(e.dst)) return true;
    }
  return false;
}

// ---------------------------------------------------------------------------
// g = Sup evaluation on the lasso product
// ---------------------------------------------------------------------------

ExtValue supEval(const QwaSpec& a, const LassoWord& w) {
  LProd p = lassoProduct(a.system, w);
  auto reach = lpReach(p);
  auto weights = a.system.weightSet();

  switch (a.f) {
    case RunAgg::Sup: {
      std::optional<Rational> best;
      for (const auto& e : p.edges)
        if (reach[e.src] && (!best || e.weight > *best)) best = e.weight;
      return ExtValue(*best);
    }
    case RunAgg::Inf: {
      for (auto it = weights.rbegin(); it != weights.rend(); ++it) {
        const Rational& x = *it;
        auto keep = [&](const LProd::E& e) { return e.weight >= x; };
        // Reachability from initials inside the subgraph.
        std::vector<bool> seen(p.n, false);
        std::vector<int> stack;
        for (int q : p.initials)
          if (!seen[q]) {
            seen[q] = true;
            stack.push_back(q);
          }
        while (!stack.empty()) {
          int v = stack.back();
          stack.pop_back();
          for (int ei : p.out[v]) {
            const auto& e = p.edges[ei];
            if (!keep(e)) continue;
            if (!seen[e.dst]) {
              seen[e.dst] = true;
              stack.push_back(e.dst);
            }
          }
        }
        bool ok = false;
        for (const auto& comp : lpSccs(p, seen, keep))
          if (anyInternalEdge(p, comp, keep)) {
            bool inSeen = true;
            for (int v : comp) inSeen = inSeen && seen[v];
            if (inSeen) ok = true;
          }
        if (ok) return ExtValue(x);
      }
      break;
    }
    case RunAgg::LimSup: {
      std::optional<Rational> best;
      auto all = [](const LProd::E&) { return true; };
      for (const auto& comp : lpSccs(p, reach, all)) {
        std::set<int> in(comp.begin(), comp.end());
        for (int v : comp)
          for (int ei : p.out[v]) {
            const auto& e = p.edges[ei];
            if (reach[e.dst] && in.count(e.dst) && (!best || e.weight > *best)) best = e.weight;
          }
      }
      return ExtValue(*best);
    }
    case RunAgg::LimInf: {
      for (auto it = weights.rbegin(); it != weights.rend(); ++it) {
        const Rational& x = *it;
        auto keep = [&](const LProd::E& e) { return e.weight >= x; };
        for (const auto& comp : lpSccs(p, reach, keep))
          if (anyInternalEdge(p, comp, keep)) return ExtValue(x);
      }
      break;
    }
    case RunAgg::LimInfAvg:
    case RunAgg::LimSupAvg: {
      // On a fixed lasso both averages have the same optimum: the best
      // reachable cycle mean.
      return maxMeanCycle(lpDigraph(p, reach)).value;
    }
    case RunAgg::DSum: {
      WeightedDigraph g;
      g.n = 0;
      std::vector<int> map(p.n, -1);
      for (int v = 0; v < p.n; ++v)
        if (reach[v]) map[v] = g.n++;
      for (const auto& e : p.edges)
        if (reach[e.src]) g.edges.push_back({map[e.src], e.weight, map[e.dst], -1});
      auto r = discountedBestValue(g, *a.lambda, true);
      std::optional<Rational> best;
      for (int q : p.initials)
        if (!best || r.value[map[q]] > *best) best = r.value[map[q]];
      return ExtValue(*best);
    }
  }
  // The product of a complete system always has reachable cycles.
  throw std::logic_error("supEval: unreachable");
}

// ---------------------------------------------------------------------------
// g = E evaluation: the product is a finite Markov chain.
// ---------------------------------------------------------------------------

ExtValue expEval(const QwaSpec& a, const LassoWord& w) {
  LProd p = lassoProduct(a.system, w);
  auto reach = lpReach(p);
  WeightedMc mc;
  std::vector<int> map(p.n, -1);
  for (int v = 0; v < p.n; ++v)
    if (reach[v]) {
      map[v] = mc.n++;
    }
  mc.initial.assign(mc.n, Rational(0));
  mc.edges.assign(mc.n, {});
  for (int v = 0; v < p.n; ++v)
    if (reach[v]) mc.initial[map[v]] = p.initProb[v];
  for (const auto& e : p.edges)
    if (reach[e.src]) mc.edges[map[e.src]].push_back({e.prob, e.weight, map[e.dst]});
  return expectedRunValue(mc, a.f, a.lambda);
}

// ---------------------------------------------------------------------------
// Exact-value automaton (two-copy B1 + three-copy B2 stages). Accepting runs
// of the result are in bijection with the runs of value exactly x.
// ---------------------------------------------------------------------------

BuchiAutomaton exactValueAutomaton(RunAgg f, const Wlts& t, const Rational& x) {
  if (f != RunAgg::LimInf && f != RunAgg::LimSup)
    throw std::invalid_argument("exactValueAutomaton: limit run aggregator required");
  const int n = t.numStates();
  const int b1 = 2 * n;       // part A = [0,n), part B = [n,2n)
  const int total = 3 * b1;   // copies c1, c2, c3
  checkCap(static_cast<std::size_t>(total), "exactValueAutomaton");

  BuchiAutomaton r;
  r.alphabet = t.alphabet;
  r.numStates = total;
  r.edges.assign(total, std::vector<std::vector<int>>(t.alphabet.size()));
  r.accepting.assign(total, false);
  auto b1succ = [&](int bstate, const Rational& wgt, int target) {
    // From part A every transition moves to part B; from part B a transition
    // of weight exactly x returns to part A.
    bool toA = (bstate >= n) && (wgt == x);
    return toA ? target : n + target;
  };
  auto dismisses = [&](const Rational& wgt) {
    return f == RunAgg::LimSup ? wgt > x : wgt < x;
  };
  for (int copy = 0; copy < 3; ++copy)
    for (int part = 0; part < 2; ++part)
      for (int q = 0; q < n; ++q) {
        int bstate = part * n + q;
        int src = copy * b1 + bstate;
        for (int l = 0; l < t.alphabet.size(); ++l)
          for (const auto& e : t.edges[q][l]) {
            int bs = b1succ(bstate, e.weight, e.target);
            if (copy == 0) {
              r.edges[src][l].push_back(1 * b1 + bs);
              if (!dismisses(e.weight)) r.edges[src][l].push_back(2 * b1 + bs);
            } else if (copy == 1) {
              r.edges[src][l].push_back((dismisses(e.weight) ? 0 : 1) * b1 + bs);
            } else {
              if (!dismisses(e.weight)) r.edges[src][l].push_back(2 * b1 + bs);
            }
          }
      }
  for (int q = 0; q < n; ++q) r.accepting[2 * b1 + q] = true;  // copy 3, part A
  for (int q : t.initialSupport()) r.initial.push_back(q);     // copy 1, part A
  return r;
}

// ---------------------------------------------------------------------------
// g in {LimSup, LimInf} on lassos: which values are achieved by infinitely
// many runs. For f in {LimInf, LimSup} the run multiset of value x maps to
// the accepting runs of the exact-value automaton; infinitude is decided by
// viewing runs as words over the transition alphabet.
// ---------------------------------------------------------------------------

bool infManyValueRunsStd(const QwaSpec& a, const Rational& x, const LassoWord& w) {
  BuchiAutomaton b = exactValueAutomaton(a.f, a.system, x);
  // Product with the lasso positions, transitions relabeled by a fresh letter
  // per product edge: words of the result are exactly runs of b on w.
  const int L = static_cast<int>(w.prefix.size() + w.period.size());
  const int pref = static_cast<int>(w.prefix.size());
  std::vector<int> letters(L);
  for (int i = 0; i < L; ++i) {
    const std::string& s = i < pref ? w.prefix[i] : w.period[i - pref];
    letters[i] = b.alphabet.index(s);
    if (letters[i] < 0) throw std::invalid_argument("evalLasso: unknown letter " + s);
  }
  struct PE {
    int src, dst;
  };
  std::vector<PE> pedges;
  auto id = [&](int q, int pos) { return q * L + pos; };
  for (int q = 0; q < b.numStates; ++q)
    for (int pos = 0; pos < L; ++pos) {
      int next = pos + 1 < L ? pos + 1 : pref;
      for (int d : b.edges[q][letters[pos]]) pedges.push_back({id(q, pos), id(d, next)});
    }
  BuchiAutomaton c;
  c.alphabet.letters.reserve(pedges.size());
  for (std::size_t i = 0; i < pedges.size(); ++i) c.alphabet.letters.push_back("e" + std::to_string(i));
  c.numStates = b.numStates * L;
  c.edges.assign(c.numStates, std::vector<std::vector<int>>(c.alphabet.size()));
  c.accepting.assign(c.numStates, false);
  for (std::size_t i = 0; i < pedges.size(); ++i)
    c.edges[pedges[i].src][static_cast<int>(i)].push_back(pedges[i].dst);
  for (int q = 0; q < b.numStates; ++q)
    if (b.accepting[q])
      for (int pos = 0; pos < L; ++pos) c.accepting[id(q, pos)] = true;
  for (int q : b.initial) c.initial.push_back(id(q, 0));
  return isInfinite(c);
}

// ---------------------------------------------------------------------------
// g in {LimSup, LimInf} with limit-average run aggregators: every achieved
// value keeps its multiplicity under finite prefix edits, so infinitude is a
// structural property of the lasso product (a pumpable cycle next to a
// value-x tail that differs from the pump stream).
// ---------------------------------------------------------------------------

struct AvgAnalysis {
  const LProd& p;
  std::vector<bool> reach;
  std::vector<std::vector<int>> comps;          // maximal SCCs of reachable part
  std::vector<int> compOf;                      // node -> comp or -1
  std::vector<bool> compNontrivial;
  std::vector<std::optional<Rational>> compMin, compMax;  // cycle-mean interval
  std::vector<std::vector<int>> radj;           // reverse adjacency (reachable)

  explicit AvgAnalysis(const LProd& prod) : p(prod) {
    reach = lpReach(p);
    auto all = [](const LProd::E&) { return true; };
    comps = lpSccs(p, reach, all);
    compOf.assign(p.n, -1);
    for (int c = 0; c < static_cast<int>(comps.size()); ++c)
      for (int v : comps[c]) compOf[v] = c;
    compNontrivial.assign(comps.size(), false);
    compMin.resize(comps.size());
    compMax.resize(comps.size());
    for (int c = 0; c < static_cast<int>(comps.size()); ++c) {
      if (!reach[comps[c][0]]) continue;
      std::set<int> in(comps[c].begin(), comps[c].end());
      WeightedDigraph g;
      g.n = p.n;
      for (const auto& e : p.edges)
        if (in.count(e.src) && in.count(e.dst)) g.edges.push_back({e.src, e.weight, e.dst, -1});
      if (g.edges.empty()) continue;
      auto mx = maxMeanCycle(g);
      auto mn = minMeanCycle(g);
      if (mx.value.isFinite()) {
        compNontrivial[c] = true;
        compMax[c] = mx.value.finite();
        compMin[c] = mn.value.finite();
      }
    }
    radj.assign(p.n, {});
    for (const auto& e : p.edges)
      if (reach[e.src] && reach[e.dst]) radj[e.dst].push_back(e.src);
  }

  // Nodes from which a value-x tail exists.
  std::vector<bool> feasible(const Rational& x) const {
    std::vector<bool> feas(p.n, false);
    std::vector<int> stack;
    for (int c = 0; c < static_cast<int>(comps.size()); ++c) {
      if (!compNontrivial[c]) continue;
      if (*compMin[c] <= x && x <= *compMax[c])
        for (int v : comps[c])
          if (reach[v] && !feas[v]) {
            feas[v] = true;
            stack.push_back(v);
          }
    }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : radj[v])
        if (!feas[u]) {
          feas[u] = true;
          stack.push_back(u);
        }
    }
    return feas;
  }
};

// Compare the stream c^ω against an eventually periodic edge stream given as
// stem+cycle (both sequences of edge indices).
bool streamsEqual(const std::vector<int>& c, const std::vector<int>& stem,
                  const std::vector<int>& cyc) {
  std::size_t bound = stem.size() + c.size() * cyc.size() + c.size() + cyc.size() + 2;
  for (std::size_t i = 0; i < bound; ++i) {
    int lhs = c[i % c.size()];
    int rhs = i < stem.size() ? stem[i]
                              : cyc[(i - stem.size()) % cyc.size()];
    if (lhs != rhs) return false;
  }
  return true;
}

// Shortest cycle (as a list of edge indices) through node u, restricted to
// reachable nodes. Empty when none exists.
std::vector<int> shortestCycleAt(const LProd& p, const std::vector<bool>& reach, int u) {
  std::vector<int> prevNode(p.n, -2), prevEdge(p.n, -1);
  std::queue<int> bfs;
  for (int ei : p.out[u]) {
    const auto& e = p.edges[ei];
    if (!reach[e.dst]) continue;
    if (e.dst == u) return {ei};
    if (prevNode[e.dst] == -2) {
      prevNode[e.dst] = u;
      prevEdge[e.dst] = ei;
      bfs.push(e.dst);
    }
  }
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int ei : p.out[v]) {
      const auto& e = p.edges[ei];
      if (!reach[e.dst]) continue;
      if (e.dst == u) {
        std::vector<int> cyc;
        for (int cur = v; cur != u; cur = prevNode[cur]) cyc.push_back(prevEdge[cur]);
        std::reverse(cyc.begin(), cyc.end());
        cyc.push_back(ei);
        return cyc;
      }
      if (prevNode[e.dst] == -2) {
        prevNode[e.dst] = v;
        prevEdge[e.dst] = ei;
        bfs.push(e.dst);
      }
    }
  }
  return {};
}

int minimalPeriodInts(const std::vector<int>& c) {
  int L = static_cast<int>(c.size());
  for (int p2 = 1; p2 <= L; ++p2) {
    if (L % p2 != 0) continue;
    bool ok = true;
    for (int i = 0; i < L && ok; ++i) ok = (c[i] == c[i % p2]);
    if (ok) return p2;
  }
  return L;
}

// Is there a cycle at u whose edge stream differs from c^ω?
bool divergentCycleExists(const LProd& p, const std::vector<bool>& reach, int u,
                          const std::vector<int>& c) {
  int per = minimalPeriodInts(c);
  std::vector<bool> seen(static_cast<std::size_t>(p.n) * per * 2, false);
  std::queue<std::tuple<int, int, bool>> bfs;
  bool hit = false;
  auto consider = [&](int node, int pos, bool dirty) {
    if (node == u && (dirty || pos % per != 0)) {
      hit = true;
      return;
    }
    std::size_t idx = (static_cast<std::size_t>(node) * per + pos) * 2 + (dirty ? 1 : 0);
    if (seen[idx]) return;
    seen[idx] = true;
    bfs.push({node, pos, dirty});
  };
  for (int ei : p.out[u]) {
    const auto& e = p.edges[ei];
    if (!reach[e.dst]) continue;
    consider(e.dst, 1 % per, ei != c[0]);
    if (hit) return true;
  }
  while (!hit && !bfs.empty()) {
    auto [node, pos, dirty] = bfs.front();
    bfs.pop();
    for (int ei : p.out[node]) {
      const auto& e = p.edges[ei];
      if (!reach[e.dst]) continue;
      consider(e.dst, (pos + 1) % per, dirty || (ei != c[pos]));
      if (hit) break;
    }
  }
  return hit;
}

ExtValue avgLimitEval(const QwaSpec& a, const LassoWord& w) {
  bool wantSup = (a.g == WordAgg::LimSup);
  LProd p = lassoProduct(a.system, w);
  AvgAnalysis an(p);

  // Candidate values: interval endpoints of reachable nontrivial SCCs.
  std::vector<Rational> candidates;
  for (int c = 0; c < static_cast<int>(an.comps.size()); ++c)
    if (an.compNontrivial[c]) {
      candidates.push_back(*an.compMin[c]);
      candidates.push_back(*an.compMax[c]);
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (wantSup) std::reverse(candidates.begin(), candidates.end());

  for (const Rational& x : candidates) {
    auto feas = an.feasible(x);
    // Forward reachability among feasibility: for (α) we need, from some
    // cycle node u with feas(u), a reachable node with two distinct feasible
    // edges.
    for (int u = 0; u < p.n; ++u) {
      if (!an.reach[u] || !feas[u]) continue;
      if (an.compOf[u] < 0 || !an.compNontrivial[an.compOf[u]]) continue;
      // (α) a divergence node reachable from u
      std::vector<bool> seen(p.n, false);
      std::vector<int> stack{u};
      seen[u] = true;
      bool qualified = false;
      while (!stack.empty() && !qualified) {
        int v = stack.back();
        stack.pop_back();
        int feasEdges = 0;
        for (int ei : p.out[v]) {
          const auto& e = p.edges[ei];
          if (an.reach[e.dst] && feas[e.dst]) ++feasEdges;
          if (an.reach[e.dst] && !seen[e.dst]) {
            seen[e.dst] = true;
            stack.push_back(e.dst);
          }
        }
        if (feasEdges >= 2) qualified = true;
      }
      if (!qualified) {
        // (β) unique forced value-x tail; ask for a cycle at u diverging from it.
        std::vector<int> cyc = shortestCycleAt(p, an.reach, u);
        if (cyc.empty()) continue;
        // Follow the unique feasible-edge chain from u.
        std::vector<int> stem;
        std::vector<int> visitAt(p.n, -1);
        int cur = u;
        std::vector<int> tailCycle;
        while (true) {
          if (visitAt[cur] >= 0) {
            tailCycle.assign(stem.begin() + visitAt[cur], stem.end());
            stem.resize(visitAt[cur]);
            break;
          }
          visitAt[cur] = static_cast<int>(stem.size());
          int chosen = -1;
          for (int ei : p.out[cur]) {
            const auto& e = p.edges[ei];
            if (an.reach[e.dst] && feas[e.dst]) {
              chosen = ei;
              break;
            }
          }
          if (chosen < 0) break;  // no tail after all
          stem.push_back(chosen);
          cur = p.edges[chosen].dst;
        }
        if (!tailCycle.empty()) {
          if (!streamsEqual(cyc, stem, tailCycle))
            qualified = true;
          else if (divergentCycleExists(p, an.reach, u, cyc))
            qualified = true;
        }
      }
      if (qualified) return ExtValue(x);
    }
  }
  return wantSup ? ExtValue::minusInf() : ExtValue::plusInf();
}

// ---------------------------------------------------------------------------
// g in {LimSup, LimInf} with DSum: infinitude of a value needs a cycle whose
// discounted fixpoint is matched by a second, stream-distinct tail; the
// supremum over stems is a discounted optimum with cash-out terminals.
// ---------------------------------------------------------------------------

struct DsumLimitCtx {
  const LProd& p;
  Rational lambda;
  std::vector<bool> reach;
  std::vector<Rational> minT, maxT;
  std::map<std::pair<int, std::string>, int> memo;  // 0 = in progress, 1 yes, -1 no
  int depthBudget = 60000;

  DsumLimitCtx(const LProd& prod, Rational lam) : p(prod), lambda(std::move(lam)) {
    reach = lpReach(p);
    WeightedDigraph g;
    g.n = 0;
    map.assign(p.n, -1);
    for (int v = 0; v < p.n; ++v)
      if (reach[v]) map[v] = g.n++;
    inv.resize(g.n);
    for (int v = 0; v < p.n; ++v)
      if (map[v] >= 0) inv[map[v]] = v;
    for (const auto& e : p.edges)
      if (reach[e.src]) g.edges.push_back({map[e.src], e.weight, map[e.dst], -1});
    auto lo = discountedBestValue(g, lambda, false);
    auto hi = discountedBestValue(g, lambda, true);
    minT.assign(p.n, Rational(0));
    maxT.assign(p.n, Rational(0));
    for (int v = 0; v < p.n; ++v)
      if (map[v] >= 0) {
        minT[v] = lo.value[map[v]];
        maxT[v] = hi.value[map[v]];
      }
  }
  std::vector<int> map, inv;

  bool tailValueExists(int z, const Rational& r) {
    if (r < minT[z] || r > maxT[z]) return false;
    auto key = std::make_pair(z, r.str());
    auto it = memo.find(key);
    if (it != memo.end()) {
      if (it->second == 0) return true;  // revisit on path: cycle fixpoint
      return it->second > 0;
    }
    if (--depthBudget <= 0) throw CapExceeded("dsum limit evaluation: value search too deep");
    memo[key] = 0;
    bool found = false;
    for (int ei : p.out[z]) {
      const auto& e = p.edges[ei];
      if (!reach[e.dst]) continue;
      Rational r2 = (r - e.weight) / lambda;
      if (tailValueExists(e.dst, r2)) {
        found = true;
        break;
      }
    }
    memo[key] = found ? 1 : -1;
    return found;
  }
};

// Simple cycles through u (bounded depth) plus pairwise concatenations.
void collectCyclesAt(const LProd& p, const std::vector<bool>& reach, int u,
                     std::vector<std::vector<int>>& out) {
  std::vector<std::vector<int>> simple;
  std::vector<int> path;
  std::vector<bool> onPath(p.n, false);
  std::function<void(int)> dfs = [&](int v) {
    if (simple.size() > 64) return;
    for (int ei : p.out[v]) {
      const auto& e = p.edges[ei];
      if (!reach[e.dst]) continue;
      if (e.dst == u) {
        path.push_back(ei);
        simple.push_back(path);
        path.pop_back();
        continue;
      }
      if (onPath[e.dst]) continue;
      onPath[e.dst] = true;
      path.push_back(ei);
      dfs(e.dst);
      path.pop_back();
      onPath[e.dst] = false;
    }
  };
  onPath[u] = true;
  dfs(u);
  out = simple;
  for (std::size_t i = 0; i < simple.size(); ++i)
    for (std::size_t j = 0; j < simple.size(); ++j) {
      if (i == j) continue;
      std::vector<int> comp = simple[i];
      comp.insert(comp.end(), simple[j].begin(), simple[j].end());
      out.push_back(std::move(comp));
    }
}

ExtValue dsumLimitEval(const QwaSpec& a, const LassoWord& w) {
  if (a.g == WordAgg::LimInf) {
    QwaSpec d = a;
    d.g = WordAgg::LimSup;
    d.system = dual(a.system);
    LassoWord w2 = w;
    ExtValue v = dsumLimitEval(d, w2);
    return -v;
  }
  LProd p = lassoProduct(a.system, w);
  DsumLimitCtx ctx(p, *a.lambda);

  // Anchors (u, y): a cycle at u with fixpoint y and a second, stream-distinct
  // tail of value y.
  struct Anchor {
    int u;
    Rational y;
  };
  std::vector<Anchor> anchors;
  Rational one(1);
  for (int u = 0; u < p.n; ++u) {
    if (!ctx.reach[u]) continue;
    std::vector<std::vector<int>> cycles;
    collectCyclesAt(p, ctx.reach, u, cycles);
    std::set<std::string> seenY;
    for (const auto& cyc : cycles) {
      Rational sum(0), pw(1);
      for (int ei : cyc) {
        sum += pw * p.edges[ei].weight;
        pw *= ctx.lambda;
      }
      Rational y = sum / (one - ctx.lambda.pow(static_cast<unsigned long>(cyc.size())));
      // Scan one cycle period for a divergent equal-value branch.
      Rational ri = y;
      bool valid = false;
      int node = u;
      for (std::size_t i = 0; i < cyc.size() && !valid; ++i) {
        for (int ei : p.out[node]) {
          if (ei == cyc[i]) continue;
          const auto& e = p.edges[ei];
          if (!ctx.reach[e.dst]) continue;
          Rational r2 = (ri - e.weight) / ctx.lambda;
          if (ctx.tailValueExists(e.dst, r2)) {
            valid = true;
            break;
          }
        }
        ri = (ri - p.edges[cyc[i]].weight) / ctx.lambda;
        node = p.edges[cyc[i]].dst;
      }
      if (valid && !seenY.count(y.str())) {
        seenY.insert(y.str());
        anchors.push_back({u, y});
      }
    }
  }
  if (anchors.empty()) return ExtValue::minusInf();

  // Cash-out optimum over stems.
  WeightedDigraph g;
  std::vector<int> map(p.n, -1);
  g.n = 0;
  for (int v = 0; v < p.n; ++v)
    if (ctx.reach[v]) map[v] = g.n++;
  for (const auto& e : p.edges)
    if (ctx.reach[e.src]) g.edges.push_back({map[e.src], e.weight, map[e.dst], -1});
  std::vector<int> absorbOf(anchors.size());
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    int ab = g.n++;
    absorbOf[k] = ab;
    Rational wgt = anchors[k].y * (one - ctx.lambda);
    g.edges.push_back({map[anchors[k].u], wgt, ab, -1});
    g.edges.push_back({ab, wgt, ab, -1});
  }
  // Restrict to nodes co-reachable to some absorb.
  std::vector<std::vector<int>> rev(g.n);
  for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) rev[g.edges[i].dst].push_back(i);
  std::vector<bool> co(g.n, false);
  std::vector<int> stack;
  for (int ab : absorbOf) {
    co[ab] = true;
    stack.push_back(ab);
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int ei : rev[v]) {
      int s = g.edges[ei].src;
      if (!co[s]) {
        co[s] = true;
        stack.push_back(s);
      }
    }
  }
  WeightedDigraph g2;
  std::vector<int> map2(g.n, -1);
  g2.n = 0;
  for (int v = 0; v < g.n; ++v)
    if (co[v]) map2[v] = g2.n++;
  for (const auto& e : g.edges)
    if (co[e.src] && co[e.dst]) g2.edges.push_back({map2[e.src], e.weight, map2[e.dst], -1});
  auto r = discountedBestValue(g2, ctx.lambda, true);
  std::optional<Rational> best;
  for (int q : p.initials) {
    if (map[q] < 0 || !co[map[q]]) continue;
    Rational v = r.value[map2[map[q]]];
    if (!best || v > *best) best = v;
  }
  if (!best) return ExtValue::minusInf();
  return ExtValue(*best);
}

ExtValue limitEval(const QwaSpec& a, const LassoWord& w) {
  switch (a.f) {
    case RunAgg::Inf:
    case RunAgg::Sup:
      return evalLasso(toLimitRunAggregator(a), w);
    case RunAgg::LimInf:
    case RunAgg::LimSup: {
      auto weights = a.system.weightSet();
      bool wantSup = (a.g == WordAgg::LimSup);
      if (wantSup) std::reverse(weights.begin(), weights.end());
      for (const Rational& x : weights)
        if (infManyValueRunsStd(a, x, w)) return ExtValue(x);
      return wantSup ? ExtValue::minusInf() : ExtValue::plusInf();
    }
    case RunAgg::LimInfAvg:
    case RunAgg::LimSupAvg:
      return avgLimitEval(a, w);
    case RunAgg::DSum:
      return dsumLimitEval(a, w);
  }
  throw std::logic_error("limitEval: unreachable");
}

} // namespace

ExtValue evalLasso(const QwaSpec& a, const LassoWord& w) {
  requireValid(a);
  if (w.period.empty()) throw std::invalid_argument("evalLasso: empty period");
  switch (a.g) {
    case WordAgg::Sup: return supEval(a, w);
    case WordAgg::Inf: return -evalLasso(dualQwa(a), w);
    case WordAgg::E: return expEval(a, w);
    case WordAgg::LimSup:
    case WordAgg::LimInf: return limitEval(a, w);
  }
  throw std::logic_error("evalLasso: unreachable");
}

bool hasInfinitelyManyRuns(const QwaSpec& a0, const Rational& x, const LassoWord& w) {
  QwaSpec a = a0;
  if (a.f == RunAgg::Inf || a.f == RunAgg::Sup) a = toLimitRunAggregator(a);
  if (a.f != RunAgg::LimInf && a.f != RunAgg::LimSup)
    throw std::invalid_argument("hasInfinitelyManyRuns: standard run aggregator required");
  auto ws = a.system.weightSet();
  if (std::find(ws.begin(), ws.end(), x) == ws.end()) return false;
  return infManyValueRunsStd(a, x, w);
}

// ---------------------------------------------------------------------------
// Threshold automata
// ---------------------------------------------------------------------------

namespace {

BuchiAutomaton thresholdGeq(const Wlts& t, const Rational& x, bool strict, RunAgg f) {
  const int n = t.numStates();
  auto pass = [&](const Rational& w) { return strict ? w > x : w >= x; };
  BuchiAutomaton r;
  r.alphabet = t.alphabet;
  switch (f) {
    case RunAgg::Sup: {
      // Reach a passing transition once, then anything.
      r.numStates = n + 1;
      int acc = n;
      r.edges.assign(r.numStates, std::vector<std::vector<int>>(t.alphabet.size()));
      r.accepting.assign(r.numStates, false);
      r.accepting[acc] = true;
      for (int q = 0; q < n; ++q)
        for (int l = 0; l < t.alphabet.size(); ++l)
          for (const auto& e : t.edges[q][l]) {
            r.edges[q][l].push_back(pass(e.weight) ? acc : e.target);
            if (pass(e.weight) && !t.isDeterministic()) r.edges[q][l].push_back(e.target);
          }
      for (int l = 0; l < t.alphabet.size(); ++l) r.edges[acc][l].push_back(acc);
      r.initial = t.initialSupport();
      break;
    }
    case RunAgg::Inf: {
      // Only passing transitions, forever.
      r.numStates = n;
      r.edges.assign(n, std::vector<std::vector<int>>(t.alphabet.size()));
      r.accepting.assign(n, true);
      for (int q = 0; q < n; ++q)
        for (int l = 0; l < t.alphabet.size(); ++l)
          for (const auto& e : t.edges[q][l])
            if (pass(e.weight)) r.edges[q][l].push_back(e.target);
      r.initial = t.initialSupport();
      break;
    }
    case RunAgg::LimSup: {
      // Passing transitions infinitely often; the bit records the last edge.
      r.numStates = 2 * n;
      r.edges.assign(r.numStates, std::vector<std::vector<int>>(t.alphabet.size()));
      r.accepting.assign(r.numStates, false);
      for (int q = 0; q < n; ++q) {
        r.accepting[n + q] = true;
        for (int l = 0; l < t.alphabet.size(); ++l)
          for (const auto& e : t.edges[q][l]) {
            int dst = pass(e.weight) ? n + e.target : e.target;
            r.edges[q][l].push_back(dst);
            r.edges[n + q][l].push_back(dst);
          }
      }
      r.initial = t.initialSupport();
      break;
    }
    case RunAgg::LimInf: {
      // Eventually only passing transitions: guess the switch point.
      r.numStates = 2 * n;
      r.edges.assign(r.numStates, std::vector<std::vector<int>>(t.alphabet.size()));
      r.accepting.assign(r.numStates, false);
      for (int q = 0; q < n; ++q) {
        r.accepting[n + q] = true;
        for (int l = 0; l < t.alphabet.size(); ++l)
          for (const auto& e : t.edges[q][l]) {
            r.edges[q][l].push_back(e.target);
            if (pass(e.weight)) {
              r.edges[q][l].push_back(n + e.target);
              r.edges[n + q][l].push_back(n + e.target);
            }
          }
      }
      r.initial = t.initialSupport();
      break;
    }
    default:
      throw std::invalid_argument("thresholdAutomaton: standard run aggregator required");
  }
  return r;
}

} // namespace

BuchiAutomaton thresholdAutomaton(const QwaSpec& a, const Rational& x, ThresholdRel rel) {
  if (a.f == RunAgg::LimInfAvg || a.f == RunAgg::LimSupAvg || a.f == RunAgg::DSum)
    throw std::invalid_argument("thresholdAutomaton: standard run aggregator required");
  if (a.g != WordAgg::Sup && !a.system.isDeterministic())
    throw std::invalid_argument("thresholdAutomaton: word aggregator Sup required");
  if (rel == ThresholdRel::Eq) {
    QwaSpec spec = a;
    if (spec.f == RunAgg::Inf || spec.f == RunAgg::Sup) spec = toLimitRunAggregator(spec);
    auto ws = spec.system.weightSet();
    if (std::find(ws.begin(), ws.end(), x) == ws.end()) return emptyAutomaton(a.system.alphabet);
    return liveTrim(exactValueAutomaton(spec.f, spec.system, x));
  }
  return liveTrim(thresholdGeq(a.system, x, rel == ThresholdRel::Gt, a.f));
}

// ---------------------------------------------------------------------------
// Top and bottom values
// ---------------------------------------------------------------------------

namespace {

WeightedDigraph reachableSystemGraph(const Wlts& t) {
  const int n = t.numStates();
  std::vector<bool> seen(n, false);
  std::vector<int> stack;
  for (int q : t.initialSupport())
    if (!seen[q]) {
      seen[q] = true;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int l = 0; l < t.alphabet.size(); ++l)
      for (const auto& e : t.edges[q][l])
        if (!seen[e.target]) {
          seen[e.target] = true;
          stack.push_back(e.target);
        }
  }
  WeightedDigraph g;
  g.n = n;
  for (int q = 0; q < n; ++q) {
    if (!seen[q]) continue;
    for (int l = 0; l < t.alphabet.size(); ++l)
      for (const auto& e : t.edges[q][l]) g.edges.push_back({q, e.weight, e.target, -1});
  }
  return g;
}

} // namespace

EvalOutcome topValue(const QwaSpec& a) {
  requireValid(a);
  switch (a.g) {
    case WordAgg::E:
      return EvalOutcome::unsupported(UnsupportedReason::Undecidable, "extremes:prob");
    case WordAgg::Inf: {
      auto b = bottomValue(dualQwa(a));
      if (!b.isValue()) return b;
      return EvalOutcome::mkValue(-b.value);
    }
    case WordAgg::LimSup:
    case WordAgg::LimInf: {
      if (a.f == RunAgg::LimInfAvg || a.f == RunAgg::LimSupAvg || a.f == RunAgg::DSum)
        return EvalOutcome::unsupported(UnsupportedReason::OpenHard, "extremes:limit-word-agg");
      return topValue(lowerLimitWordAgg(a));
    }
    case WordAgg::Sup:
      break;
  }
  const Wlts& t = a.system;
  switch (a.f) {
    case RunAgg::Inf:
    case RunAgg::Sup:
    case RunAgg::LimInf:
    case RunAgg::LimSup: {
      auto ws = t.weightSet();
      for (auto it = ws.rbegin(); it != ws.rend(); ++it)
        if (!isEmpty(thresholdAutomaton(a, *it, ThresholdRel::Geq)).empty)
          return EvalOutcome::mkValue(ExtValue(*it));
      throw std::logic_error("topValue: complete system has no run");
    }
    case RunAgg::LimInfAvg:
    case RunAgg::LimSupAvg:
      return EvalOutcome::mkValue(maxMeanCycle(reachableSystemGraph(t)).value);
    case RunAgg::DSum: {
      auto g = reachableSystemGraph(t);
      // Restrict to reachable nodes (others have no out edges in g).
      std::vector<bool> hasOut(g.n, false);
      for (const auto& e : g.edges) hasOut[e.src] = true;
      WeightedDigraph g2;
      std::vector<int> map(g.n, -1);
      g2.n = 0;
      for (int v = 0; v < g.n; ++v)
        if (hasOut[v]) map[v] = g2.n++;
      for (const auto& e : g.edges) g2.edges.push_back({map[e.src], e.weight, map[e.dst], -1});
      auto r = discountedBestValue(g2, *a.lambda, true);
      std::optional<Rational> best;
      for (int q : t.initialSupport())
        if (!best || r.value[map[q]] > *best) best = r.value[map[q]];
      return EvalOutcome::mkValue(ExtValue(*best));
    }
  }
  throw std::logic_error("topValue: unreachable");
}

EvalOutcome bottomValue(const QwaSpec& a) {
  requireValid(a);
  switch (a.g) {
    case WordAgg::E:
      return EvalOutcome::unsupported(UnsupportedReason::Undecidable, "extremes:prob");
    case WordAgg::Inf: {
      auto tv = topValue(dualQwa(a));
      if (!tv.isValue()) return tv;
      return EvalOutcome::mkValue(-tv.value);
    }
    case WordAgg::LimSup:
    case WordAgg::LimInf: {
      if (a.f == RunAgg::LimInfAvg || a.f == RunAgg::LimSupAvg || a.f == RunAgg::DSum)
        return EvalOutcome::unsupported(UnsupportedReason::OpenHard, "extremes:limit-word-agg");
      return bottomValue(lowerLimitWordAgg(a));
    }
    case WordAgg::Sup:
      break;
  }
  const Wlts& t = a.system;
  switch (a.f) {
    case RunAgg::Inf:
    case RunAgg::Sup:
    case RunAgg::LimInf:
    case RunAgg::LimSup: {
      auto universal = universalAutomaton(t.alphabet);
      auto ws = t.weightSet();
      for (auto it = ws.rbegin(); it != ws.rend(); ++it)
        if (includes(universal, thresholdAutomaton(a, *it, ThresholdRel::Geq)).included)
          return EvalOutcome::mkValue(ExtValue(*it));
      throw std::logic_error("bottomValue: minimal threshold must be universal");
    }
    case RunAgg::LimInfAvg:
    case RunAgg::LimSupAvg: {
      if (!t.isDeterministic())
        return EvalOutcome::unsupported(UnsupportedReason::Undecidable, "bottom:avg");
      return EvalOutcome::mkValue(minMeanCycle(reachableSystemGraph(t)).value);
    }
    case RunAgg::DSum: {
      if (!t.isDeterministic())
        return EvalOutcome::unsupported(UnsupportedReason::OpenHard, "bottom:dsum");
      auto g = reachableSystemGraph(t);
      std::vector<bool> hasOut(g.n, false);
      for (const auto& e : g.edges) hasOut[e.src] = true;
      WeightedDigraph g2;
      std::vector<int> map(g.n, -1);
      g2.n = 0;
      for (int v = 0; v < g.n; ++v)
        if (hasOut[v]) map[v] = g2.n++;
      for (const auto& e : g.edges) g2.edges.push_back({map[e.src], e.weight, map[e.dst], -1});
      auto r = discountedBestValue(g2, *a.lambda, false);
      return EvalOutcome::mkValue(ExtValue(r.value[map[t.initialSupport()[0]]]));
    }
  }
  throw std::logic_error("bottomValue: unreachable");
}

// ---------------------------------------------------------------------------
// Aggregator conversions
// ---------------------------------------------------------------------------

QwaSpec toLimitRunAggregator(const QwaSpec& a) {
  requireValid(a);
  if (a.f != RunAgg::Inf && a.f != RunAgg::Sup)
    throw std::invalid_argument("toLimitRunAggregator: f must be Inf or Sup");
  bool isSup = a.f == RunAgg::Sup;
  const Wlts& t = a.system;
  auto ws = t.weightSet();
  const int k = static_cast<int>(ws.size());
  const int n = t.numStates();
  auto widx = [&](const Rational& w) {
    return static_cast<int>(std::lower_bound(ws.begin(), ws.end(), w) - ws.begin());
  };
  Wlts r;
  r.alphabet = t.alphabet;
  checkCap(static_cast<std::size_t>(n) * k, "toLimitRunAggregator");
  r.stateNames.reserve(static_cast<std::size_t>(n) * k);
  for (int q = 0; q < n; ++q)
    for (int wi = 0; wi < k; ++wi)
      r.stateNames.push_back(t.stateNames[q] + "@" + ws[wi].strShort());
  auto id = [&](int q, int wi) { return q * k + wi; };
  r.initial.assign(static_cast<std::size_t>(n) * k, Rational(0));
  int startIdx = isSup ? 0 : k - 1;  // identity of the running extremum
  for (int q = 0; q < n; ++q) r.initial[id(q, startIdx)] = t.initial[q];
  r.edges.assign(static_cast<std::size_t>(n) * k,
                 std::vector<std::vector<WltsEdge>>(t.alphabet.size()));
  for (int q = 0; q < n; ++q)
    for (int wi = 0; wi < k; ++wi)
      for (int l = 0; l < t.alphabet.size(); ++l)
        for (const auto& e : t.edges[q][l]) {
          int wi2 = isSup ? std::max(wi, widx(e.weight)) : std::min(wi, widx(e.weight));
          r.edges[id(q, wi)][l].push_back({ws[wi2], e.prob, id(e.target, wi2)});
        }
  QwaSpec out;
  out.g = a.g;
  out.f = isSup ? RunAgg::LimSup : RunAgg::LimInf;
  out.system = std::move(r);
  return out;
}

QwaSpec liftWordAggToLimit(const QwaSpec& a) {
  requireValid(a);
  if (a.g != WordAgg::Sup && a.g != WordAgg::Inf)
    throw std::invalid_argument("liftWordAggToLimit: g must be Sup or Inf");
  const Wlts& t = a.system;
  const int n = t.numStates();
  Wlts r;
  r.alphabet = t.alphabet;
  r.stateNames.reserve(2 * n);
  for (int q = 0; q < n; ++q) r.stateNames.push_back(t.stateNames[q] + "#1");
  for (int q = 0; q < n; ++q) r.stateNames.push_back(t.stateNames[q] + "#2");
  r.initial.assign(2 * n, Rational(0));
  for (int q = 0; q < n; ++q) r.initial[q] = t.initial[q];
  r.edges.assign(2 * n, std::vector<std::vector<WltsEdge>>(t.alphabet.size()));
  Rational half(1, 2);
  for (int q = 0; q < n; ++q)
    for (int l = 0; l < t.alphabet.size(); ++l)
      for (const auto& e : t.edges[q][l]) {
        r.edges[q][l].push_back({e.weight, e.prob * half, e.target});
        r.edges[q][l].push_back({e.weight, e.prob * half, n + e.target});
        r.edges[n + q][l].push_back({e.weight, e.prob, n + e.target});
      }
  QwaSpec out;
  out.g = a.g == WordAgg::Sup ? WordAgg::LimSup : WordAgg::LimInf;
  out.f = a.f;
  out.lambda = a.lambda;
  out.system = std::move(r);
  return out;
}

// ---------------------------------------------------------------------------
// infRunsAutomaton: accepts a lasso word iff it admits infinitely many runs
// of value x. Two synchronized tracks from a guessed anchor; every
// inter-tick window must contain a track divergence and an accepting visit.
// ---------------------------------------------------------------------------

BuchiAutomaton infRunsAutomaton(const QwaSpec& a0, const Rational& x) {
  requireValid(a0);
  QwaSpec a = a0;
  if (a.f == RunAgg::Inf || a.f == RunAgg::Sup) a = toLimitRunAggregator(a);
  if (a.f != RunAgg::LimInf && a.f != RunAgg::LimSup)
    throw std::invalid_argument("infRunsAutomaton: standard run aggregator required");
  auto ws = a.system.weightSet();
  if (std::find(ws.begin(), ws.end(), x) == ws.end())
    return emptyAutomaton(a0.system.alphabet);

  BuchiAutomaton b = liveTrim(exactValueAutomaton(a.f, a.system, x));
  if (isEmpty(b).empty) return emptyAutomaton(a0.system.alphabet);
  const int m = b.numStates;
  const int sz = b.alphabet.size();

  // State layout: phase-0 copies of b, then interned phase-1 tuples.
  // Phase-1 tuple: (anchor, s, t, div, acc) plus a tick flag.
  std::map<std::array<int, 6>, int> ids;
  std::vector<std::array<int, 6>> tuples;
  BuchiAutomaton r;
  r.alphabet = b.alphabet;
  r.numStates = m;
  r.edges.assign(m, std::vector<std::vector<int>>(sz));
  r.accepting.assign(m, false);
  r.initial = b.initial;

  auto intern = [&](int anchor, int s, int t, int div, int acc, int tick) {
    std::array<int, 6> key{anchor, s, t, div, acc, tick};
    auto it = ids.find(key);
    if (it != ids.end()) return std::make_pair(it->second, false);
    int id = r.numStates++;
    ids[key] = id;
    tuples.push_back(key);
    r.edges.emplace_back(sz);
    r.accepting.push_back(tick == 1);
    checkCap(r.numStates, "infRunsAutomaton");
    return std::make_pair(id, true);
  };

  std::vector<int> work;
  auto expandTuple = [&](int id, int anchor, int s, int t, int div, int acc) {
    for (int l = 0; l < sz; ++l) {
      for (int sd : b.edges[s][l])
        for (int td : b.edges[t][l]) {
          int div2 = div || !(s == t && sd == td);
          int acc2 = acc || (b.accepting[sd] ? 1 : 0);
          auto [nid, fresh] = intern(anchor, sd, td, div2, acc2, 0);
          if (fresh) work.push_back(nid);
          r.edges[id][l].push_back(nid);
          if (sd == anchor && td == anchor && div2 && acc2) {
            auto [tid, fresh2] = intern(anchor, anchor, anchor, 0, 0, 1);
            if (fresh2) work.push_back(tid);
            r.edges[id][l].push_back(tid);
          }
        }
    }
  };

  // Phase-0 transitions plus anchor entries.
  for (int q = 0; q < m; ++q)
    for (int l = 0; l < sz; ++l)
      for (int d : b.edges[q][l]) r.edges[q][l].push_back(d);
  for (int q = 0; q < m; ++q) {
    auto [eid, fresh] = intern(q, q, q, 0, 0, 0);
    if (fresh) work.push_back(eid);
    // Entering the two-track phase at q: redirect via an epsilon-free device:
    // phase-0 q gains all outgoing edges of the entry tuple.
  }
  while (!work.empty()) {
    int id = work.back();
    work.pop_back();
    auto [anchor, s, t, div, acc, tick] = tuples[static_cast<std::size_t>(id - m)];
    if (tick == 1)
      expandTuple(id, anchor, anchor, anchor, 0, 0);
    else
      expandTuple(id, anchor, s, t, div, acc);
  }
  // Anchor entry: from phase-0 state q, follow the entry tuple's edges.
  for (int q = 0; q < m; ++q) {
    int eid = ids[{q, q, q, 0, 0, 0}];
    for (int l = 0; l < sz; ++l)
      for (int d : r.edges[eid][l]) r.edges[q][l].push_back(d);
  }
  for (auto& per : r.edges)
    for (auto& v : per) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  return liveTrim(r);
}

// ---------------------------------------------------------------------------
// lowerLimitWordAgg (LimSup -> Sup, LimInf -> Inf)
// ---------------------------------------------------------------------------

namespace {

// Büchi automaton reweighted as a system: weight `hit` on edges entering
// accepting states, `miss` elsewhere; completed with a miss-weight sink.
void appendAutomatonAsComponent(Wlts& out, const BuchiAutomaton& aut, const Rational& hit,
                                const Rational& miss, int sink, std::vector<int>& initialStates,
                                const std::string& tag) {
  int base = out.numStates();
  for (int q = 0; q < aut.numStates; ++q) out.stateNames.push_back(tag + "_s" + std::to_string(q));
  out.initial.resize(out.numStates(), Rational(0));
  out.edges.resize(out.numStates(), std::vector<std::vector<WltsEdge>>(out.alphabet.size()));
  for (int q = 0; q < aut.numStates; ++q) {
    for (int l = 0; l < aut.alphabet.size(); ++l) {
      int lo = out.alphabet.index(aut.alphabet.name(l));
      auto& slot = out.edges[base + q][lo];
      for (int d : aut.edges[q][l]) slot.push_back({aut.accepting[d] ? hit : miss, Rational(0), base + d});
      if (slot.empty()) slot.push_back({miss, Rational(1), sink});
    }
  }
  for (int q : aut.initial) initialStates.push_back(base + q);
}

void uniformizeProbabilities(Wlts& t) {
  for (auto& perState : t.edges)
    for (auto& slot : perState) {
      if (slot.empty()) continue;
      Rational u(1, static_cast<long>(slot.size()));
      for (auto& e : slot) e.prob = u;
    }
}

} // namespace

QwaSpec lowerLimitWordAgg(const QwaSpec& a) {
  requireValid(a);
  if (a.g == WordAgg::LimInf) return dualQwa(lowerLimitWordAgg(dualQwa(a)));
  if (a.g != WordAgg::LimSup)
    throw std::invalid_argument("lowerLimitWordAgg: g must be LimSup or LimInf");
  QwaSpec spec = a;
  if (spec.f == RunAgg::Inf || spec.f == RunAgg::Sup) spec = toLimitRunAggregator(spec);
  if (spec.f != RunAgg::LimInf && spec.f != RunAgg::LimSup)
    throw std::invalid_argument("lowerLimitWordAgg: standard run aggregator required");

  auto ws = spec.system.weightSet();
  QwaSpec nondet = spec;
  nondet.g = WordAgg::Sup;

  // Weights realized by infinitely many runs on some word.
  std::vector<Rational> infinitary;
  for (const Rational& x : ws)
    if (hasInfinitelyAmbiguousWord(exactValueAutomaton(spec.f, spec.system, x)))
      infinitary.push_back(x);

  // Fallback constant: the largest infinitary weight below every word value,
  // or the nondeterministic bottom when the sweep finds none.
  std::optional<Rational> fallback;
  auto universal = universalAutomaton(spec.system.alphabet);
  for (auto it = infinitary.rbegin(); it != infinitary.rend(); ++it) {
    if (includes(universal, thresholdAutomaton(nondet, *it, ThresholdRel::Geq)).included) {
      fallback = *it;
      break;
    }
  }
  if (!fallback) {
    auto b = bottomValue(nondet);
    fallback = b.value.finite();
  }

  Wlts out;
  out.alphabet = spec.system.alphabet;
  out.stateNames.push_back("bot");
  out.initial = {Rational(0)};
  out.edges.assign(1, std::vector<std::vector<WltsEdge>>(out.alphabet.size()));
  for (int l = 0; l < out.alphabet.size(); ++l) out.edges[0][l].push_back({*fallback, Rational(1), 0});

  std::vector<int> initialStates;
  for (const Rational& x : ws) {
    BuchiAutomaton ix = infRunsAutomaton(spec, x);
    if (isEmpty(ix).empty) continue;
    appendAutomatonAsComponent(out, ix, x, *fallback, 0, initialStates,
                               "w" + x.strShort());
  }
  if (initialStates.empty()) initialStates.push_back(0);
  Rational u(1, static_cast<long>(initialStates.size()));
  for (int q : initialStates) out.initial[q] += u;
  uniformizeProbabilities(out);

  QwaSpec res;
  res.g = WordAgg::Sup;
  res.f = RunAgg::LimSup;
  res.system = std::move(out);
  return res;
}

} // namespace qlatk
