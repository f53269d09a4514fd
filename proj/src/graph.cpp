#include "qlatk/graph.hpp"

#include <algorithm>
#include <map>

namespace qlatk {

std::vector<std::vector<int>> WeightedDigraph::outIndex() const {
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) out[edges[i].src].push_back(i);
  return out;
}

namespace {

// Iterative Tarjan; components are emitted sinks-first (reverse topological).
struct TarjanState {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, low, stack;
  std::vector<bool> onStack;
  std::vector<std::vector<int>> comps;
  int counter = 0;

  explicit TarjanState(const std::vector<std::vector<int>>& a)
      : adj(a), index(a.size(), -1), low(a.size(), 0), onStack(a.size(), false) {}

  void run(int root) {
    struct Frame {
      int v;
      std::size_t child;
    };
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    onStack[root] = true;
    while (!frames.empty()) {
      auto& fr = frames.back();
      if (fr.child < adj[fr.v].size()) {
        int w = adj[fr.v][fr.child++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          onStack[w] = true;
          frames.push_back({w, 0});
        } else if (onStack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
      } else {
        int v = fr.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == index[v]) {
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            onStack[w] = false;
            comp.push_back(w);
            if (w == v) break;
          }
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
      }
    }
  }
};

std::vector<std::vector<int>> sccsOfAdj(int n, const std::vector<std::vector<int>>& adj) {
  TarjanState t(adj);
  for (int v = 0; v < n; ++v)
    if (t.index[v] < 0) t.run(v);
  return std::move(t.comps);
}

} // namespace

std::vector<std::vector<int>> sccs(const WeightedDigraph& g) {
  std::vector<std::vector<int>> adj(g.n);
  for (const auto& e : g.edges) adj[e.src].push_back(e.dst);
  return sccsOfAdj(g.n, adj);
}

bool sccIsTrivial(const WeightedDigraph& g, const std::vector<int>& scc) {
  if (scc.size() > 1) return false;
  for (const auto& e : g.edges)
    if (e.src == scc[0] && e.dst == scc[0]) return false;
  return true;
}

namespace {

// Karp's formula on one nontrivial SCC; returns the exact max cycle mean.
Rational karpValue(const WeightedDigraph& g, const std::vector<int>& comp,
                   const std::vector<std::vector<int>>& out) {
  int m = static_cast<int>(comp.size());
  std::vector<int> local(g.n, -1);
  for (int i = 0; i < m; ++i) local[comp[i]] = i;

  // d[k][v] = max weight of a k-edge walk from comp[0] to v inside the SCC.
  std::vector<std::vector<std::optional<Rational>>> d(
      m + 1, std::vector<std::optional<Rational>>(m));
  d[0][0] = Rational(0);
  for (int k = 1; k <= m; ++k) {
    for (int i = 0; i < m; ++i) {
      if (!d[k - 1][i]) continue;
      for (int ei : out[comp[i]]) {
        const auto& e = g.edges[ei];
        int j = local[e.dst];
        if (j < 0) continue;
        Rational cand = *d[k - 1][i] + e.weight;
        if (!d[k][j] || cand > *d[k][j]) d[k][j] = cand;
      }
    }
  }
  std::optional<Rational> best;
  for (int v = 0; v < m; ++v) {
    if (!d[m][v]) continue;
    std::optional<Rational> innerMin;
    for (int k = 0; k < m; ++k) {
      if (!d[k][v]) continue;
      Rational q = (*d[m][v] - *d[k][v]) / Rational(m - k);
      if (!innerMin || q < *innerMin) innerMin = q;
    }
    if (innerMin && (!best || *innerMin > *best)) best = innerMin;
  }
  // A nontrivial SCC always has m-edge walks from any source.
  return *best;
}

// Extracts a cycle of mean exactly `mean` inside the SCC: compute longest-walk
// potentials for the shifted weights (no positive cycles remain), then find a
// cycle among the tight edges. Every tight cycle has shifted weight zero.
std::vector<int> criticalCycle(const WeightedDigraph& g, const std::vector<int>& comp,
                               const std::vector<std::vector<int>>& out, const Rational& mean) {
  int m = static_cast<int>(comp.size());
  std::vector<int> local(g.n, -1);
  for (int i = 0; i < m; ++i) local[comp[i]] = i;

  std::vector<std::optional<Rational>> pot(m);
  pot[0] = Rational(0);
  for (int round = 0; round < m; ++round) {
    bool changed = false;
    for (int i = 0; i < m; ++i) {
      if (!pot[i]) continue;
      for (int ei : out[comp[i]]) {
        const auto& e = g.edges[ei];
        int j = local[e.dst];
        if (j < 0) continue;
        Rational cand = *pot[i] + e.weight - mean;
        if (!pot[j] || cand > *pot[j]) {
          pot[j] = cand;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  // Tight subgraph restricted to the SCC; smallest edge index first for
  // reproducible witnesses.
  std::vector<std::vector<int>> tight(m);
  for (int i = 0; i < m; ++i) {
    if (!pot[i]) continue;
    for (int ei : out[comp[i]]) {
      const auto& e = g.edges[ei];
      int j = local[e.dst];
      if (j < 0 || !pot[j]) continue;
      if (*pot[i] + e.weight - mean == *pot[j]) tight[i].push_back(ei);
    }
  }
  // DFS for a cycle in the tight subgraph.
  std::vector<int> state(m, 0);  // 0 unvisited, 1 on path, 2 done
  std::vector<int> viaEdge(m, -1), parent(m, -1);
  for (int start = 0; start < m; ++start) {
    if (state[start] != 0) continue;
    std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
    state[start] = 1;
    while (!stack.empty()) {
      auto& [i, child] = stack.back();
      if (child < tight[i].size()) {
        int ei = tight[i][child++];
        int j = local[g.edges[ei].dst];
        if (state[j] == 0) {
          state[j] = 1;
          parent[j] = i;
          viaEdge[j] = ei;
          stack.push_back({j, 0});
        } else if (state[j] == 1) {
          // Found a cycle j -> ... -> i -> j.
          std::vector<int> cyc{ei};
          int cur = i;
          while (cur != j) {
            cyc.push_back(viaEdge[cur]);
            cur = parent[cur];
          }
          std::reverse(cyc.begin(), cyc.end());
          return cyc;
        }
      } else {
        state[i] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

MeanCycleResult meanCycleImpl(const WeightedDigraph& g, bool maximize) {
  WeightedDigraph work = g;
  if (!maximize)
    for (auto& e : work.edges) e.weight = -e.weight;

  auto out = work.outIndex();
  auto comps = sccs(work);
  std::optional<Rational> best;
  std::vector<int> bestComp;
  for (const auto& comp : comps) {
    if (sccIsTrivial(work, comp)) continue;
    Rational v = karpValue(work, comp, out);
    if (!best || v > *best) {
      best = v;
      bestComp = comp;
    }
  }
  MeanCycleResult r;
  if (!best) {
    r.value = maximize ? ExtValue::minusInf() : ExtValue::plusInf();
    return r;
  }
  r.cycle = criticalCycle(work, bestComp, out, *best);
  r.value = ExtValue(maximize ? *best : -*best);
  return r;
}

} // namespace

MeanCycleResult maxMeanCycle(const WeightedDigraph& g) { return meanCycleImpl(g, true); }
MeanCycleResult minMeanCycle(const WeightedDigraph& g) { return meanCycleImpl(g, false); }

std::vector<Rational> solveLinear(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("solveLinear: matrix not square");
  if (b.size() != n) throw std::invalid_argument("solveLinear: dimension mismatch");
  if (n == 0) return {};

  for (std::size_t i = 0; i < n; ++i) a[i].push_back(b[i]);

  Rational divPrev(1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a[piv][k].isZero()) ++piv;
    if (piv == n) throw SingularMatrix();
    if (piv != k) std::swap(a[piv], a[k]);
    const Rational pivot = a[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j)
        a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) / divPrev;
      a[i][k] = Rational(0);
    }
    divPrev = pivot;
  }
  if (a[n - 1][n - 1].isZero()) throw SingularMatrix();

  std::vector<Rational> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Rational sum = a[ii][n];
    for (std::size_t j = ii + 1; j < n; ++j) sum -= a[ii][j] * x[j];
    x[ii] = sum / a[ii][ii];
  }
  return x;
}

DiscountedResult discountedBestValue(const WeightedDigraph& g, const Rational& lambda,
                                     bool maximize) {
  if (!(lambda > Rational(0) && lambda < Rational(1)))
    throw std::invalid_argument("discountedBestValue: lambda must lie in (0,1)");
  auto out = g.outIndex();
  for (int v = 0; v < g.n; ++v)
    if (out[v].empty())
      throw std::invalid_argument("discountedBestValue: node without outgoing edge");

  std::vector<int> policy(g.n);
  for (int v = 0; v < g.n; ++v) policy[v] = out[v][0];

  auto evaluate = [&](const std::vector<int>& pol) {
    // (I - lambda * P_pol) v = w_pol; strictly diagonally dominant.
    std::vector<std::vector<Rational>> mat(g.n, std::vector<Rational>(g.n, Rational(0)));
    std::vector<Rational> rhs(g.n);
    for (int v = 0; v < g.n; ++v) {
      const auto& e = g.edges[pol[v]];
      mat[v][v] += Rational(1);
      mat[v][e.dst] -= lambda;
      rhs[v] = e.weight;
    }
    return solveLinear(std::move(mat), std::move(rhs));
  };

  std::vector<Rational> value = evaluate(policy);
  while (true) {
    bool improved = false;
    for (int v = 0; v < g.n; ++v) {
      const auto& cur = g.edges[policy[v]];
      Rational curQ = cur.weight + lambda * value[cur.dst];
      int bestEdge = policy[v];
      Rational bestQ = curQ;
      for (int ei : out[v]) {
        const auto& e = g.edges[ei];
        Rational q = e.weight + lambda * value[e.dst];
        bool better = maximize ? q > bestQ : q < bestQ;
        if (better) {
          bestQ = q;
          bestEdge = ei;
        }
      }
      if (bestEdge != policy[v]) {
        policy[v] = bestEdge;
        improved = true;
      }
    }
    if (!improved) break;
    value = evaluate(policy);
  }
  return {std::move(value), std::move(policy)};
}

BsccResult bsccs(const MarkovChain& m) {
  int n = m.numStates();
  std::vector<std::vector<int>> adj(n);
  for (int q = 0; q < n; ++q)
    for (const auto& e : m.edges[q]) adj[q].push_back(e.target);
  auto comps = sccsOfAdj(n, adj);

  std::vector<int> compOf(n, -1);
  for (int c = 0; c < static_cast<int>(comps.size()); ++c)
    for (int v : comps[c]) compOf[v] = c;

  std::vector<bool> bottom(comps.size(), true);
  for (int q = 0; q < n; ++q)
    for (const auto& e : m.edges[q])
      if (compOf[e.target] != compOf[q]) bottom[compOf[q]] = false;

  BsccResult r;
  std::vector<int> bsccOf(n, -1);
  for (int c = 0; c < static_cast<int>(comps.size()); ++c) {
    if (!bottom[c]) continue;
    for (int v : comps[c]) bsccOf[v] = static_cast<int>(r.components.size());
    r.components.push_back(comps[c]);
  }

  std::vector<int> transient;
  std::vector<int> tIdx(n, -1);
  for (int q = 0; q < n; ++q)
    if (bsccOf[q] < 0) {
      tIdx[q] = static_cast<int>(transient.size());
      transient.push_back(q);
    }

  const int nt = static_cast<int>(transient.size());
  const int nb = static_cast<int>(r.components.size());
  r.reachProb.assign(nb, Rational(0));

  // Absorption probabilities: (I - P_TT) x_B = P_T->B * 1.
  std::vector<std::vector<std::vector<Rational>>> solutions;
  std::vector<std::vector<Rational>> xs(nb);
  if (nt > 0) {
    std::vector<std::vector<Rational>> base(nt, std::vector<Rational>(nt, Rational(0)));
    for (int i = 0; i < nt; ++i) {
      base[i][i] = Rational(1);
      for (const auto& e : m.edges[transient[i]])
        if (tIdx[e.target] >= 0) base[i][tIdx[e.target]] -= e.prob;
    }
    for (int b = 0; b < nb; ++b) {
      std::vector<Rational> rhs(nt, Rational(0));
      for (int i = 0; i < nt; ++i)
        for (const auto& e : m.edges[transient[i]])
          if (bsccOf[e.target] == b) rhs[i] += e.prob;
      xs[b] = solveLinear(base, rhs);
    }
  }
  for (int b = 0; b < nb; ++b) {
    for (int v : r.components[b]) r.reachProb[b] += m.initial[v];
    for (int i = 0; i < nt; ++i) r.reachProb[b] += m.initial[transient[i]] * xs[b][i];
  }
  return r;
}

Rational stationaryMean(const MarkovChain& m,
                        const std::function<Rational(int, const McEdge&)>& weightOf,
                        const std::vector<int>& bscc) {
  int k = static_cast<int>(bscc.size());
  std::vector<int> local(m.numStates(), -1);
  for (int i = 0; i < k; ++i) local[bscc[i]] = i;
  for (int v : bscc)
    for (const auto& e : m.edges[v])
      if (local[e.target] < 0)
        throw std::invalid_argument("stationaryMean: set is not closed under transitions");

  // pi (P - I) = 0 with sum(pi) = 1, written column-wise; the last balance
  // equation is redundant and replaced by the normalization.
  std::vector<std::vector<Rational>> mat(k, std::vector<Rational>(k, Rational(0)));
  std::vector<Rational> rhs(k, Rational(0));
  for (int i = 0; i < k; ++i) {
    mat[i][i] -= Rational(1);
    // column i: sum_j pi_j P(j,i)
  }
  for (int j = 0; j < k; ++j)
    for (const auto& e : m.edges[bscc[j]]) mat[local[e.target]][j] += e.prob;
  for (int j = 0; j < k; ++j) mat[k - 1][j] = Rational(1);
  rhs[k - 1] = Rational(1);

  auto pi = solveLinear(std::move(mat), std::move(rhs));
  Rational mean;
  for (int j = 0; j < k; ++j)
    for (const auto& e : m.edges[bscc[j]]) mean += pi[j] * e.prob * weightOf(bscc[j], e);
  return mean;
}

} // namespace qlatk
