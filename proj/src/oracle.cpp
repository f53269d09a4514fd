#include "qlatk/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace qlatk {
namespace oracle {

namespace {

// --- own tiny exact linear solver (plain Gaussian elimination) ---

std::vector<Rational> gauss(std::vector<std::vector<Rational>> m, std::vector<Rational> b) {
  const std::size_t n = m.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c].isZero()) ++p;
    if (p == n) throw std::runtime_error("oracle: singular system");
    std::swap(m[p], m[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c].isZero()) continue;
      Rational f = m[r][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
      b[r] -= f * b[c];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
  return x;
}

// --- product of the system with the lasso word ---

struct Prod {
  int n = 0, L = 0, pref = 0;
  struct E {
    int src, dst;
    Rational w, p;
  };
  std::vector<E> es;
  std::vector<std::vector<int>> out;
  std::vector<int> inits;
  std::vector<Rational> initP;
};

Prod build(const Wlts& t, const LassoWord& w) {
  Prod p;
  p.pref = static_cast<int>(w.prefix.size());
  p.L = p.pref + static_cast<int>(w.period.size());
  p.n = t.numStates() * p.L;
  p.out.assign(p.n, {});
  p.initP.assign(p.n, Rational(0));
  for (int q = 0; q < t.numStates(); ++q)
    for (int pos = 0; pos < p.L; ++pos) {
      const std::string& s = pos < p.pref ? w.prefix[pos] : w.period[pos - p.pref];
      int l = t.alphabet.index(s);
      if (l < 0) throw std::invalid_argument("bruteEvalLasso: unknown letter " + s);
      int next = pos + 1 < p.L ? pos + 1 : p.pref;
      for (const auto& e : t.edges[q][l]) {
        p.out[q * p.L + pos].push_back(static_cast<int>(p.es.size()));
        p.es.push_back({q * p.L + pos, e.target * p.L + next, e.weight, e.prob});
      }
    }
  for (int q = 0; q < t.numStates(); ++q)
    if (!t.initial[q].isZero()) {
      p.inits.push_back(q * p.L);
      p.initP[q * p.L] = t.initial[q];
    }
  return p;
}

std::vector<bool> reachOf(const Prod& p) {
  std::vector<bool> r(p.n, false);
  std::vector<int> st(p.inits.begin(), p.inits.end());
  for (int v : st) r[v] = true;
  while (!st.empty()) {
    int v = st.back();
    st.pop_back();
    for (int ei : p.out[v])
      if (!r[p.es[ei].dst]) {
        r[p.es[ei].dst] = true;
        st.push_back(p.es[ei].dst);
      }
  }
  return r;
}

// All simple paths (edge sequences, possibly empty) from `from`.
void simplePathsFrom(const Prod& p, int from,
                     const std::function<void(const std::vector<int>&, int)>& visit) {
  std::vector<int> cur;
  std::vector<bool> onPath(p.n, false);
  std::function<void(int)> rec = [&](int node) {
    visit(cur, node);
    for (int ei : p.out[node]) {
      int d = p.es[ei].dst;
      if (onPath[d]) continue;
      onPath[d] = true;
      cur.push_back(ei);
      rec(d);
      cur.pop_back();
      onPath[d] = false;
    }
  };
  onPath[from] = true;
  rec(from);
}

// All simple cycles (edge sequences) through `node`.
void simpleCyclesAt(const Prod& p, int node,
                    const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> cur;
  std::vector<bool> onPath(p.n, false);
  std::function<void(int)> rec = [&](int at) {
    for (int ei : p.out[at]) {
      int d = p.es[ei].dst;
      if (d == node) {
        cur.push_back(ei);
        visit(cur);
        cur.pop_back();
        continue;
      }
      if (onPath[d]) continue;
      onPath[d] = true;
      cur.push_back(ei);
      rec(d);
      cur.pop_back();
      onPath[d] = false;
    }
  };
  onPath[node] = true;
  rec(node);
}

// --- closed-form value of a lasso run stem.cycle^ω ---

ExtValue lassoRunValue(const Prod& p, RunAgg f, const std::optional<Rational>& lambda,
                       const std::vector<int>& stem, const std::vector<int>& cyc) {
  auto wOf = [&](int ei) { return p.es[ei].w; };
  switch (f) {
    case RunAgg::Sup: {
      std::optional<Rational> m;
      for (int ei : stem)
        if (!m || wOf(ei) > *m) m = wOf(ei);
      for (int ei : cyc)
        if (!m || wOf(ei) > *m) m = wOf(ei);
      return ExtValue(*m);
    }
    case RunAgg::Inf: {
      std::optional<Rational> m;
      for (int ei : stem)
        if (!m || wOf(ei) < *m) m = wOf(ei);
      for (int ei : cyc)
        if (!m || wOf(ei) < *m) m = wOf(ei);
      return ExtValue(*m);
    }
    case RunAgg::LimSup: {
      std::optional<Rational> m;
      for (int ei : cyc)
        if (!m || wOf(ei) > *m) m = wOf(ei);
      return ExtValue(*m);
    }
    case RunAgg::LimInf: {
      std::optional<Rational> m;
      for (int ei : cyc)
        if (!m || wOf(ei) < *m) m = wOf(ei);
      return ExtValue(*m);
    }
    case RunAgg::LimInfAvg:
    case RunAgg::LimSupAvg: {
      Rational s;
      for (int ei : cyc) s += wOf(ei);
      return ExtValue(s / Rational(static_cast<long>(cyc.size())));
    }
    case RunAgg::DSum: {
      const Rational& lam = *lambda;
      Rational acc, pw(1);
      for (int ei : stem) {
        acc += pw * wOf(ei);
        pw *= lam;
      }
      Rational cs, cw(1);
      for (int ei : cyc) {
        cs += cw * wOf(ei);
        cw *= lam;
      }
      Rational denom = Rational(1) - lam.pow(static_cast<unsigned long>(cyc.size()));
      return ExtValue(acc + pw * (cs / denom));
    }
  }
  throw std::logic_error("lassoRunValue");
}

// --- g in {Sup, Inf}: optimum over simple-stem simple-cycle runs ---

ExtValue extremalEval(const QwaSpec& a, const Prod& p, bool maximize) {
  std::optional<ExtValue> best;
  for (int v0 : p.inits)
    simplePathsFrom(p, v0, [&](const std::vector<int>& stem, int node) {
      simpleCyclesAt(p, node, [&](const std::vector<int>& cyc) {
        ExtValue val = lassoRunValue(p, a.f, a.lambda, stem, cyc);
        if (!best || (maximize ? val > *best : val < *best)) best = val;
      });
    });
  return *best;
}

// --- g = E: exact distribution analysis with own solver ---

std::vector<std::vector<int>> kosaraju(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<std::vector<int>> radj(n);
  for (int v = 0; v < n; ++v)
    for (int d : adj[v]) radj[d].push_back(v);
  std::vector<bool> seen(n, false);
  std::vector<int> order;
  std::function<void(int)> dfs1 = [&](int v) {
    seen[v] = true;
    for (int d : adj[v])
      if (!seen[d]) dfs1(d);
    order.push_back(v);
  };
  for (int v = 0; v < n; ++v)
    if (!seen[v]) dfs1(v);
  std::vector<int> comp(n, -1);
  int c = 0;
  std::function<void(int)> dfs2 = [&](int v) {
    comp[v] = c;
    for (int d : radj[v])
      if (comp[d] < 0) dfs2(d);
  };
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (comp[*it] < 0) {
      dfs2(*it);
      ++c;
    }
  std::vector<std::vector<int>> comps(c);
  for (int v = 0; v < n; ++v) comps[comp[v]].push_back(v);
  return comps;
}

ExtValue expectedEval(const QwaSpec& a, const Prod& p) {
  auto reach = reachOf(p);
  std::vector<int> map(p.n, -1), inv;
  for (int v = 0; v < p.n; ++v)
    if (reach[v]) {
      map[v] = static_cast<int>(inv.size());
      inv.push_back(v);
    }
  const int n = static_cast<int>(inv.size());
  std::vector<std::vector<std::tuple<Rational, Rational, int>>> edges(n);
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : p.es)
    if (reach[e.src]) {
      edges[map[e.src]].push_back({e.p, e.w, map[e.dst]});
      adj[map[e.src]].push_back(map[e.dst]);
    }
  std::vector<Rational> init(n);
  for (int v = 0; v < p.n; ++v)
    if (reach[v]) init[map[v]] = p.initP[v];

  if (a.f == RunAgg::DSum) {
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, Rational(0)));
    std::vector<Rational> b(n, Rational(0));
    for (int v = 0; v < n; ++v) {
      m[v][v] += Rational(1);
      for (auto& [pr, w, d] : edges[v]) {
        m[v][d] -= *a.lambda * pr;
        b[v] += pr * w;
      }
    }
    auto x = gauss(std::move(m), std::move(b));
    Rational r;
    for (int v = 0; v < n; ++v) r += init[v] * x[v];
    return ExtValue(r);
  }

  auto comps = kosaraju(n, adj);
  std::vector<int> compOf(n, -1);
  for (int c = 0; c < static_cast<int>(comps.size()); ++c)
    for (int v : comps[c]) compOf[v] = c;
  std::vector<bool> bottom(comps.size(), true);
  for (int v = 0; v < n; ++v)
    for (int d : adj[v])
      if (compOf[d] != compOf[v]) bottom[compOf[v]] = false;
  std::vector<std::vector<int>> bsccList;
  std::vector<int> bsccOf(n, -1);
  for (int c = 0; c < static_cast<int>(comps.size()); ++c)
    if (bottom[c]) {
      for (int v : comps[c]) bsccOf[v] = static_cast<int>(bsccList.size());
      bsccList.push_back(comps[c]);
    }
  std::vector<int> tIdx(n, -1), ts;
  for (int v = 0; v < n; ++v)
    if (bsccOf[v] < 0) {
      tIdx[v] = static_cast<int>(ts.size());
      ts.push_back(v);
    }
  auto absorbProb = [&](const std::vector<bool>& inTarget) {
    std::vector<Rational> r(n, Rational(0));
    for (int v = 0; v < n; ++v)
      if (inTarget[v]) r[v] = Rational(1);
    if (!ts.empty()) {
      std::vector<std::vector<Rational>> m(ts.size(),
                                           std::vector<Rational>(ts.size(), Rational(0)));
      std::vector<Rational> b(ts.size(), Rational(0));
      for (std::size_t i = 0; i < ts.size(); ++i) {
        m[i][i] += Rational(1);
        for (auto& [pr, w, d] : edges[ts[i]]) {
          if (tIdx[d] >= 0)
            m[i][tIdx[d]] -= pr;
          else if (inTarget[d])
            b[i] += pr;
        }
      }
      auto x = gauss(std::move(m), std::move(b));
      for (std::size_t i = 0; i < ts.size(); ++i) r[ts[i]] = x[i];
    }
    Rational total;
    for (int v = 0; v < n; ++v) total += init[v] * r[v];
    return total;
  };

  if (a.f == RunAgg::LimInfAvg || a.f == RunAgg::LimSupAvg) {
    Rational total;
    for (const auto& comp : bsccList) {
      std::vector<bool> inb(n, false);
      for (int v : comp) inb[v] = true;
      Rational reachP = absorbProb(inb);
      if (reachP.isZero()) continue;
      const int k = static_cast<int>(comp.size());
      std::vector<int> loc(n, -1);
      for (int i = 0; i < k; ++i) loc[comp[i]] = i;
      std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k, Rational(0)));
      std::vector<Rational> b(k, Rational(0));
      for (int i = 0; i < k; ++i) m[i][i] -= Rational(1);
      for (int j = 0; j < k; ++j)
        for (auto& [pr, w, d] : edges[comp[j]]) m[loc[d]][j] += pr;
      for (int j = 0; j < k; ++j) m[k - 1][j] = Rational(1);
      b[k - 1] = Rational(1);
      auto pi = gauss(std::move(m), std::move(b));
      Rational mean;
      for (int j = 0; j < k; ++j)
        for (auto& [pr, w, d] : edges[comp[j]]) mean += pi[j] * pr * w;
      total += reachP * mean;
    }
    return ExtValue(total);
  }

  std::vector<Rational> ws;
  for (int v = 0; v < n; ++v)
    for (auto& [pr, w, d] : edges[v]) ws.push_back(w);
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  const int k = static_cast<int>(ws.size());
  std::vector<Rational> pGeq(k);

  for (int i = 0; i < k; ++i) {
    const Rational& x = ws[i];
    if (a.f == RunAgg::Sup || a.f == RunAgg::Inf) {
      auto hot = [&](const Rational& w) { return a.f == RunAgg::Sup ? w >= x : w < x; };
      std::vector<bool> canHot(n, false);
      {
        std::vector<std::vector<int>> radj(n);
        std::vector<int> st;
        for (int v = 0; v < n; ++v)
          for (auto& [pr, w, d] : edges[v]) {
            radj[d].push_back(v);
            if (hot(w) && !canHot[v]) {
              canHot[v] = true;
              st.push_back(v);
            }
          }
        while (!st.empty()) {
          int v = st.back();
          st.pop_back();
          for (int u : radj[v])
            if (!canHot[u]) {
              canHot[u] = true;
              st.push_back(u);
            }
        }
      }
      std::vector<int> t2idx(n, -1), t2;
      for (int v = 0; v < n; ++v)
        if (canHot[v]) {
          t2idx[v] = static_cast<int>(t2.size());
          t2.push_back(v);
        }
      Rational cross;
      if (!t2.empty()) {
        std::vector<std::vector<Rational>> m(t2.size(),
                                             std::vector<Rational>(t2.size(), Rational(0)));
        std::vector<Rational> b(t2.size(), Rational(0));
        for (std::size_t ii = 0; ii < t2.size(); ++ii) {
          m[ii][ii] += Rational(1);
          for (auto& [pr, w, d] : edges[t2[ii]]) {
            if (hot(w))
              b[ii] += pr;
            else if (t2idx[d] >= 0)
              m[ii][t2idx[d]] -= pr;
          }
        }
        auto x2 = gauss(std::move(m), std::move(b));
        for (std::size_t ii = 0; ii < t2.size(); ++ii)
          if (!init[t2[ii]].isZero()) cross += init[t2[ii]] * x2[ii];
      }
      pGeq[i] = a.f == RunAgg::Sup ? cross : Rational(1) - cross;
    } else {
      std::vector<bool> target(n, false);
      for (const auto& comp : bsccList) {
        bool any = false, all = true;
        for (int v : comp)
          for (auto& [pr, w, d] : edges[v]) {
            any = any || (w >= x);
            all = all && (w >= x);
          }
        bool take = a.f == RunAgg::LimSup ? any : all;
        if (take)
          for (int v : comp) target[v] = true;
      }
      pGeq[i] = absorbProb(target);
    }
  }
  Rational total;
  for (int i = 0; i < k; ++i) {
    Rational nxt = i + 1 < k ? pGeq[i + 1] : Rational(0);
    total += ws[i] * (pGeq[i] - nxt);
  }
  return ExtValue(total);
}

// --- g in {LimSup, LimInf}: values of infinite multiplicity ---

bool streamsDiffer(const std::vector<int>& cyc, const std::vector<int>& d,
                   const std::vector<int>& e) {
  std::size_t bound = d.size() + cyc.size() * e.size() + cyc.size() + e.size() + 2;
  for (std::size_t i = 0; i < bound; ++i) {
    int lhs = cyc[i % cyc.size()];
    int rhs = i < d.size() ? d[i] : e[(i - d.size()) % e.size()];
    if (lhs != rhs) return true;
  }
  return false;
}

ExtValue limitEvalOracle(const QwaSpec& a, const Prod& p) {
  const bool wantSup = a.g == WordAgg::LimSup;
  const bool isDsum = a.f == RunAgg::DSum;
  const bool prefixSensitive = (a.f == RunAgg::Inf || a.f == RunAgg::Sup);
  auto reach = reachOf(p);

  // Per node: simple cycles, then simple tails (path + cycle).
  struct Tail {
    std::vector<int> d, e;
  };
  std::vector<std::vector<std::vector<int>>> cyclesAt(p.n);
  std::vector<std::vector<Tail>> tailsAt(p.n);
  for (int v = 0; v < p.n; ++v)
    if (reach[v])
      simpleCyclesAt(p, v, [&](const std::vector<int>& c) { cyclesAt[v].push_back(c); });
  for (int v = 0; v < p.n; ++v) {
    if (!reach[v]) continue;
    simplePathsFrom(p, v, [&](const std::vector<int>& d, int end) {
      for (const auto& e : cyclesAt[end]) tailsAt[v].push_back({d, e});
    });
  }

  std::vector<ExtValue> found;
  std::set<int> anchorNodes;                    // dsum: nodes carrying a valid anchor
  std::map<int, std::set<std::string>> validY;  // dsum: validated fixpoints per node

  for (int nu = 0; nu < p.n; ++nu) {
    if (!reach[nu] || cyclesAt[nu].empty()) continue;
    for (const auto& cyc : cyclesAt[nu]) {
      for (const auto& tail : tailsAt[nu]) {
        if (!streamsDiffer(cyc, tail.d, tail.e)) continue;
        if (isDsum) {
          const Rational& lam = *a.lambda;
          Rational cs, cw(1);
          for (int ei : cyc) {
            cs += cw * p.es[ei].w;
            cw *= lam;
          }
          Rational y = cs / (Rational(1) - lam.pow(static_cast<unsigned long>(cyc.size())));
          ExtValue tv = lassoRunValue(p, a.f, a.lambda, tail.d, tail.e);
          if (!(tv == ExtValue(y))) continue;
          anchorNodes.insert(nu);
          validY[nu].insert(y.str());
          // Cash values for every simple stem reaching nu are added below.
        } else if (prefixSensitive) {
          // The pump cycle must not disturb the running extremum; combine
          // with every stem below.
          ExtValue tv = lassoRunValue(p, a.f, a.lambda, tail.d, tail.e);
          bool cycleOk = true;
          for (int ei : cyc) {
            if (a.f == RunAgg::Sup && ExtValue(p.es[ei].w) > tv) cycleOk = false;
            if (a.f == RunAgg::Inf && ExtValue(p.es[ei].w) < tv) cycleOk = false;
          }
          if (!cycleOk) continue;
          // Stems adjust the extremum; enumerate them.
          for (int v0 : p.inits)
            simplePathsFrom(p, v0, [&](const std::vector<int>& stem, int end) {
              if (end != nu) return;
              std::vector<int> whole = stem;
              whole.insert(whole.end(), tail.d.begin(), tail.d.end());
              ExtValue v = lassoRunValue(p, a.f, a.lambda, whole, tail.e);
              // The cycle must still not beat the extremum.
              bool ok = true;
              for (int ei : cyc) {
                if (a.f == RunAgg::Sup && ExtValue(p.es[ei].w) > v) ok = false;
                if (a.f == RunAgg::Inf && ExtValue(p.es[ei].w) < v) ok = false;
              }
              if (ok) found.push_back(v);
            });
        } else {
          found.push_back(lassoRunValue(p, a.f, a.lambda, tail.d, tail.e));
        }
      }
    }
  }

  if (isDsum && !anchorNodes.empty()) {
    const Rational& lam = *a.lambda;
    // Which nodes can reach an anchor.
    std::vector<bool> co(p.n, false);
    {
      std::vector<std::vector<int>> radj(p.n);
      for (const auto& e : p.es) radj[e.dst].push_back(e.src);
      std::vector<int> st;
      for (int v : anchorNodes) {
        co[v] = true;
        st.push_back(v);
      }
      while (!st.empty()) {
        int v = st.back();
        st.pop_back();
        for (int u : radj[v])
          if (!co[u]) {
            co[u] = true;
            st.push_back(u);
          }
      }
    }
    for (int v0 : p.inits)
      simplePathsFrom(p, v0, [&](const std::vector<int>& stem, int end) {
        // Cash out at a validated anchor at the stem's end.
        if (anchorNodes.count(end)) {
          Rational acc, pw(1);
          for (int ei : stem) {
            acc += pw * p.es[ei].w;
            pw *= lam;
          }
          for (const std::string& ys : validY[end])
            found.push_back(ExtValue(acc + pw * Rational::parse(ys)));
        }
        // Non-cashing limits: lasso runs whose loop stays able to reach an
        // anchor contribute their plain value to the closure.
        if (co[end])
          for (const auto& cyc : cyclesAt[end])
            found.push_back(lassoRunValue(p, a.f, a.lambda, stem, cyc));
      });
  }

  if (found.empty()) return wantSup ? ExtValue::minusInf() : ExtValue::plusInf();
  ExtValue best = found.front();
  for (const auto& v : found) best = wantSup ? maxValue(best, v) : minValue(best, v);
  return best;
}

} // namespace

ExtValue bruteEvalLasso(const QwaSpec& a, const LassoWord& w) {
  {
    auto viol = validate(a);
    if (!viol.empty()) throw std::invalid_argument("bruteEvalLasso: invalid QWA");
  }
  if (a.system.numStates() > 6 || w.prefix.size() + w.period.size() > 8)
    throw std::invalid_argument("bruteEvalLasso: input beyond oracle caps");
  Prod p = build(a.system, w);
  switch (a.g) {
    case WordAgg::Sup: return extremalEval(a, p, true);
    case WordAgg::Inf: return extremalEval(a, p, false);
    case WordAgg::E: return expectedEval(a, p);
    case WordAgg::LimSup:
    case WordAgg::LimInf: return limitEvalOracle(a, p);
  }
  throw std::logic_error("bruteEvalLasso");
}

std::vector<std::vector<std::string>> sampleMarkov(const MarkovChain& mc, int n, int horizon,
                                                   std::uint64_t seed) {
  if (n < 1 || horizon < 1) throw std::invalid_argument("sampleMarkov: n and horizon must be >= 1");
  std::mt19937_64 rng(seed);
  auto draw = [&](const std::vector<Rational>& cdf) {
    std::uint64_t r = rng();
    mpz_class rz(static_cast<unsigned long>(r >> 32));
    rz <<= 32;
    rz += mpz_class(static_cast<unsigned long>(r & 0xffffffffULL));
    mpz_class scale(1);
    scale <<= 64;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
      // r / 2^64 < cdf[i]  <=>  r * den < num * 2^64
      mpz_class lhs = rz * cdf[i].denominator();
      mpz_class rhs = cdf[i].numerator() * scale;
      if (lhs < rhs) return static_cast<int>(i);
    }
    return static_cast<int>(cdf.size() - 1);
  };

  std::vector<Rational> initCdf;
  {
    Rational acc;
    for (const auto& p : mc.initial) {
      acc += p;
      initCdf.push_back(acc);
    }
  }
  std::vector<std::vector<Rational>> edgeCdf(mc.numStates());
  for (int q = 0; q < mc.numStates(); ++q) {
    Rational acc;
    for (const auto& e : mc.edges[q]) {
      acc += e.prob;
      edgeCdf[q].push_back(acc);
    }
  }

  std::vector<std::vector<std::string>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> word;
    word.reserve(horizon);
    int q = draw(initCdf);
    for (int s = 0; s < horizon; ++s) {
      int ei = draw(edgeCdf[q]);
      const auto& e = mc.edges[q][ei];
      word.push_back(mc.alphabet.name(e.letter));
      q = e.target;
    }
    out.push_back(std::move(word));
  }
  return out;
}

} // namespace oracle
} // namespace qlatk
