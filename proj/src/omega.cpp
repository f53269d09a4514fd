#include "qlatk/omega.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace qlatk {

namespace {

std::vector<bool> reachableStates(const BuchiAutomaton& a) {
  std::vector<bool> seen(a.numStates, false);
  std::vector<int> stack;
  for (int q : a.initial)
    if (!seen[q]) {
      seen[q] = true;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[q][l])
        if (!seen[d]) {
          seen[d] = true;
          stack.push_back(d);
        }
  }
  return seen;
}

std::vector<std::vector<int>> sccsOfBuchi(const BuchiAutomaton& a,
                                          const std::vector<bool>* restrictTo = nullptr) {
  // Plain iterative Tarjan over the automaton graph.
  int n = a.numStates;
  std::vector<std::vector<int>> adj(n);
  for (int q = 0; q < n; ++q) {
    if (restrictTo && !(*restrictTo)[q]) continue;
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[q][l]) {
        if (restrictTo && !(*restrictTo)[d]) continue;
        adj[q].push_back(d);
      }
  }
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> onStack(n, false);
  std::vector<std::vector<int>> comps;
  int counter = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    if (restrictTo && !(*restrictTo)[root]) continue;
    std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    onStack[root] = true;
    while (!frames.empty()) {
      auto& [v, child] = frames.back();
      if (child < adj[v].size()) {
        int w = adj[v][child++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
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
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            onStack[w] = false;
            comp.push_back(w);
            if (w == v2) break;
          }
          comps.push_back(std::move(comp));
        }
      }
    }
  }
  return comps;
}

bool hasInternalEdge(const BuchiAutomaton& a, const std::vector<int>& comp) {
  std::vector<bool> in(a.numStates, false);
  for (int v : comp) in[v] = true;
  for (int v : comp)
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[v][l])
        if (in[d]) return true;
  return false;
}

// States from which some accepting run exists (mode-aware).
std::vector<bool> liveStates(const BuchiAutomaton& a) {
  int n = a.numStates;
  std::vector<bool> core(n, false);
  if (a.mode == AcceptanceMode::Buchi) {
    for (const auto& comp : sccsOfBuchi(a)) {
      if (!hasInternalEdge(a, comp)) continue;
      bool acc = false;
      for (int v : comp) acc = acc || a.accepting[v];
      if (acc)
        for (int v : comp) core[v] = true;
    }
  } else {
    // Co-Büchi: a cycle entirely within the accepting ("safe") set.
    std::vector<bool> safe = a.accepting;
    std::vector<bool> dummy(n, false);
    std::vector<std::vector<int>> adj(n);
    for (int q = 0; q < n; ++q) {
      if (!safe[q]) continue;
      for (int l = 0; l < a.alphabet.size(); ++l)
        for (int d : a.edges[q][l])
          if (safe[d]) adj[q].push_back(d);
    }
    std::vector<bool> mask = safe;
    for (const auto& comp : sccsOfBuchi(a, &mask)) {
      bool internal = false;
      std::vector<bool> in(n, false);
      for (int v : comp) in[v] = true;
      for (int v : comp)
        for (int l = 0; l < a.alphabet.size(); ++l)
          for (int d : a.edges[v][l])
            if (in[d] && safe[v] && safe[d]) internal = true;
      if (internal)
        for (int v : comp) core[v] = true;
    }
  }
  // Backward closure: states that can reach a core state.
  std::vector<std::vector<int>> radj(n);
  for (int q = 0; q < n; ++q)
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[q][l]) radj[d].push_back(q);
  std::vector<bool> live = core;
  std::vector<int> stack;
  for (int q = 0; q < n; ++q)
    if (live[q]) stack.push_back(q);
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : radj[q])
      if (!live[p]) {
        live[p] = true;
        stack.push_back(p);
      }
  }
  return live;
}

BuchiAutomaton restrictTo(const BuchiAutomaton& a, const std::vector<bool>& keep) {
  BuchiAutomaton r;
  r.alphabet = a.alphabet;
  r.mode = a.mode;
  std::vector<int> map(a.numStates, -1);
  for (int q = 0; q < a.numStates; ++q)
    if (keep[q]) {
      map[q] = r.numStates++;
    }
  r.edges.assign(r.numStates, std::vector<std::vector<int>>(a.alphabet.size()));
  r.accepting.assign(r.numStates, false);
  for (int q = 0; q < a.numStates; ++q) {
    if (map[q] < 0) continue;
    r.accepting[map[q]] = a.accepting[q];
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[q][l])
        if (map[d] >= 0) r.edges[map[q]][l].push_back(map[d]);
  }
  for (int q : a.initial)
    if (map[q] >= 0) r.initial.push_back(map[q]);
  return r;
}

} // namespace

BuchiAutomaton universalAutomaton(const Alphabet& sigma) {
  BuchiAutomaton a;
  a.alphabet = sigma;
  a.numStates = 1;
  a.initial = {0};
  a.edges.assign(1, std::vector<std::vector<int>>(sigma.size()));
  for (int l = 0; l < sigma.size(); ++l) a.edges[0][l].push_back(0);
  a.accepting = {true};
  return a;
}

BuchiAutomaton emptyAutomaton(const Alphabet& sigma) {
  BuchiAutomaton a = universalAutomaton(sigma);
  a.accepting = {false};
  return a;
}

BuchiAutomaton lassoAutomaton(const Alphabet& sigma, const LassoWord& w) {
  int L = static_cast<int>(w.prefix.size() + w.period.size());
  BuchiAutomaton a;
  a.alphabet = sigma;
  a.numStates = L;
  a.initial = {0};
  a.edges.assign(L, std::vector<std::vector<int>>(sigma.size()));
  a.accepting.assign(L, true);
  auto letterAt = [&](int pos) {
    const std::string& s = pos < static_cast<int>(w.prefix.size())
                               ? w.prefix[pos]
                               : w.period[pos - w.prefix.size()];
    int l = sigma.index(s);
    if (l < 0) throw std::invalid_argument("lassoAutomaton: unknown letter " + s);
    return l;
  };
  for (int pos = 0; pos < L; ++pos) {
    int next = pos + 1 < L ? pos + 1 : static_cast<int>(w.prefix.size());
    a.edges[pos][letterAt(pos)].push_back(next);
  }
  return a;
}

BuchiAutomaton toBuchi(const BuchiAutomaton& a) {
  if (a.mode == AcceptanceMode::Buchi) return a;
  // Guess the point after which the run stays within the safe set.
  BuchiAutomaton r;
  r.alphabet = a.alphabet;
  r.numStates = 2 * a.numStates;
  r.edges.assign(r.numStates, std::vector<std::vector<int>>(a.alphabet.size()));
  r.accepting.assign(r.numStates, false);
  auto c2 = [&](int q) { return a.numStates + q; };
  for (int q = 0; q < a.numStates; ++q) {
    r.accepting[c2(q)] = true;
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[q][l]) {
        r.edges[q][l].push_back(d);
        if (a.accepting[d]) r.edges[q][l].push_back(c2(d));
        if (a.accepting[q] && a.accepting[d]) r.edges[c2(q)][l].push_back(c2(d));
      }
  }
  r.initial = a.initial;
  return reachTrim(r);
}

BuchiAutomaton reachTrim(const BuchiAutomaton& a) { return restrictTo(a, reachableStates(a)); }

BuchiAutomaton liveTrim(const BuchiAutomaton& a) {
  auto reach = reachableStates(a);
  auto live = liveStates(a);
  std::vector<bool> keep(a.numStates);
  bool any = false;
  for (int q = 0; q < a.numStates; ++q) {
    keep[q] = reach[q] && live[q];
    any = any || keep[q];
  }
  if (!any) return emptyAutomaton(a.alphabet);
  return restrictTo(a, keep);
}

BuchiAutomaton remapAlphabet(const BuchiAutomaton& a, const Alphabet& target) {
  if (a.alphabet == target) return a;
  if (!a.alphabet.sameLetters(target))
    throw std::invalid_argument("remapAlphabet: alphabet mismatch");
  BuchiAutomaton r = a;
  r.alphabet = target;
  for (int q = 0; q < a.numStates; ++q)
    for (int l = 0; l < a.alphabet.size(); ++l)
      r.edges[q][target.index(a.alphabet.name(l))] = a.edges[q][l];
  return r;
}

BuchiAutomaton intersect(const BuchiAutomaton& a0, const BuchiAutomaton& b0) {
  if (!a0.alphabet.sameLetters(b0.alphabet))
    throw std::invalid_argument("intersect: alphabet mismatch");
  BuchiAutomaton a = toBuchi(a0);
  BuchiAutomaton b = remapAlphabet(toBuchi(b0), a.alphabet);
  const int n = a.numStates, m = b.numStates;
  checkCap(static_cast<std::size_t>(n) * m * 2, "intersect");
  BuchiAutomaton r;
  r.alphabet = a.alphabet;
  r.numStates = 2 * n * m;
  r.edges.assign(r.numStates, std::vector<std::vector<int>>(r.alphabet.size()));
  r.accepting.assign(r.numStates, false);
  auto id = [&](int p, int q, int phase) { return (phase * n + p) * m + q; };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < m; ++q) {
      r.accepting[id(p, q, 1)] = b.accepting[q];
      for (int l = 0; l < r.alphabet.size(); ++l)
        for (int pd : a.edges[p][l])
          for (int qd : b.edges[q][l]) {
            int ph0 = a.accepting[p] ? 1 : 0;
            r.edges[id(p, q, 0)][l].push_back(id(pd, qd, ph0));
            int ph1 = b.accepting[q] ? 0 : 1;
            r.edges[id(p, q, 1)][l].push_back(id(pd, qd, ph1));
          }
    }
  for (int p : a.initial)
    for (int q : b.initial) r.initial.push_back(id(p, q, 0));
  return liveTrim(r);
}

BuchiAutomaton unionAut(const BuchiAutomaton& a0, const BuchiAutomaton& b0) {
  if (!a0.alphabet.sameLetters(b0.alphabet))
    throw std::invalid_argument("union: alphabet mismatch");
  BuchiAutomaton a = toBuchi(a0);
  BuchiAutomaton b = remapAlphabet(toBuchi(b0), a.alphabet);
  BuchiAutomaton r = a;
  int off = a.numStates;
  r.numStates += b.numStates;
  r.edges.resize(r.numStates, std::vector<std::vector<int>>(r.alphabet.size()));
  r.accepting.resize(r.numStates, false);
  for (int q = 0; q < b.numStates; ++q) {
    r.accepting[off + q] = b.accepting[q];
    for (int l = 0; l < r.alphabet.size(); ++l)
      for (int d : b.edges[q][l]) r.edges[off + q][l].push_back(off + d);
  }
  for (int q : b.initial) r.initial.push_back(off + q);
  return r;
}

EmptinessResult isEmpty(const BuchiAutomaton& a) {
  auto reach = reachableStates(a);
  int target = -1;
  std::vector<bool> cycleDomain;  // where the witness period may run
  if (a.mode == AcceptanceMode::Buchi) {
    for (const auto& comp : sccsOfBuchi(a, &reach)) {
      if (!hasInternalEdge(a, comp)) continue;
      for (int v : comp)
        if (a.accepting[v]) {
          target = v;
          break;
        }
      if (target >= 0) {
        cycleDomain.assign(a.numStates, false);
        for (int v : comp) cycleDomain[v] = true;
        break;
      }
    }
  } else {
    std::vector<bool> mask(a.numStates);
    for (int q = 0; q < a.numStates; ++q) mask[q] = reach[q] && a.accepting[q];
    for (const auto& comp : sccsOfBuchi(a, &mask)) {
      std::vector<bool> in(a.numStates, false);
      for (int v : comp) in[v] = true;
      bool internal = false;
      for (int v : comp)
        for (int l = 0; l < a.alphabet.size() && !internal; ++l)
          for (int d : a.edges[v][l])
            if (in[d]) internal = true;
      if (internal) {
        target = comp[0];
        cycleDomain = in;
        break;
      }
    }
  }
  if (target < 0) return {true, std::nullopt};

  // Stem: BFS from initial states to the target.
  std::vector<int> prevState(a.numStates, -2), prevLetter(a.numStates, -1);
  std::queue<int> bfs;
  for (int q : a.initial)
    if (prevState[q] == -2) {
      prevState[q] = -1;
      bfs.push(q);
    }
  while (!bfs.empty()) {
    int q = bfs.front();
    bfs.pop();
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[q][l])
        if (prevState[d] == -2) {
          prevState[d] = q;
          prevLetter[d] = l;
          bfs.push(d);
        }
  }
  std::vector<std::string> stem;
  for (int cur = target; prevState[cur] >= 0; cur = prevState[cur])
    stem.push_back(a.alphabet.name(prevLetter[cur]));
  std::reverse(stem.begin(), stem.end());

  // Period: shortest cycle through target inside the chosen domain.
  std::vector<int> pState(a.numStates, -2), pLetter(a.numStates, -1);
  std::queue<int> bfs2;
  std::vector<std::string> period;
  for (int l = 0; l < a.alphabet.size(); ++l)
    for (int d : a.edges[target][l]) {
      if (!cycleDomain[d]) continue;
      if (d == target) {
        period = {a.alphabet.name(l)};
        break;
      }
      if (pState[d] == -2) {
        pState[d] = target;
        pLetter[d] = l;
        bfs2.push(d);
      }
    }
  while (period.empty() && !bfs2.empty()) {
    int q = bfs2.front();
    bfs2.pop();
    for (int l = 0; l < a.alphabet.size() && period.empty(); ++l)
      for (int d : a.edges[q][l]) {
        if (!cycleDomain[d]) continue;
        if (d == target) {
          for (int cur = q; cur != target; cur = pState[cur])
            period.push_back(a.alphabet.name(pLetter[cur]));
          std::reverse(period.begin(), period.end());
          period.push_back(a.alphabet.name(l));
          break;
        }
        if (pState[d] == -2) {
          pState[d] = q;
          pLetter[d] = l;
          bfs2.push(d);
        }
      }
  }
  EmptinessResult r;
  r.empty = false;
  r.witness = LassoWitness{LassoWord{std::move(stem), std::move(period)}};
  return r;
}

namespace {

// ---- Rank-based complementation (tight rankings) ----

struct RankState {
  bool rankPhase = false;
  std::vector<int> ranks;  // -1 = not present; only meaningful in rank phase
  std::vector<bool> subset;
  std::vector<bool> obligation;  // O-set
  std::string key() const {
    std::string k(rankPhase ? "R" : "S");
    for (std::size_t i = 0; i < subset.size(); ++i) {
      k += subset[i] ? '1' : '0';
      if (rankPhase) {
        k += obligation[i] ? 'o' : '.';
        k += std::to_string(ranks[i]);
        k += ',';
      }
    }
    return k;
  }
};

// All tight rankings on `states`, with per-state upper bounds and F-states
// restricted to even ranks. Tight: the maximum is odd and every odd value up
// to the maximum occurs.
void enumerateTight(const std::vector<int>& states, const std::vector<int>& bounds,
                    const std::vector<bool>& isAcc, std::vector<std::vector<int>>& out) {
  int m = static_cast<int>(states.size());
  int nonAcc = 0;
  for (int i = 0; i < m; ++i)
    if (!isAcc[i]) ++nonAcc;
  if (nonAcc == 0) return;

  std::vector<int> nonAccFrom(m + 1, 0);
  for (int i = m - 1; i >= 0; --i) nonAccFrom[i] = nonAccFrom[i + 1] + (isAcc[i] ? 0 : 1);

  for (int maxOdd = 1; maxOdd <= 2 * nonAcc - 1; maxOdd += 2) {
    int needed = (maxOdd + 1) / 2;  // distinct odd values required
    std::vector<int> cur(m, -1);
    std::vector<int> oddCount(needed, 0);
    int present = 0;
    std::function<void(int)> rec = [&](int i) {
      int missing = needed - present;
      if (missing > nonAccFrom[i]) return;
      if (i == m) {
        out.push_back(cur);
        return;
      }
      int ub = std::min(bounds[i], maxOdd);
      for (int v = 0; v <= ub; ++v) {
        if (isAcc[i] && (v % 2 == 1)) continue;
        cur[i] = v;
        bool newOdd = false;
        if (v % 2 == 1) {
          if (oddCount[v / 2]++ == 0) {
            ++present;
            newOdd = true;
          }
        }
        rec(i + 1);
        if (v % 2 == 1) {
          --oddCount[v / 2];
          if (newOdd) --present;
        }
        cur[i] = -1;
      }
    };
    rec(0);
  }
}

BuchiAutomaton complementDeterministic(const BuchiAutomaton& a) {
  // Complete deterministic Büchi: the complement is "finitely many accepting
  // states", an NCW realized as a two-copy NBW restricted to non-accepting
  // states in the second copy.
  BuchiAutomaton r;
  r.alphabet = a.alphabet;
  r.numStates = 2 * a.numStates;
  r.edges.assign(r.numStates, std::vector<std::vector<int>>(a.alphabet.size()));
  r.accepting.assign(r.numStates, false);
  auto c2 = [&](int q) { return a.numStates + q; };
  for (int q = 0; q < a.numStates; ++q) {
    r.accepting[c2(q)] = true;
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[q][l]) {
        r.edges[q][l].push_back(d);
        if (!a.accepting[d]) r.edges[q][l].push_back(c2(d));
        if (!a.accepting[q] && !a.accepting[d]) r.edges[c2(q)][l].push_back(c2(d));
      }
  }
  r.initial = a.initial;
  return liveTrim(r);
}

BuchiAutomaton complementDetCoBuchi(const BuchiAutomaton& a) {
  // Complement of a complete deterministic co-Büchi automaton: accept iff the
  // unique run leaves the safe set infinitely often.
  BuchiAutomaton r = a;
  r.mode = AcceptanceMode::Buchi;
  for (int q = 0; q < a.numStates; ++q) r.accepting[q] = !a.accepting[q];
  return r;
}

} // namespace

BuchiAutomaton complement(const BuchiAutomaton& a0) {
  BuchiAutomaton pre = reachTrim(a0);
  if (pre.mode == AcceptanceMode::CoBuchi) {
    BuchiAutomaton c = completeBuchi(pre);
    if (c.isDeterministic()) return complementDetCoBuchi(c);
    pre = toBuchi(pre);
  }
  BuchiAutomaton a = completeBuchi(pre);
  if (a.isDeterministic()) return complementDeterministic(a);

  const int n = a.numStates;
  if (n > 62) throw CapExceeded("complement: too many states for rank-based construction");

  std::map<std::string, int> ids;
  std::vector<RankState> states;
  std::vector<std::vector<std::vector<int>>> edges;
  std::vector<bool> accepting;

  auto intern = [&](RankState s) -> std::pair<int, bool> {
    auto key = s.key();
    auto it = ids.find(key);
    if (it != ids.end()) return {it->second, false};
    int id = static_cast<int>(states.size());
    ids[key] = id;
    states.push_back(std::move(s));
    edges.emplace_back(a.alphabet.size());
    accepting.push_back(states.back().rankPhase &&
                        std::none_of(states.back().obligation.begin(),
                                     states.back().obligation.end(), [](bool b) { return b; }));
    checkCap(states.size(), "complement");
    return {id, true};
  };

  RankState init;
  init.rankPhase = false;
  init.subset.assign(n, false);
  init.ranks.assign(n, -1);
  init.obligation.assign(n, false);
  for (int q : a.initial) init.subset[q] = true;
  int initId = intern(init).first;

  std::vector<int> work{initId};
  while (!work.empty()) {
    int id = work.back();
    work.pop_back();
    RankState cur = states[id];
    for (int l = 0; l < a.alphabet.size(); ++l) {
      // Successor subset.
      std::vector<bool> next(n, false);
      for (int q = 0; q < n; ++q)
        if (cur.subset[q])
          for (int d : a.edges[q][l]) next[d] = true;

      std::vector<int> succStates;
      for (int q = 0; q < n; ++q)
        if (next[q]) succStates.push_back(q);
      std::vector<bool> succAcc(succStates.size());
      for (std::size_t i = 0; i < succStates.size(); ++i) succAcc[i] = a.accepting[succStates[i]];

      if (!cur.rankPhase) {
        RankState s;
        s.rankPhase = false;
        s.subset = next;
        s.ranks.assign(n, -1);
        s.obligation.assign(n, false);
        auto [sid, freshS] = intern(s);
        if (freshS) work.push_back(sid);
        edges[id][l].push_back(sid);
        // Jump into the rank phase with any tight ranking (no cover bound).
        std::vector<int> bounds(succStates.size(), 2 * n);
        std::vector<std::vector<int>> tights;
        enumerateTight(succStates, bounds, succAcc, tights);
        for (const auto& f : tights) {
          RankState t;
          t.rankPhase = true;
          t.subset = next;
          t.ranks.assign(n, -1);
          t.obligation.assign(n, false);
          for (std::size_t i = 0; i < succStates.size(); ++i) t.ranks[succStates[i]] = f[i];
          auto [tid, fresh] = intern(t);
          if (fresh) work.push_back(tid);
          edges[id][l].push_back(tid);
        }
      } else {
        // Cover bounds: f'(q') <= min over predecessors' ranks.
        std::vector<int> bounds(succStates.size(), INT32_MAX);
        std::vector<int> pos(n, -1);
        for (std::size_t i = 0; i < succStates.size(); ++i) pos[succStates[i]] = static_cast<int>(i);
        for (int q = 0; q < n; ++q) {
          if (!cur.subset[q]) continue;
          for (int d : a.edges[q][l])
            bounds[pos[d]] = std::min(bounds[pos[d]], cur.ranks[q]);
        }
        std::vector<std::vector<int>> tights;
        enumerateTight(succStates, bounds, succAcc, tights);
        bool breakpoint = true;
        for (int q = 0; q < n; ++q) breakpoint = breakpoint && !cur.obligation[q];
        for (const auto& f : tights) {
          RankState t;
          t.rankPhase = true;
          t.subset = next;
          t.ranks.assign(n, -1);
          t.obligation.assign(n, false);
          for (std::size_t i = 0; i < succStates.size(); ++i) t.ranks[succStates[i]] = f[i];
          if (breakpoint) {
            for (std::size_t i = 0; i < succStates.size(); ++i)
              t.obligation[succStates[i]] = (f[i] % 2 == 0);
          } else {
            // Track successors of the previous obligation set with even rank.
            for (int q = 0; q < n; ++q) {
              if (!cur.obligation[q]) continue;
              for (int d : a.edges[q][l])
                if (t.ranks[d] % 2 == 0) t.obligation[d] = true;
            }
          }
          auto [tid, fresh] = intern(t);
          if (fresh) work.push_back(tid);
          edges[id][l].push_back(tid);
        }
      }
    }
  }

  BuchiAutomaton r;
  r.alphabet = a.alphabet;
  r.numStates = static_cast<int>(states.size());
  r.edges = std::move(edges);
  r.accepting = std::move(accepting);
  r.initial = {initId};
  for (auto& perState : r.edges) {
    for (auto& v : perState) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  }
  return liveTrim(r);
}

InclusionResult includes(const BuchiAutomaton& a, const BuchiAutomaton& b) {
  if (!a.alphabet.sameLetters(b.alphabet))
    throw std::invalid_argument("includes: alphabet mismatch");
  auto er = isEmpty(intersect(a, complement(b)));
  InclusionResult r;
  r.included = er.empty;
  if (!er.empty) r.counterexample = er.witness;
  return r;
}

BuchiAutomaton safetyClosure(const BuchiAutomaton& a0) {
  BuchiAutomaton a = toBuchi(a0);
  auto reach = reachableStates(a);
  auto live = liveStates(a);
  std::vector<bool> keep(a.numStates);
  bool any = false;
  for (int q = 0; q < a.numStates; ++q) {
    keep[q] = reach[q] && live[q];
    any = any || keep[q];
  }
  BuchiAutomaton r;
  r.alphabet = a.alphabet;
  if (!any) {
    // Closure of the empty language is empty: a lone rejecting sink.
    r.numStates = 1;
    r.initial = {0};
    r.edges.assign(1, std::vector<std::vector<int>>(r.alphabet.size()));
    for (int l = 0; l < r.alphabet.size(); ++l) r.edges[0][l].push_back(0);
    r.accepting = {false};
    return r;
  }
  BuchiAutomaton trimmed = restrictTo(a, keep);
  r = trimmed;
  int sink = r.numStates++;
  r.edges.emplace_back(r.alphabet.size());
  r.accepting.assign(r.numStates, true);
  r.accepting[sink] = false;
  for (int q = 0; q < r.numStates; ++q)
    for (int l = 0; l < r.alphabet.size(); ++l)
      if (r.edges[q][l].empty()) r.edges[q][l].push_back(sink);
  return r;
}

namespace {

// Minimal period of the stream c^ω: the smallest divisor p of |c| such that
// c is a power of its length-p prefix.
int minimalPeriod(const std::vector<int>& c) {
  int L = static_cast<int>(c.size());
  for (int p = 1; p <= L; ++p) {
    if (L % p != 0) continue;
    bool ok = true;
    for (int i = 0; i < L && ok; ++i) ok = (c[i] == c[i % p]);
    if (ok) return p;
  }
  return L;
}

} // namespace

// The language is infinite iff some reachable q1 on a cycle and some
// accepting q2 on a cycle reachable from q1 admit a cycle word y at q1, a
// connecting path x and a cycle z' at q2 with x·z'^ω ≠ y^ω: pumping the
// q1-loop then yields pairwise distinct accepted words u1 y^i x z'^ω.
// Conversely, when every such triple agrees with the q1-cycle stream, every
// accepted word collapses to (simple stem)·(cycle stream), leaving finitely
// many words.
bool isInfinite(const BuchiAutomaton& a0) {
  BuchiAutomaton a = liveTrim(toBuchi(a0));
  if (isEmpty(a).empty) return false;
  const int n = a.numStates;
  const int sz = a.alphabet.size();

  // Reachability and cycle membership.
  std::vector<std::vector<bool>> reach1(n, std::vector<bool>(n, false));
  for (int s = 0; s < n; ++s) {
    std::vector<int> stack{s};
    reach1[s][s] = true;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (int l = 0; l < sz; ++l)
        for (int d : a.edges[q][l])
          if (!reach1[s][d]) {
            reach1[s][d] = true;
            stack.push_back(d);
          }
    }
  }
  auto onCycle = [&](int q) {
    for (int l = 0; l < sz; ++l)
      for (int d : a.edges[q][l])
        if (d == q || reach1[d][q]) return true;
    return false;
  };

  // Shortest cycle word at q (letters), or empty when none.
  auto shortestCycleWord = [&](int q) {
    std::vector<int> prev(n, -2), prevL(n, -1);
    std::queue<int> bfs;
    for (int l = 0; l < sz; ++l)
      for (int d : a.edges[q][l]) {
        if (d == q) return std::vector<int>{l};
        if (prev[d] == -2) {
          prev[d] = q;
          prevL[d] = l;
          bfs.push(d);
        }
      }
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop();
      for (int l = 0; l < sz; ++l)
        for (int d : a.edges[v][l]) {
          if (d == q) {
            std::vector<int> cyc;
            for (int cur = v; cur != q; cur = prev[cur]) cyc.push_back(prevL[cur]);
            std::reverse(cyc.begin(), cyc.end());
            cyc.push_back(l);
            return cyc;
          }
          if (prev[d] == -2) {
            prev[d] = v;
            prevL[d] = l;
            bfs.push(d);
          }
        }
    }
    return std::vector<int>{};
  };

  // Does q carry a cycle whose letter stream differs from stream[offset:]?
  // (stream = c^ω with c of minimal period p.)
  auto divergentCycleAt = [&](int q, int offset, const std::vector<int>& c, int p) {
    std::vector<bool> seen(static_cast<std::size_t>(n) * p * 2, false);
    std::queue<std::tuple<int, int, bool>> bfs;
    bool hit = false;
    auto consider = [&](int node, int pos, bool dirty) {
      if (hit) return;
      if (node == q && (dirty || pos != offset)) {
        hit = true;
        return;
      }
      std::size_t idx = (static_cast<std::size_t>(node) * p + pos) * 2 + (dirty ? 1 : 0);
      if (seen[idx]) return;
      seen[idx] = true;
      bfs.push({node, pos, dirty});
    };
    for (int l = 0; l < sz; ++l)
      for (int d : a.edges[q][l]) consider(d, (offset + 1) % p, l != c[offset % p]);
    while (!hit && !bfs.empty()) {
      auto [node, pos, dirty] = bfs.front();
      bfs.pop();
      for (int l = 0; l < sz; ++l)
        for (int d : a.edges[node][l]) {
          consider(d, (pos + 1) % p, dirty || (l != c[pos]));
          if (hit) break;
        }
    }
    return hit;
  };

  for (int q1 = 0; q1 < n; ++q1) {
    if (!onCycle(q1)) continue;
    std::vector<int> c = shortestCycleWord(q1);
    if (c.empty()) continue;
    int p = minimalPeriod(c);
    std::vector<int> accTargets;
    for (int q2 = 0; q2 < n; ++q2)
      if (a.accepting[q2] && reach1[q1][q2] && onCycle(q2)) accTargets.push_back(q2);
    if (accTargets.empty()) continue;

    // Two distinct cycle streams at q1 beat any fixed tail.
    if (divergentCycleAt(q1, 0, c, p)) return true;

    // Otherwise scan paths q1 -> q2 against the unique stream c^ω: a dirty
    // arrival wins outright, a clean arrival at offset o needs a q2-cycle
    // diverging from the shifted stream.
    std::vector<bool> isTarget(n, false);
    for (int q2 : accTargets) isTarget[q2] = true;
    std::map<std::pair<int, int>, bool> divMemo;
    auto targetDiverges = [&](int q2, int offset) {
      auto key = std::make_pair(q2, offset);
      auto it = divMemo.find(key);
      if (it != divMemo.end()) return it->second;
      bool r = divergentCycleAt(q2, offset, c, p);
      divMemo[key] = r;
      return r;
    };

    std::vector<bool> seen(static_cast<std::size_t>(n) * p * 2, false);
    std::queue<std::tuple<int, int, bool>> bfs;
    bool hit = false;
    auto consider = [&](int node, int pos, bool dirty) {
      if (hit) return;
      if (isTarget[node]) {
        if (dirty || targetDiverges(node, pos)) {
          hit = true;
          return;
        }
      }
      std::size_t idx = (static_cast<std::size_t>(node) * p + pos) * 2 + (dirty ? 1 : 0);
      if (seen[idx]) return;
      seen[idx] = true;
      bfs.push({node, pos, dirty});
    };
    consider(q1, 0, false);
    while (!hit && !bfs.empty()) {
      auto [node, pos, dirty] = bfs.front();
      bfs.pop();
      for (int l = 0; l < sz; ++l)
        for (int d : a.edges[node][l]) {
          consider(d, (pos + 1) % p, dirty || (l != c[pos]));
          if (hit) break;
        }
    }
    if (hit) return true;
  }
  return false;
}

bool diffIsInfinite(const BuchiAutomaton& a, const BuchiAutomaton& b) {
  if (!a.alphabet.sameLetters(b.alphabet))
    throw std::invalid_argument("diffIsInfinite: alphabet mismatch");
  return isInfinite(intersect(a, complement(b)));
}

bool hasInfinitelyAmbiguousWord(const BuchiAutomaton& a0) {
  BuchiAutomaton a = reachTrim(toBuchi(a0));
  const int n = a.numStates;
  const int sz = a.alphabet.size();
  if (n == 0) return false;

  // Cheap prerequisites: q must lie on a cycle and be reachable from p.
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (int s = 0; s < n; ++s) {
    std::vector<int> stack{s};
    reach[s][s] = true;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (int l = 0; l < sz; ++l)
        for (int d : a.edges[q][l])
          if (!reach[s][d]) {
            reach[s][d] = true;
            stack.push_back(d);
          }
    }
  }
  auto onCycle = [&](int q) {
    for (int l = 0; l < sz; ++l)
      for (int d : a.edges[q][l])
        if (d == q || reach[d][q]) return true;
    return false;
  };

  for (int p = 0; p < n; ++p) {
    if (!onCycle(p)) continue;
    for (int q = 0; q < n; ++q) {
      if (q == p || !onCycle(q) || !reach[p][q]) continue;
      // Search a shared word v with p ->v p, p ->v q, q ->v q where the q-loop
      // passes an accepting state.
      std::vector<bool> seen(static_cast<std::size_t>(n) * n * n * 2, false);
      auto idx = [&](int x, int y, int z, bool bit) {
        return ((static_cast<std::size_t>(x) * n + y) * n + z) * 2 + (bit ? 1 : 0);
      };
      std::queue<std::tuple<int, int, int, bool>> bfs;
      bool found = false;
      auto push = [&](int x, int y, int z, bool bit, int steps) {
        if (steps > 0 && x == p && y == q && z == q && bit) {
          found = true;
          return;
        }
        if (seen[idx(x, y, z, bit)]) return;
        seen[idx(x, y, z, bit)] = true;
        bfs.push({x, y, z, bit});
      };
      push(p, p, q, a.accepting[q], 0);
      while (!found && !bfs.empty()) {
        auto [x, y, z, bit] = bfs.front();
        bfs.pop();
        for (int l = 0; l < sz && !found; ++l)
          for (int xd : a.edges[x][l]) {
            for (int yd : a.edges[y][l]) {
              for (int zd : a.edges[z][l]) {
                push(xd, yd, zd, bit || a.accepting[zd], 1);
                if (found) break;
              }
              if (found) break;
            }
            if (found) break;
          }
      }
      if (found) return true;
    }
  }
  return false;
}

bool lassoAccepts(const BuchiAutomaton& a, const LassoWord& w) {
  const int L = static_cast<int>(w.prefix.size() + w.period.size());
  const int pref = static_cast<int>(w.prefix.size());
  std::vector<int> letters(L);
  for (int i = 0; i < L; ++i) {
    const std::string& s = i < pref ? w.prefix[i] : w.period[i - pref];
    letters[i] = a.alphabet.index(s);
    if (letters[i] < 0) throw std::invalid_argument("lassoAccepts: unknown letter " + s);
  }
  // Product with the lasso positions.
  auto id = [&](int q, int pos) { return q * L + pos; };
  int N = a.numStates * L;
  std::vector<std::vector<int>> adj(N);
  for (int q = 0; q < a.numStates; ++q)
    for (int pos = 0; pos < L; ++pos) {
      int next = pos + 1 < L ? pos + 1 : pref;
      for (int d : a.edges[q][letters[pos]]) adj[id(q, pos)].push_back(id(d, next));
    }
  std::vector<bool> seen(N, false);
  std::vector<int> stack;
  for (int q : a.initial) {
    if (!seen[id(q, 0)]) {
      seen[id(q, 0)] = true;
      stack.push_back(id(q, 0));
    }
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int d : adj[v])
      if (!seen[d]) {
        seen[d] = true;
        stack.push_back(d);
      }
  }
  // Restrict to reachable product nodes, then look for accepting recurrence.
  std::vector<int> index(N, -1), low(N, 0), stk;
  std::vector<bool> onStack(N, false);
  int counter = 0;
  bool good = false;
  std::function<void(int)> strong = [&](int root) {
    std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stk.push_back(root);
    onStack[root] = true;
    while (!frames.empty()) {
      auto& [v, child] = frames.back();
      if (child < adj[v].size()) {
        int d = adj[v][child++];
        if (!seen[d]) continue;
        if (index[d] < 0) {
          index[d] = low[d] = counter++;
          stk.push_back(d);
          onStack[d] = true;
          frames.push_back({d, 0});
        } else if (onStack[d]) {
          low[v] = std::min(low[v], index[d]);
        }
      } else {
        int v2 = v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[v2]);
        if (low[v2] == index[v2]) {
          std::vector<int> compNodes;
          while (true) {
            int wv = stk.back();
            stk.pop_back();
            onStack[wv] = false;
            compNodes.push_back(wv);
            if (wv == v2) break;
          }
          // Internal edge?
          std::set<int> inComp(compNodes.begin(), compNodes.end());
          bool internal = false;
          for (int v3 : compNodes)
            for (int d : adj[v3])
              if (inComp.count(d)) internal = true;
          if (!internal) continue;
          if (a.mode == AcceptanceMode::Buchi) {
            for (int v3 : compNodes)
              if (a.accepting[v3 / L]) good = true;
          } else {
            // Co-Büchi: a cycle entirely within safe nodes; check the safe
            // sub-SCC of this component.
            std::vector<int> safeNodes;
            for (int v3 : compNodes)
              if (a.accepting[v3 / L]) safeNodes.push_back(v3);
            std::set<int> safeSet(safeNodes.begin(), safeNodes.end());
            // Look for a cycle within safeSet using DFS.
            // Small sizes: do a simple SCC on the safe-induced subgraph.
            std::map<int, int> lidx;
            int k = 0;
            for (int v3 : safeNodes) lidx[v3] = k++;
            std::vector<std::vector<int>> sadj(k);
            for (int v3 : safeNodes)
              for (int d : adj[v3])
                if (safeSet.count(d)) sadj[lidx[v3]].push_back(lidx[d]);
            // Tarjan again, tiny.
            std::vector<int> si(k, -1), sl(k, 0), sstk;
            std::vector<bool> son(k, false);
            int sc = 0;
            std::function<void(int)> srun = [&](int r2) {
              std::vector<std::pair<int, std::size_t>> fr{{r2, 0}};
              si[r2] = sl[r2] = sc++;
              sstk.push_back(r2);
              son[r2] = true;
              while (!fr.empty()) {
                auto& [v4, ch] = fr.back();
                if (ch < sadj[v4].size()) {
                  int d = sadj[v4][ch++];
                  if (si[d] < 0) {
                    si[d] = sl[d] = sc++;
                    sstk.push_back(d);
                    son[d] = true;
                    fr.push_back({d, 0});
                  } else if (son[d]) {
                    sl[v4] = std::min(sl[v4], si[d]);
                  }
                } else {
                  int v5 = v4;
                  fr.pop_back();
                  if (!fr.empty()) sl[fr.back().first] = std::min(sl[fr.back().first], sl[v5]);
                  if (sl[v5] == si[v5]) {
                    std::vector<int> c2;
                    while (true) {
                      int wv = sstk.back();
                      sstk.pop_back();
                      son[wv] = false;
                      c2.push_back(wv);
                      if (wv == v5) break;
                    }
                    bool internal2 = false;
                    std::set<int> in2(c2.begin(), c2.end());
                    for (int v6 : c2)
                      for (int d : sadj[v6])
                        if (in2.count(d)) internal2 = true;
                    if (internal2) good = true;
                  }
                }
              }
            };
            for (int r2 = 0; r2 < k; ++r2)
              if (si[r2] < 0) srun(r2);
          }
        }
      }
    }
  };
  for (int v = 0; v < N; ++v)
    if (seen[v] && index[v] < 0) strong(v);
  return good;
}

} // namespace qlatk
