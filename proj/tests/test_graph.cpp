#include "doctest.h"
#include "qlatk/graph.hpp"
#include "support/gen.hpp"

#include <set>

using namespace qlatk;

namespace {

WeightedDigraph g(int n, std::vector<std::tuple<int, long, long, int>> edges) {
  WeightedDigraph graph;
  graph.n = n;
  for (auto [s, num, den, d] : edges) graph.edges.push_back({s, Rational(num, den), d, -1});
  return graph;
}

// Brute-force max mean over all simple cycles.
std::optional<Rational> bruteMaxMean(const WeightedDigraph& gr) {
  std::optional<Rational> best;
  auto out = gr.outIndex();
  std::vector<int> path;
  std::vector<bool> on(gr.n, false);
  std::function<void(int, int)> rec = [&](int start, int v) {
    for (int ei : out[v]) {
      const auto& e = gr.edges[ei];
      if (e.dst == start) {
        Rational sum;
        for (int pi : path) sum += gr.edges[pi].weight;
        sum += e.weight;
        Rational mean = sum / Rational(static_cast<long>(path.size() + 1));
        if (!best || mean > *best) best = mean;
        continue;
      }
      if (on[e.dst] || e.dst < start) continue;
      on[e.dst] = true;
      path.push_back(ei);
      rec(start, e.dst);
      path.pop_back();
      on[e.dst] = false;
    }
  };
  for (int s = 0; s < gr.n; ++s) {
    on[s] = true;
    rec(s, s);
    on[s] = false;
  }
  return best;
}

} // namespace

TEST_CASE("sccs partition in reverse topological order") {
  auto c1 = sccs(g(2, {{0, 1, 1, 1}}));
  REQUIRE(c1.size() == 2);
  CHECK(c1[0] == std::vector<int>{1});
  CHECK(c1[1] == std::vector<int>{0});
  CHECK(sccIsTrivial(g(2, {{0, 1, 1, 1}}), c1[0]));

  auto g2 = g(1, {{0, 1, 1, 0}});
  auto c2 = sccs(g2);
  REQUIRE(c2.size() == 1);
  CHECK(!sccIsTrivial(g2, c2[0]));

  // chain with a sink loop, like the T_sim skeleton
  auto g3 = g(3, {{0, 0, 1, 1}, {1, 0, 1, 2}, {2, 1, 1, 2}});
  auto c3 = sccs(g3);
  REQUIRE(c3.size() == 3);
  CHECK(!sccIsTrivial(g3, c3[0]));  // sink loop first (reverse topological)
  CHECK(c3[0] == std::vector<int>{2});
  CHECK(sccIsTrivial(g3, c3[1]));
  CHECK(sccIsTrivial(g3, c3[2]));
}

TEST_CASE("maxMeanCycle matches the worked examples") {
  auto r1 = maxMeanCycle(g(1, {{0, 7, 2, 0}}));
  CHECK(r1.value == ExtValue(Rational(7, 2)));
  REQUIRE(r1.cycle.size() == 1);

  // cycle of weights 1,0 against a self-loop of weight 1
  auto gr = g(2, {{0, 1, 1, 1}, {1, 0, 1, 0}, {0, 1, 1, 0}});
  auto r2 = maxMeanCycle(gr);
  CHECK(r2.value == ExtValue(Rational(1)));
  Rational sum;
  for (int ei : r2.cycle) sum += gr.edges[ei].weight;
  CHECK(sum / Rational(static_cast<long>(r2.cycle.size())) == Rational(1));

  auto r3 = maxMeanCycle(g(3, {{0, 1, 1, 1}, {1, 1, 1, 2}}));
  CHECK(r3.value == ExtValue::minusInf());
  CHECK(minMeanCycle(g(3, {{0, 1, 1, 1}, {1, 1, 1, 2}})).value == ExtValue::plusInf());
}

TEST_CASE("maxMeanCycle equals brute force on random graphs up to 6 nodes") {
  testgen::Rng rng(12345);
  for (int iter = 0; iter < 300; ++iter) {
    int n = 1 + rng.below(6);
    WeightedDigraph gr;
    gr.n = n;
    int m = rng.below(2 * n + 2);
    for (int i = 0; i < m; ++i)
      gr.edges.push_back(
          {rng.below(n), Rational(rng.below(7) - 3, 1 + rng.below(3)), rng.below(n), -1});
    auto mine = maxMeanCycle(gr);
    auto brute = bruteMaxMean(gr);
    if (!brute) {
      CHECK(mine.value == ExtValue::minusInf());
    } else {
      REQUIRE(mine.value.isFinite());
      CHECK(mine.value.finite() == *brute);
      // witness attains the value
      REQUIRE(!mine.cycle.empty());
      Rational sum;
      for (int ei : mine.cycle) sum += gr.edges[ei].weight;
      CHECK(sum / Rational(static_cast<long>(mine.cycle.size())) == *brute);
    }
  }
}

TEST_CASE("discountedBestValue solves the geometric examples") {
  auto r1 = discountedBestValue(g(1, {{0, 1, 1, 0}}), Rational(1, 2), true);
  CHECK(r1.value[0] == Rational(2));
  auto r2 = discountedBestValue(g(1, {{0, 0, 1, 0}}), Rational(1, 2), true);
  CHECK(r2.value[0] == Rational(0));
  // choice between loop(1) and loop(0)
  auto gr = g(3, {{0, 1, 1, 1}, {0, 0, 1, 2}, {1, 1, 1, 1}, {2, 0, 1, 2}});
  auto r3 = discountedBestValue(gr, Rational(1, 2), true);
  CHECK(r3.value[0] == Rational(2));
  auto r4 = discountedBestValue(gr, Rational(1, 2), false);
  CHECK(r4.value[0] == Rational(0));
}

TEST_CASE("discountedBestValue satisfies the fixed point and duality") {
  testgen::Rng rng(999);
  for (int iter = 0; iter < 100; ++iter) {
    int n = 1 + rng.below(5);
    WeightedDigraph gr;
    gr.n = n;
    for (int v = 0; v < n; ++v) {
      int deg = 1 + rng.below(3);
      for (int i = 0; i < deg; ++i)
        gr.edges.push_back({v, Rational(rng.below(9) - 4, 1 + rng.below(2)), rng.below(n), -1});
    }
    Rational lambda(1 + rng.below(3), 4);  // 1/4, 1/2, 3/4
    auto mx = discountedBestValue(gr, lambda, true);
    auto out = gr.outIndex();
    for (int v = 0; v < n; ++v) {
      std::optional<Rational> best;
      for (int ei : out[v]) {
        Rational q = gr.edges[ei].weight + lambda * mx.value[gr.edges[ei].dst];
        if (!best || q > *best) best = q;
      }
      CHECK(mx.value[v] == *best);
      const auto& chosen = gr.edges[mx.policy[v]];
      CHECK(chosen.weight + lambda * mx.value[chosen.dst] == *best);
    }
    WeightedDigraph neg = gr;
    for (auto& e : neg.edges) e.weight = -e.weight;
    auto mn = discountedBestValue(neg, lambda, false);
    for (int v = 0; v < n; ++v) CHECK(mn.value[v] == -mx.value[v]);
  }
}

TEST_CASE("solveLinear is exact and reports singular systems") {
  std::vector<std::vector<Rational>> id = {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
  auto r = solveLinear(id, {Rational(3, 7), Rational(-2)});
  CHECK(r[0] == Rational(3, 7));
  CHECK(r[1] == Rational(-2));

  auto r2 = solveLinear({{Rational(2)}}, {Rational(3)});
  CHECK(r2[0] == Rational(3, 2));

  // expected discounted distance system of the request/grant chain at p=q=1/2
  Rational q14(1, 4), q12(1, 2);
  std::vector<std::vector<Rational>> m = {
      {Rational(1) - q14, -q14, Rational(0)},
      {-q14, Rational(1), Rational(0)},
      {Rational(0), Rational(0), Rational(1) - q12}};
  auto x = solveLinear(m, {Rational(0), q12, Rational(1)});
  CHECK(x[0] == Rational(2, 11));
  CHECK(x[2] == Rational(2));

  std::vector<std::vector<Rational>> sing = {{Rational(1), Rational(1)},
                                             {Rational(2), Rational(2)}};
  CHECK_THROWS_AS(solveLinear(sing, {Rational(1), Rational(2)}), SingularMatrix);
}

TEST_CASE("bsccs find absorption probabilities exactly") {
  // absorbing 2-state split 1/3 - 2/3 from a transient start
  MarkovChain m;
  m.alphabet.letters = {"x"};
  m.stateNames = {"s", "l", "r"};
  m.initial = {Rational(1), Rational(0), Rational(0)};
  m.edges.resize(3);
  m.edges[0] = {{0, Rational(1, 3), 1}, {0, Rational(2, 3), 2}};
  m.edges[1] = {{0, Rational(1), 1}};
  m.edges[2] = {{0, Rational(1), 2}};
  auto b = bsccs(m);
  REQUIRE(b.components.size() == 2);
  Rational total;
  for (std::size_t i = 0; i < b.components.size(); ++i) {
    total += b.reachProb[i];
    if (b.components[i] == std::vector<int>{1}) CHECK(b.reachProb[i] == Rational(1, 3));
    if (b.components[i] == std::vector<int>{2}) CHECK(b.reachProb[i] == Rational(2, 3));
  }
  CHECK(total == Rational(1));

  // irreducible chain: one BSCC with probability 1
  MarkovChain irr;
  irr.alphabet.letters = {"x"};
  irr.stateNames = {"u", "v"};
  irr.initial = {Rational(1, 2), Rational(1, 2)};
  irr.edges.resize(2);
  irr.edges[0] = {{0, Rational(1), 1}};
  irr.edges[1] = {{0, Rational(1), 0}};
  auto b2 = bsccs(irr);
  REQUIRE(b2.components.size() == 1);
  CHECK(b2.reachProb[0] == Rational(1));
}

TEST_CASE("stationaryMean computes the exact stationary average") {
  MarkovChain m;
  m.alphabet.letters = {"x"};
  m.stateNames = {"u"};
  m.initial = {Rational(1)};
  m.edges.resize(1);
  m.edges[0] = {{0, Rational(1), 0}};
  auto mean = stationaryMean(m, [](int, const McEdge&) { return Rational(5, 3); }, {0});
  CHECK(mean == Rational(5, 3));

  MarkovChain sym;
  sym.alphabet.letters = {"x"};
  sym.stateNames = {"u", "v"};
  sym.initial = {Rational(1), Rational(0)};
  sym.edges.resize(2);
  sym.edges[0] = {{0, Rational(1), 1}};
  sym.edges[1] = {{0, Rational(1), 0}};
  auto mean2 = stationaryMean(
      sym, [](int src, const McEdge&) { return src == 0 ? Rational(1) : Rational(0); }, {0, 1});
  CHECK(mean2 == Rational(1, 2));

  // all weights equal regardless of probabilities
  MarkovChain pair;
  pair.alphabet.letters = {"x"};
  pair.stateNames = {"u"};
  pair.initial = {Rational(1)};
  pair.edges.resize(1);
  pair.edges[0] = {{0, Rational(9, 10), 0}, {0, Rational(1, 10), 0}};
  auto mean3 = stationaryMean(pair, [](int, const McEdge&) { return Rational(1); }, {0});
  CHECK(mean3 == Rational(1));

  // {0} is not closed in the two-state alternating chain
  CHECK_THROWS_AS(stationaryMean(sym, [](int, const McEdge&) { return Rational(0); }, {0}),
                  std::invalid_argument);
}

TEST_CASE("stationaryMean is invariant under state relabeling") {
  testgen::Rng rng(4242);
  for (int iter = 0; iter < 30; ++iter) {
    MarkovChain m = testgen::randomChain(rng, 3);
    // make irreducible by adding a cycle through all states
    for (int q = 0; q < 3; ++q) {
      bool has = false;
      for (auto& e : m.edges[q]) has = has || e.target == (q + 1) % 3;
      if (!has) {
        for (auto& e : m.edges[q]) e.prob = e.prob * Rational(1, 2);
        Rational rest(1);
        for (auto& e : m.edges[q]) rest -= e.prob;
        m.edges[q].push_back({0, rest, (q + 1) % 3});
      }
    }
    auto b = bsccs(m);
    if (b.components.size() != 1 || b.components[0].size() != 3) continue;
    auto weightOf = [](int src, const McEdge& e) { return Rational(src + e.letter); };
    Rational v1 = stationaryMean(m, weightOf, b.components[0]);

    // permute states 0<->2
    MarkovChain p = m;
    auto perm = [](int q) { return q == 0 ? 2 : q == 2 ? 0 : 1; };
    for (int q = 0; q < 3; ++q) {
      p.edges[perm(q)] = m.edges[q];
      for (auto& e : p.edges[perm(q)]) e.target = perm(e.target);
      p.initial[perm(q)] = m.initial[q];
    }
    auto weightOfP = [&](int src, const McEdge& e) {
      int orig = src == 0 ? 2 : src == 2 ? 0 : 1;
      return Rational(orig + e.letter);
    };
    auto bp = bsccs(p);
    REQUIRE(bp.components.size() == 1);
    Rational v2 = stationaryMean(p, weightOfP, bp.components[0]);
    CHECK(v1 == v2);
  }
}
