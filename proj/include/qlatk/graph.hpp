#ifndef QLATK_GRAPH_HPP
#define QLATK_GRAPH_HPP

#include "qlatk/model.hpp"

#include <functional>
#include <vector>

namespace qlatk {

struct GraphEdge {
  int src = 0;
  Rational weight;
  int dst = 0;
  int label = -1;
};

struct WeightedDigraph {
  int n = 0;
  std::vector<GraphEdge> edges;

  // out[v] -> indices into `edges`
  std::vector<std::vector<int>> outIndex() const;
};

// Maximal strongly connected components in reverse topological order
// (components with no outgoing edges to later components come first).
// A singleton without a self-loop is trivial.
std::vector<std::vector<int>> sccs(const WeightedDigraph& g);
bool sccIsTrivial(const WeightedDigraph& g, const std::vector<int>& scc);

struct MeanCycleResult {
  ExtValue value;             // -inf iff the graph is acyclic
  std::vector<int> cycle;     // edge indices of a witness cycle attaining the value
};

// Maximum over all cycles of (sum of edge weights) / length, by Karp's
// algorithm per SCC. The witness cycle attains the value exactly.
MeanCycleResult maxMeanCycle(const WeightedDigraph& g);
MeanCycleResult minMeanCycle(const WeightedDigraph& g);

struct DiscountedResult {
  std::vector<Rational> value;  // per node
  std::vector<int> policy;      // chosen edge index per node (positional witness)
};

// One-player discounted optimum: v(n) = opt over edges (w + lambda*v(dst)),
// solved exactly by policy iteration. Every node needs an outgoing edge.
DiscountedResult discountedBestValue(const WeightedDigraph& g, const Rational& lambda,
                                     bool maximize);

class SingularMatrix : public std::runtime_error {
public:
  SingularMatrix() : std::runtime_error("singular linear system") {}
};

// Exact solution of A x = b by fraction-free (Bareiss) elimination.
// Throws SingularMatrix when A is singular.
std::vector<Rational> solveLinear(std::vector<std::vector<Rational>> a, std::vector<Rational> b);

struct BsccResult {
  std::vector<std::vector<int>> components;
  std::vector<Rational> reachProb;  // absorption probability per component
};

BsccResult bsccs(const MarkovChain& m);

// Expected stationary edge weight inside a BSCC (unique stationary
// distribution, exact). `weightOf` maps an edge to its reward.
Rational stationaryMean(const MarkovChain& m,
                        const std::function<Rational(int, const McEdge&)>& weightOf,
                        const std::vector<int>& bscc);

} // namespace qlatk

#endif
