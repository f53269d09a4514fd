#ifndef QLATK_WMC_HPP
#define QLATK_WMC_HPP

#include "qlatk/model.hpp"

namespace qlatk {

// A finite Markov chain with rational rewards on edges; the substrate for
// expected run-value computations shared by lasso evaluation (g = E) and
// probabilistic evaluation (h = E).
struct WeightedMc {
  struct Edge {
    Rational prob;
    Rational weight;
    int target = 0;
  };
  int n = 0;
  std::vector<Rational> initial;
  std::vector<std::vector<Edge>> edges;
};

// Exact expected f-value of a random run of the chain.
ExtValue expectedRunValue(const WeightedMc& mc, RunAgg f, const std::optional<Rational>& lambda);

} // namespace qlatk

#endif
