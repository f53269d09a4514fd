#ifndef QLATK_TESTS_GEN_HPP
#define QLATK_TESTS_GEN_HPP

#include "qlatk/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace qlatk::testgen {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  int below(int n) { return static_cast<int>(eng() % static_cast<std::uint64_t>(n)); }
  bool coin() { return below(2) == 0; }
};

inline Alphabet abAlphabet() {
  Alphabet s;
  s.letters = {"a", "b"};
  return s;
}

// Complete WLTS with the given number of states; weights drawn from `weights`,
// out-degree per (state,letter) between 1 and maxBranch, uniform probabilities.
inline Wlts randomWlts(Rng& rng, int states, const std::vector<Rational>& weights, int maxBranch) {
  Wlts t;
  t.alphabet = abAlphabet();
  for (int q = 0; q < states; ++q) t.stateNames.push_back("q" + std::to_string(q));
  t.initial.assign(states, Rational(0));
  t.initial[0] = Rational(1);
  t.edges.assign(states, std::vector<std::vector<WltsEdge>>(2));
  for (int q = 0; q < states; ++q)
    for (int l = 0; l < 2; ++l) {
      int deg = 1 + rng.below(maxBranch);
      Rational p(1, deg);
      for (int i = 0; i < deg; ++i)
        t.edges[q][l].push_back({weights[rng.below(static_cast<int>(weights.size()))], p,
                                 rng.below(states)});
    }
  return t;
}

// Büchi automaton over {a,b}: each (state,letter) gets 0..2 targets; at least
// one accepting state; initial state 0.
inline BuchiAutomaton randomBuchi(Rng& rng, int states) {
  BuchiAutomaton a;
  a.alphabet = abAlphabet();
  a.numStates = states;
  a.initial = {0};
  a.edges.assign(states, std::vector<std::vector<int>>(2));
  a.accepting.assign(states, false);
  for (int q = 0; q < states; ++q)
    for (int l = 0; l < 2; ++l) {
      int deg = rng.below(3);
      for (int i = 0; i < deg; ++i) a.edges[q][l].push_back(rng.below(states));
    }
  for (int q = 0; q < states; ++q) a.accepting[q] = rng.coin();
  if (std::none_of(a.accepting.begin(), a.accepting.end(), [](bool b) { return b; }))
    a.accepting[rng.below(states)] = true;
  return a;
}

inline MarkovChain randomChain(Rng& rng, int states) {
  MarkovChain m;
  m.alphabet = abAlphabet();
  for (int q = 0; q < states; ++q) m.stateNames.push_back("m" + std::to_string(q));
  m.initial.assign(states, Rational(0));
  m.initial[0] = Rational(1);
  m.edges.assign(states, {});
  for (int q = 0; q < states; ++q) {
    int deg = 1 + rng.below(2);
    Rational p(1, deg);
    for (int i = 0; i < deg; ++i) m.edges[q].push_back({rng.below(2), p, rng.below(states)});
  }
  return m;
}

inline LassoWord randomLasso(Rng& rng, int maxPrefix, int maxPeriod) {
  LassoWord w;
  int np = rng.below(maxPrefix + 1);
  int nv = 1 + rng.below(maxPeriod);
  for (int i = 0; i < np; ++i) w.prefix.push_back(rng.coin() ? "a" : "b");
  for (int i = 0; i < nv; ++i) w.period.push_back(rng.coin() ? "a" : "b");
  return w;
}

inline LassoWord lasso(const std::string& text);

} // namespace qlatk::testgen

#include "qlatk/io.hpp"

namespace qlatk::testgen {
inline LassoWord lasso(const std::string& text) { return parseLasso(text); }
} // namespace qlatk::testgen

#endif
