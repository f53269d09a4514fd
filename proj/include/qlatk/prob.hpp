#ifndef QLATK_PROB_HPP
#define QLATK_PROB_HPP

#include "qlatk/model.hpp"

namespace qlatk {

// Exact probability measure of L(lang) under the word distribution of the
// chain. Computed on the subset product of the chain with the automaton:
// conditioned on the absorbing component the acceptance probability obeys a
// zero-one law, and the accepting components are recognized through an
// end-component analysis of the state-pair graph.
Rational measureBuchi(const BuchiAutomaton& lang, const MarkovChain& mc);

// Probabilistic evaluation (language aggregator E).
EvalOutcome evalMarkov(const QlaSpec& spec, const MarkovChain& mc);

} // namespace qlatk

#endif
