#ifndef QLATK_OMEGA_HPP
#define QLATK_OMEGA_HPP

#include "qlatk/model.hpp"

#include <optional>

namespace qlatk {

struct LassoWitness {
  LassoWord word;
};

struct EmptinessResult {
  bool empty = true;
  std::optional<LassoWitness> witness;  // accepted lasso when nonempty
};

struct InclusionResult {
  bool included = true;
  std::optional<LassoWitness> counterexample;
};

// Σ^ω and ∅ over a given alphabet.
BuchiAutomaton universalAutomaton(const Alphabet& sigma);
BuchiAutomaton emptyAutomaton(const Alphabet& sigma);

// Deterministic automaton accepting exactly {u v^ω}.
BuchiAutomaton lassoAutomaton(const Alphabet& sigma, const LassoWord& w);

// Co-Büchi to Büchi (two-copy construction); identity on Büchi inputs.
BuchiAutomaton toBuchi(const BuchiAutomaton& a);

// Restriction to reachable states.
BuchiAutomaton reachTrim(const BuchiAutomaton& a);
// Restriction to live states (those with a nonempty residual language).
BuchiAutomaton liveTrim(const BuchiAutomaton& a);

// Reorders letters of `a` to match `target` (same letter set required).
BuchiAutomaton remapAlphabet(const BuchiAutomaton& a, const Alphabet& target);

// L(a) ∩ L(b) via the two-phase Büchi product; co-Büchi inputs converted.
BuchiAutomaton intersect(const BuchiAutomaton& a, const BuchiAutomaton& b);
// L(a) ∪ L(b) as a nondeterministic union.
BuchiAutomaton unionAut(const BuchiAutomaton& a, const BuchiAutomaton& b);

// Σ^ω \ L(a). Rank-based construction with tight rankings; deterministic
// inputs take a direct two-copy path.
BuchiAutomaton complement(const BuchiAutomaton& a);

EmptinessResult isEmpty(const BuchiAutomaton& a);
InclusionResult includes(const BuchiAutomaton& a, const BuchiAutomaton& b);

// Smallest safety language containing L(a): live states read as a safety
// automaton completed with a single rejecting sink.
BuchiAutomaton safetyClosure(const BuchiAutomaton& a);

// Does L(a) contain infinitely many distinct words?
bool isInfinite(const BuchiAutomaton& a);
// Is L(a) \ L(b) infinite?
bool diffIsInfinite(const BuchiAutomaton& a, const BuchiAutomaton& b);

// Does some word admit infinitely many accepting runs?
bool hasInfinitelyAmbiguousWord(const BuchiAutomaton& a);

// Membership of a lasso word, decided by product simulation (both modes).
bool lassoAccepts(const BuchiAutomaton& a, const LassoWord& w);

} // namespace qlatk

#endif
