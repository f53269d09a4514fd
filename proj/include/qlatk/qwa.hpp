#ifndef QLATK_QWA_HPP
#define QLATK_QWA_HPP

#include "qlatk/model.hpp"
#include "qlatk/omega.hpp"

namespace qlatk {

enum class ThresholdRel { Geq, Gt, Eq };

// Exact value of the QWA on an ultimately periodic word, for every
// aggregator combination (word aggregators Inf/Sup/LimInf/LimSup/E, all
// seven run aggregators).
ExtValue evalLasso(const QwaSpec& a, const LassoWord& w);

// Büchi automaton for { w | A(w) rel x }. Requires f in
// {Inf,Sup,LimInf,LimSup} and word aggregator Sup (callers dualize Inf).
// rel = Eq uses the two-copy/three-copy exact-value construction, which keeps
// a bijection between its accepting runs and the value-x runs of the system.
BuchiAutomaton thresholdAutomaton(const QwaSpec& a, const Rational& x, ThresholdRel rel);

// Supremum / infimum of the automaton over all infinite words. Returns a
// structured refusal for the undecidable/open combinations.
EvalOutcome topValue(const QwaSpec& a);
EvalOutcome bottomValue(const QwaSpec& a);

// Inf/Sup run aggregators to LimInf/LimSup by memorizing the extremal visited
// weight; value-equal with a run-for-run bijection.
QwaSpec toLimitRunAggregator(const QwaSpec& a);

// Sup/Inf word aggregator to LimSup/LimInf: two copies connected by
// nondeterministic jumps, giving every run infinitely many equal-valued
// copies.
QwaSpec liftWordAggToLimit(const QwaSpec& a);

// LimSup/LimInf word aggregator down to Sup/Inf for f in
// {Inf,Sup,LimInf,LimSup}: per-weight infinite-run automata combined by a
// nondeterministic union. Value-equal on lasso words.
QwaSpec lowerLimitWordAgg(const QwaSpec& a);

// Büchi automaton accepting every lasso word that admits infinitely many runs
// of value x. (Büchi output for both limit run aggregators.)
BuchiAutomaton infRunsAutomaton(const QwaSpec& a, const Rational& x);

// Does the lasso word admit infinitely many runs of value exactly x?
bool hasInfinitelyManyRuns(const QwaSpec& a, const Rational& x, const LassoWord& w);

} // namespace qlatk

#endif
