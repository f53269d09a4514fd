#ifndef QLATK_QLA_HPP
#define QLATK_QLA_HPP

#include "qlatk/model.hpp"
#include "qlatk/omega.hpp"

namespace qlatk {

enum class ProblemKind { EvalNonProb, EvalProb, Nonemptiness, Universality };
enum class OutcomeClass { Algorithm, Undecidable, OpenHard };

// Decidability routing per aggregator cell; the checked-in table is asserted
// against this function.
OutcomeClass routeCell(ProblemKind problem, LangAgg h, WordAgg g, RunAgg f);

struct ProblemVariant {
  bool strict = false;       // > instead of >=
  bool finiteState = false;  // restrict generators to finite-state ones
};

// Value of A on the ω-regular language of `lang` (h != E).
EvalOutcome evalRegular(const QlaSpec& spec, const BuchiAutomaton& lang);

EvalOutcome qlaTop(const QlaSpec& spec);
EvalOutcome qlaBot(const QlaSpec& spec);

EvalOutcome decideNonemptiness(const QlaSpec& spec, const Rational& k, const ProblemVariant& v);
EvalOutcome decideUniversality(const QlaSpec& spec, const Rational& k, const ProblemVariant& v);

struct InclusionOutcome {
  EvalOutcome outcome;  // Decision or Unsupported
  std::optional<BuchiAutomaton> counterexample;  // language witnessing failure
};

// Does lhs(S) rel rhs(S) hold for every language S?
InclusionOutcome qlaInclusion(const QlaSpec& lhs, const QlaSpec& rhs, bool strict);

} // namespace qlatk

#endif
