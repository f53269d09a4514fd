#ifndef QLATK_MODEL_HPP
#define QLATK_MODEL_HPP

#include "qlatk/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qlatk {

enum class RunAgg { Inf, Sup, LimInf, LimSup, LimInfAvg, LimSupAvg, DSum };
enum class WordAgg { Inf, Sup, LimInf, LimSup, E };
enum class LangAgg { Inf, Sup, LimInf, LimSup, E };

RunAgg dualOf(RunAgg f);
WordAgg dualOf(WordAgg g);
LangAgg dualOf(LangAgg h);

std::string aggName(RunAgg f);
std::string aggName(WordAgg g);
std::string aggName(LangAgg h);

std::optional<RunAgg> parseRunAgg(const std::string& s);
std::optional<WordAgg> parseWordAgg(const std::string& s);
std::optional<LangAgg> parseLangAgg(const std::string& s);

// Ordered letter set. Letter identity is the index into `letters`.
struct Alphabet {
  std::vector<std::string> letters;

  int size() const { return static_cast<int>(letters.size()); }
  int index(const std::string& l) const;  // -1 if unknown
  const std::string& name(int i) const { return letters[i]; }
  bool operator==(const Alphabet& o) const { return letters == o.letters; }
  // Same letter set regardless of declaration order.
  bool sameLetters(const Alphabet& o) const;
};

struct WltsEdge {
  Rational weight;
  Rational prob;
  int target = 0;
};

// Complete weighted labeled probabilistic transition system. The
// nondeterministic reading is the support of the per-(state,letter)
// distributions.
struct Wlts {
  Alphabet alphabet;
  std::vector<std::string> stateNames;
  std::vector<Rational> initial;  // distribution over states
  // edges[state][letter] -> outgoing transitions
  std::vector<std::vector<std::vector<WltsEdge>>> edges;

  int numStates() const { return static_cast<int>(stateNames.size()); }
  std::vector<int> initialSupport() const;
  std::vector<Rational> weightSet() const;  // sorted ascending, deduplicated
  bool isDeterministic() const;
};

struct Violation {
  int state = -1;
  int letter = -1;
  std::string message;
};

// Diagnostics for completeness and probability-sum invariants.
std::vector<Violation> validate(const Wlts& t);

// Copy of the system with all weights negated.
Wlts dual(const Wlts& t);

struct QwaSpec {
  WordAgg g = WordAgg::Sup;
  RunAgg f = RunAgg::LimSup;
  std::optional<Rational> lambda;  // present iff f == DSum, in (0,1)
  Wlts system;
};

std::vector<Violation> validate(const QwaSpec& a);
QwaSpec dualQwa(const QwaSpec& a);

struct QlaSpec {
  LangAgg h = LangAgg::Sup;
  QwaSpec qwa;
};

QlaSpec dualQla(const QlaSpec& a);

enum class AcceptanceMode { Buchi, CoBuchi };

struct BuchiAutomaton {
  Alphabet alphabet;
  int numStates = 0;
  std::vector<int> initial;                       // state set
  std::vector<std::vector<std::vector<int>>> edges;  // [state][letter] -> targets
  std::vector<bool> accepting;
  AcceptanceMode mode = AcceptanceMode::Buchi;

  bool isComplete() const;
  bool isDeterministic() const;
  int countStates() const { return numStates; }
};

// Adds a non-accepting absorbing sink for every missing (state, letter) pair.
// The language is unchanged in both modes: in Buchi mode the sink is never
// accepting; in CoBuchi mode runs trapped in the sink visit a rejecting state
// forever.
BuchiAutomaton completeBuchi(const BuchiAutomaton& a);

struct McEdge {
  int letter = 0;
  Rational prob;
  int target = 0;
};

struct MarkovChain {
  Alphabet alphabet;
  std::vector<std::string> stateNames;
  std::vector<Rational> initial;
  std::vector<std::vector<McEdge>> edges;  // [state] -> outgoing

  int numStates() const { return static_cast<int>(stateNames.size()); }
};

std::vector<Violation> validate(const MarkovChain& m);

struct LassoWord {
  std::vector<std::string> prefix;
  std::vector<std::string> period;  // nonempty

  std::string str() const;
};

enum class UnsupportedReason { Undecidable, OpenHard };

// Result of an evaluation or decision: an exact value, a yes/no answer, or a
// structured refusal naming the undecidable/open cell it falls into.
struct EvalOutcome {
  enum class Kind { Value, Decision, Unsupported };
  Kind kind = Kind::Value;
  ExtValue value;
  bool decision = false;
  UnsupportedReason reason = UnsupportedReason::Undecidable;
  std::string citation;

  static EvalOutcome mkValue(ExtValue v) {
    EvalOutcome o;
    o.kind = Kind::Value;
    o.value = std::move(v);
    return o;
  }
  static EvalOutcome mkDecision(bool d) {
    EvalOutcome o;
    o.kind = Kind::Decision;
    o.decision = d;
    return o;
  }
  static EvalOutcome unsupported(UnsupportedReason r, std::string tag) {
    EvalOutcome o;
    o.kind = Kind::Unsupported;
    o.reason = r;
    o.citation = std::move(tag);
    return o;
  }

  bool isValue() const { return kind == Kind::Value; }
  bool isDecision() const { return kind == Kind::Decision; }
  bool isUnsupported() const { return kind == Kind::Unsupported; }
  std::string str() const;
};

class CapExceeded : public std::runtime_error {
public:
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Construction size cap; overridable via QLATK_STATE_CAP.
std::size_t stateCap();
void checkCap(std::size_t n, const char* where);

} // namespace qlatk

#endif
