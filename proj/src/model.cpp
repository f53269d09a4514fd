#include "qlatk/model.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace qlatk {

RunAgg dualOf(RunAgg f) {
  switch (f) {
    case RunAgg::Inf: return RunAgg::Sup;
    case RunAgg::Sup: return RunAgg::Inf;
    case RunAgg::LimInf: return RunAgg::LimSup;
    case RunAgg::LimSup: return RunAgg::LimInf;
    case RunAgg::LimInfAvg: return RunAgg::LimSupAvg;
    case RunAgg::LimSupAvg: return RunAgg::LimInfAvg;
    case RunAgg::DSum: return RunAgg::DSum;
  }
  return f;
}

WordAgg dualOf(WordAgg g) {
  switch (g) {
    case WordAgg::Inf: return WordAgg::Sup;
    case WordAgg::Sup: return WordAgg::Inf;
    case WordAgg::LimInf: return WordAgg::LimSup;
    case WordAgg::LimSup: return WordAgg::LimInf;
    case WordAgg::E: return WordAgg::E;
  }
  return g;
}

LangAgg dualOf(LangAgg h) {
  switch (h) {
    case LangAgg::Inf: return LangAgg::Sup;
    case LangAgg::Sup: return LangAgg::Inf;
    case LangAgg::LimInf: return LangAgg::LimSup;
    case LangAgg::LimSup: return LangAgg::LimInf;
    case LangAgg::E: return LangAgg::E;
  }
  return h;
}

std::string aggName(RunAgg f) {
  switch (f) {
    case RunAgg::Inf: return "inf";
    case RunAgg::Sup: return "sup";
    case RunAgg::LimInf: return "liminf";
    case RunAgg::LimSup: return "limsup";
    case RunAgg::LimInfAvg: return "liminfavg";
    case RunAgg::LimSupAvg: return "limsupavg";
    case RunAgg::DSum: return "dsum";
  }
  return "?";
}

std::string aggName(WordAgg g) {
  switch (g) {
    case WordAgg::Inf: return "inf";
    case WordAgg::Sup: return "sup";
    case WordAgg::LimInf: return "liminf";
    case WordAgg::LimSup: return "limsup";
    case WordAgg::E: return "exp";
  }
  return "?";
}

std::string aggName(LangAgg h) {
  switch (h) {
    case LangAgg::Inf: return "inf";
    case LangAgg::Sup: return "sup";
    case LangAgg::LimInf: return "liminf";
    case LangAgg::LimSup: return "limsup";
    case LangAgg::E: return "exp";
  }
  return "?";
}

std::optional<RunAgg> parseRunAgg(const std::string& s) {
  if (s == "inf") return RunAgg::Inf;
  if (s == "sup") return RunAgg::Sup;
  if (s == "liminf") return RunAgg::LimInf;
  if (s == "limsup") return RunAgg::LimSup;
  if (s == "liminfavg") return RunAgg::LimInfAvg;
  if (s == "limsupavg") return RunAgg::LimSupAvg;
  if (s == "dsum") return RunAgg::DSum;
  return std::nullopt;
}

std::optional<WordAgg> parseWordAgg(const std::string& s) {
  if (s == "inf") return WordAgg::Inf;
  if (s == "sup") return WordAgg::Sup;
  if (s == "liminf") return WordAgg::LimInf;
  if (s == "limsup") return WordAgg::LimSup;
  if (s == "exp") return WordAgg::E;
  return std::nullopt;
}

std::optional<LangAgg> parseLangAgg(const std::string& s) {
  if (s == "inf") return LangAgg::Inf;
  if (s == "sup") return LangAgg::Sup;
  if (s == "liminf") return LangAgg::LimInf;
  if (s == "limsup") return LangAgg::LimSup;
  if (s == "exp") return LangAgg::E;
  return std::nullopt;
}

int Alphabet::index(const std::string& l) const {
  for (int i = 0; i < size(); ++i)
    if (letters[i] == l) return i;
  return -1;
}

bool Alphabet::sameLetters(const Alphabet& o) const {
  if (size() != o.size()) return false;
  for (const auto& l : letters)
    if (o.index(l) < 0) return false;
  return true;
}

std::vector<int> Wlts::initialSupport() const {
  std::vector<int> r;
  for (int q = 0; q < numStates(); ++q)
    if (!initial[q].isZero()) r.push_back(q);
  return r;
}

std::vector<Rational> Wlts::weightSet() const {
  std::vector<Rational> ws;
  for (const auto& perState : edges)
    for (const auto& perLetter : perState)
      for (const auto& e : perLetter) ws.push_back(e.weight);
  std::sort(ws.begin(), ws.end());
  ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
  return ws;
}

bool Wlts::isDeterministic() const {
  if (initialSupport().size() != 1) return false;
  for (const auto& perState : edges)
    for (const auto& perLetter : perState)
      if (perLetter.size() != 1) return false;
  return true;
}

std::vector<Violation> validate(const Wlts& t) {
  std::vector<Violation> out;
  Rational one(1);
  Rational initSum;
  for (const auto& p : t.initial) {
    if (p.sign() < 0) out.push_back({-1, -1, "negative initial probability"});
    initSum += p;
  }
  if (initSum != one) out.push_back({-1, -1, "initial probabilities sum to " + initSum.str()});
  for (int q = 0; q < t.numStates(); ++q) {
    for (int a = 0; a < t.alphabet.size(); ++a) {
      const auto& es = t.edges[q][a];
      if (es.empty()) {
        out.push_back({q, a, "incomplete: no transition on (" + t.stateNames[q] + ", " +
                                 t.alphabet.name(a) + ")"});
        continue;
      }
      Rational sum;
      for (const auto& e : es) {
        if (e.prob.sign() <= 0)
          out.push_back({q, a, "non-positive transition probability at (" + t.stateNames[q] +
                                   ", " + t.alphabet.name(a) + ")"});
        if (e.target < 0 || e.target >= t.numStates())
          out.push_back({q, a, "transition target out of range"});
        sum += e.prob;
      }
      if (sum != one)
        out.push_back({q, a, "probabilities at (" + t.stateNames[q] + ", " + t.alphabet.name(a) +
                                 ") sum to " + sum.str()});
    }
  }
  return out;
}

Wlts dual(const Wlts& t) {
  Wlts d = t;
  for (auto& perState : d.edges)
    for (auto& perLetter : perState)
      for (auto& e : perLetter) e.weight = -e.weight;
  return d;
}

std::vector<Violation> validate(const QwaSpec& a) {
  auto out = validate(a.system);
  if (a.f == RunAgg::DSum) {
    if (!a.lambda)
      out.push_back({-1, -1, "DSum requires a discount factor"});
    else if (!(*a.lambda > Rational(0) && *a.lambda < Rational(1)))
      out.push_back({-1, -1, "discount factor must lie in (0,1)"});
  } else if (a.lambda) {
    out.push_back({-1, -1, "discount factor given but run aggregator is not DSum"});
  }
  return out;
}

QwaSpec dualQwa(const QwaSpec& a) {
  QwaSpec d;
  d.g = dualOf(a.g);
  d.f = dualOf(a.f);
  d.lambda = a.lambda;
  d.system = dual(a.system);
  return d;
}

QlaSpec dualQla(const QlaSpec& a) {
  QlaSpec d;
  d.h = dualOf(a.h);
  d.qwa = dualQwa(a.qwa);
  return d;
}

bool BuchiAutomaton::isComplete() const {
  for (int q = 0; q < numStates; ++q)
    for (int a = 0; a < alphabet.size(); ++a)
      if (edges[q][a].empty()) return false;
  return true;
}

bool BuchiAutomaton::isDeterministic() const {
  if (initial.size() != 1) return false;
  for (int q = 0; q < numStates; ++q)
    for (int a = 0; a < alphabet.size(); ++a)
      if (edges[q][a].size() > 1) return false;
  return true;
}

BuchiAutomaton completeBuchi(const BuchiAutomaton& a) {
  bool needSink = !a.isComplete() || a.initial.empty();
  if (!needSink) return a;
  BuchiAutomaton c = a;
  int sink = c.numStates;
  c.numStates += 1;
  c.edges.emplace_back(c.alphabet.size());
  c.accepting.push_back(false);
  for (int q = 0; q < c.numStates; ++q)
    for (int l = 0; l < c.alphabet.size(); ++l)
      if (c.edges[q][l].empty()) c.edges[q][l].push_back(sink);
  if (c.initial.empty()) c.initial.push_back(sink);
  return c;
}

std::vector<Violation> validate(const MarkovChain& m) {
  std::vector<Violation> out;
  Rational one(1);
  Rational initSum;
  for (const auto& p : m.initial) {
    if (p.sign() < 0) out.push_back({-1, -1, "negative initial probability"});
    initSum += p;
  }
  if (initSum != one) out.push_back({-1, -1, "initial probabilities sum to " + initSum.str()});
  for (int q = 0; q < m.numStates(); ++q) {
    Rational sum;
    for (const auto& e : m.edges[q]) {
      if (e.prob.sign() <= 0) out.push_back({q, e.letter, "non-positive transition probability"});
      if (e.target < 0 || e.target >= m.numStates())
        out.push_back({q, e.letter, "transition target out of range"});
      sum += e.prob;
    }
    if (sum != one)
      out.push_back({q, -1, "outgoing probabilities at " + m.stateNames[q] + " sum to " + sum.str()});
  }
  return out;
}

std::string LassoWord::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < prefix.size(); ++i) os << prefix[i] << " ";
  os << ";";
  for (std::size_t i = 0; i < period.size(); ++i) os << " " << period[i];
  return os.str();
}

std::string EvalOutcome::str() const {
  switch (kind) {
    case Kind::Value: return "VALUE " + value.str();
    case Kind::Decision: return decision ? "YES" : "NO";
    case Kind::Unsupported:
      return std::string("UNSUPPORTED ") +
             (reason == UnsupportedReason::Undecidable ? "UNDECIDABLE" : "OPEN_HARD") + " " +
             citation;
  }
  return "?";
}

std::size_t stateCap() {
  static std::size_t cap = [] {
    if (const char* env = std::getenv("QLATK_STATE_CAP")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(400000);
  }();
  return cap;
}

void checkCap(std::size_t n, const char* where) {
  if (n > stateCap())
    throw CapExceeded(std::string(where) + ": state count " + std::to_string(n) +
                      " exceeds cap " + std::to_string(stateCap()) +
                      " (set QLATK_STATE_CAP to raise)");
}

} // namespace qlatk
