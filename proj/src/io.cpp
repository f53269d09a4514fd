#include "qlatk/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace qlatk {

namespace {

struct Line {
  std::string keyword;
  std::vector<std::string> args;
  int number = 0;
};

std::vector<Line> tokenize(std::istream& in, const std::string& name) {
  std::vector<Line> lines;
  std::string raw;
  int num = 0;
  while (std::getline(in, raw)) {
    ++num;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line line;
    line.number = num;
    if (!(ls >> line.keyword)) continue;
    std::string tok;
    while (ls >> tok) line.args.push_back(tok);
    lines.push_back(std::move(line));
  }
  if (lines.empty()) throw ParseError(name + ": empty input");
  return lines;
}

[[noreturn]] void fail(const std::string& name, const Line& l, const std::string& msg) {
  throw ParseError(name + ":" + std::to_string(l.number) + ": " + msg);
}

int stateIndex(std::map<std::string, int>& idx, std::vector<std::string>& names,
               const std::string& s, bool create) {
  auto it = idx.find(s);
  if (it != idx.end()) return it->second;
  if (!create) return -1;
  int i = static_cast<int>(names.size());
  idx[s] = i;
  names.push_back(s);
  return i;
}

bool looksLikeRational(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i >= s.size()) return false;
  bool digit = false;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      digit = true;
    } else if (s[i] == '/') {
      // denominator part must be digits only
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
      return digit && i + 1 < s.size();
    } else {
      return false;
    }
  }
  return digit;
}

} // namespace

Wlts parseWlts(std::istream& in, const std::string& name) {
  auto lines = tokenize(in, name);
  Wlts t;
  std::map<std::string, int> stateIdx;
  struct RawTrans {
    int src, letter, dst;
    Rational weight;
    std::optional<Rational> prob;
    Line line;
  };
  std::vector<RawTrans> raw;
  std::vector<std::pair<int, std::optional<Rational>>> initials;

  for (const auto& l : lines) {
    if (l.keyword == "alphabet") {
      for (const auto& a : l.args) {
        if (t.alphabet.index(a) >= 0) fail(name, l, "duplicate letter " + a);
        t.alphabet.letters.push_back(a);
      }
    } else if (l.keyword == "state") {
      for (const auto& s : l.args) stateIndex(stateIdx, t.stateNames, s, true);
    } else if (l.keyword == "initial") {
      if (l.args.empty()) fail(name, l, "initial needs a state");
      int q = stateIndex(stateIdx, t.stateNames, l.args[0], false);
      if (q < 0) fail(name, l, "unknown state " + l.args[0]);
      std::optional<Rational> p;
      if (l.args.size() >= 2) p = Rational::parse(l.args[1]);
      initials.emplace_back(q, p);
    } else if (l.keyword == "trans") {
      // trans SRC LETTER WEIGHT [PROB] DST
      if (l.args.size() != 4 && l.args.size() != 5) fail(name, l, "trans needs 4 or 5 arguments");
      RawTrans r;
      r.line = l;
      r.src = stateIndex(stateIdx, t.stateNames, l.args[0], false);
      if (r.src < 0) fail(name, l, "unknown state " + l.args[0]);
      r.letter = t.alphabet.index(l.args[1]);
      if (r.letter < 0) fail(name, l, "unknown letter " + l.args[1]);
      r.weight = Rational::parse(l.args[2]);
      const std::string& dstTok = l.args.back();
      if (l.args.size() == 5) r.prob = Rational::parse(l.args[3]);
      r.dst = stateIndex(stateIdx, t.stateNames, dstTok, false);
      if (r.dst < 0) fail(name, l, "unknown state " + dstTok);
      raw.push_back(std::move(r));
    } else {
      fail(name, l, "unknown keyword " + l.keyword);
    }
  }

  if (t.alphabet.size() == 0) throw ParseError(name + ": no alphabet");
  if (t.stateNames.empty()) throw ParseError(name + ": no states");

  t.initial.assign(t.numStates(), Rational(0));
  if (initials.empty()) throw ParseError(name + ": no initial state");
  bool anyInitProb = false, allInitProb = true;
  for (const auto& [q, p] : initials)
    if (p)
      anyInitProb = true;
    else
      allInitProb = false;
  if (anyInitProb && !allInitProb)
    throw ParseError(name + ": initial probabilities must be given for all or none");
  for (const auto& [q, p] : initials)
    t.initial[q] += p ? *p : Rational(1, static_cast<long>(initials.size()));

  t.edges.assign(t.numStates(), std::vector<std::vector<WltsEdge>>(t.alphabet.size()));
  // Group per (src, letter) for the uniform-probability fill.
  std::map<std::pair<int, int>, std::vector<const RawTrans*>> groups;
  for (const auto& r : raw) groups[{r.src, r.letter}].push_back(&r);
  for (auto& [key, grp] : groups) {
    bool any = false, all = true;
    for (auto* r : grp) {
      if (r->prob)
        any = true;
      else
        all = false;
    }
    if (any && !all)
      fail(name, grp.front()->line, "mixed explicit and omitted probabilities in one group");
    for (auto* r : grp) {
      WltsEdge e;
      e.weight = r->weight;
      e.prob = r->prob ? *r->prob : Rational(1, static_cast<long>(grp.size()));
      e.target = r->dst;
      t.edges[key.first][key.second].push_back(e);
    }
  }
  return t;
}

BuchiAutomaton parseBuchi(std::istream& in, const std::string& name) {
  auto lines = tokenize(in, name);
  BuchiAutomaton a;
  std::map<std::string, int> stateIdx;
  std::vector<std::string> stateNames;
  std::vector<std::tuple<int, int, int>> trans;
  std::vector<int> accepting;

  for (const auto& l : lines) {
    if (l.keyword == "alphabet") {
      for (const auto& s : l.args) {
        if (a.alphabet.index(s) >= 0) fail(name, l, "duplicate letter " + s);
        a.alphabet.letters.push_back(s);
      }
    } else if (l.keyword == "state") {
      for (const auto& s : l.args) stateIndex(stateIdx, stateNames, s, true);
    } else if (l.keyword == "initial") {
      for (const auto& s : l.args) {
        int q = stateIndex(stateIdx, stateNames, s, false);
        if (q < 0) fail(name, l, "unknown state " + s);
        a.initial.push_back(q);
      }
    } else if (l.keyword == "accepting") {
      for (const auto& s : l.args) {
        int q = stateIndex(stateIdx, stateNames, s, false);
        if (q < 0) fail(name, l, "unknown state " + s);
        accepting.push_back(q);
      }
    } else if (l.keyword == "mode") {
      if (l.args.size() != 1) fail(name, l, "mode needs one argument");
      if (l.args[0] == "buchi")
        a.mode = AcceptanceMode::Buchi;
      else if (l.args[0] == "cobuchi")
        a.mode = AcceptanceMode::CoBuchi;
      else
        fail(name, l, "mode must be buchi or cobuchi");
    } else if (l.keyword == "trans") {
      if (l.args.size() != 3) fail(name, l, "trans needs SRC LETTER DST");
      int src = stateIndex(stateIdx, stateNames, l.args[0], false);
      if (src < 0) fail(name, l, "unknown state " + l.args[0]);
      int letter = a.alphabet.index(l.args[1]);
      if (letter < 0) fail(name, l, "unknown letter " + l.args[1]);
      int dst = stateIndex(stateIdx, stateNames, l.args[2], false);
      if (dst < 0) fail(name, l, "unknown state " + l.args[2]);
      trans.emplace_back(src, letter, dst);
    } else {
      fail(name, l, "unknown keyword " + l.keyword);
    }
  }
  if (a.alphabet.size() == 0) throw ParseError(name + ": no alphabet");
  a.numStates = static_cast<int>(stateNames.size());
  a.edges.assign(a.numStates, std::vector<std::vector<int>>(a.alphabet.size()));
  a.accepting.assign(a.numStates, false);
  for (auto [s, l, d] : trans) a.edges[s][l].push_back(d);
  for (int q : accepting) a.accepting[q] = true;
  if (a.initial.empty()) throw ParseError(name + ": no initial state");
  return a;
}

MarkovChain parseMarkovChain(std::istream& in, const std::string& name) {
  auto lines = tokenize(in, name);
  MarkovChain m;
  std::map<std::string, int> stateIdx;
  std::vector<std::tuple<int, std::string, Rational, int>> trans;
  std::vector<std::pair<int, Rational>> initials;

  for (const auto& l : lines) {
    if (l.keyword == "state") {
      for (const auto& s : l.args) stateIndex(stateIdx, m.stateNames, s, true);
    } else if (l.keyword == "initial") {
      if (l.args.size() != 2) fail(name, l, "initial needs STATE PROB");
      int q = stateIndex(stateIdx, m.stateNames, l.args[0], false);
      if (q < 0) fail(name, l, "unknown state " + l.args[0]);
      initials.emplace_back(q, Rational::parse(l.args[1]));
    } else if (l.keyword == "trans") {
      if (l.args.size() != 4) fail(name, l, "trans needs SRC LETTER PROB DST");
      int src = stateIndex(stateIdx, m.stateNames, l.args[0], false);
      if (src < 0) fail(name, l, "unknown state " + l.args[0]);
      int dst = stateIndex(stateIdx, m.stateNames, l.args[3], false);
      if (dst < 0) fail(name, l, "unknown state " + l.args[3]);
      trans.emplace_back(src, l.args[1], Rational::parse(l.args[2]), dst);
    } else if (l.keyword == "alphabet") {
      for (const auto& s : l.args) {
        if (m.alphabet.index(s) >= 0) fail(name, l, "duplicate letter " + s);
        m.alphabet.letters.push_back(s);
      }
    } else {
      fail(name, l, "unknown keyword " + l.keyword);
    }
  }
  if (m.stateNames.empty()) throw ParseError(name + ": no states");
  for (const auto& [src, letter, p, dst] : trans)
    if (m.alphabet.index(letter) < 0) m.alphabet.letters.push_back(letter);
  m.initial.assign(m.numStates(), Rational(0));
  for (const auto& [q, p] : initials) m.initial[q] += p;
  m.edges.assign(m.numStates(), {});
  for (const auto& [src, letter, p, dst] : trans) {
    McEdge e;
    e.letter = m.alphabet.index(letter);
    e.prob = p;
    e.target = dst;
    m.edges[src].push_back(e);
  }
  return m;
}

namespace {
template <class T, class F>
T loadFile(const std::string& path, F parse) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  return parse(in, path);
}
} // namespace

Wlts loadWlts(const std::string& path) {
  return loadFile<Wlts>(path, [](std::istream& in, const std::string& n) { return parseWlts(in, n); });
}
BuchiAutomaton loadBuchi(const std::string& path) {
  return loadFile<BuchiAutomaton>(
      path, [](std::istream& in, const std::string& n) { return parseBuchi(in, n); });
}
MarkovChain loadMarkovChain(const std::string& path) {
  return loadFile<MarkovChain>(
      path, [](std::istream& in, const std::string& n) { return parseMarkovChain(in, n); });
}

std::string writeWlts(const Wlts& t) {
  std::ostringstream os;
  os << "alphabet";
  for (const auto& l : t.alphabet.letters) os << " " << l;
  os << "\nstate";
  for (const auto& s : t.stateNames) os << " " << s;
  os << "\n";
  for (int q = 0; q < t.numStates(); ++q)
    if (!t.initial[q].isZero()) os << "initial " << t.stateNames[q] << " " << t.initial[q].str() << "\n";
  for (int q = 0; q < t.numStates(); ++q)
    for (int a = 0; a < t.alphabet.size(); ++a)
      for (const auto& e : t.edges[q][a])
        os << "trans " << t.stateNames[q] << " " << t.alphabet.name(a) << " " << e.weight.str()
           << " " << e.prob.str() << " " << t.stateNames[e.target] << "\n";
  return os.str();
}

std::string writeBuchi(const BuchiAutomaton& a) {
  std::ostringstream os;
  os << "alphabet";
  for (const auto& l : a.alphabet.letters) os << " " << l;
  os << "\nstate";
  for (int q = 0; q < a.numStates; ++q) os << " s" << q;
  os << "\ninitial";
  for (int q : a.initial) os << " s" << q;
  os << "\naccepting";
  for (int q = 0; q < a.numStates; ++q)
    if (a.accepting[q]) os << " s" << q;
  os << "\nmode " << (a.mode == AcceptanceMode::Buchi ? "buchi" : "cobuchi") << "\n";
  for (int q = 0; q < a.numStates; ++q)
    for (int l = 0; l < a.alphabet.size(); ++l)
      for (int d : a.edges[q][l])
        os << "trans s" << q << " " << a.alphabet.name(l) << " s" << d << "\n";
  return os.str();
}

LassoWord parseLasso(const std::string& text) {
  auto semi = text.find(';');
  if (semi == std::string::npos) throw ParseError("lasso word needs 'u ; v' form");
  LassoWord w;
  {
    std::istringstream ps(text.substr(0, semi));
    std::string tok;
    while (ps >> tok) w.prefix.push_back(tok);
  }
  {
    std::istringstream vs(text.substr(semi + 1));
    std::string tok;
    while (vs >> tok) w.period.push_back(tok);
  }
  if (w.period.empty()) throw ParseError("lasso word needs a nonempty period");
  return w;
}

} // namespace qlatk
