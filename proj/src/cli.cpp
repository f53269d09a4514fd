#include "qlatk/cli.hpp"

#include "qlatk/io.hpp"
#include "qlatk/oracle.hpp"
#include "qlatk/prob.hpp"
#include "qlatk/qla.hpp"
#include "qlatk/qwa.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace qlatk {

namespace {

const char* kUsage =
    "usage: qlatk <command> [flags]\n"
    "  eval      --aut F.qwa --h H --g G --f F [--lambda p/q] --lang B.ba\n"
    "  eval-mc   --aut F.qwa --h exp --g G --f F [--lambda p/q] --mc M.mc\n"
    "  nonempty  --aut F.qwa --h H --g G --f F [--lambda p/q] --k p/q [--strict]\n"
    "            [--restriction any|finite]\n"
    "  universal (same flags as nonempty)\n"
    "  top|bot   --aut F.qwa --h H --g G --f F [--lambda p/q]\n"
    "  include   --lhs-aut A.qwa --lhs-h H --lhs-g G --lhs-f F [--lhs-lambda p/q]\n"
    "            --rhs-aut B.qwa --rhs-h H --rhs-g G --rhs-f F [--rhs-lambda p/q] [--strict]\n"
    "  measure   --ba B.ba --mc M.mc\n"
    "  convert   --aut F.qwa --g G --f F [--lambda p/q] --op tolimitf|liftg|lowerg --out G.qwa\n"
    "  oracle eval-lasso --aut F.qwa [--g G] [--f F] [--lambda p/q] --word \"u ; v\"\n"
    "aggregators: h,g in {inf,sup,liminf,limsup,exp}; f in {inf,sup,liminf,limsup,\n"
    "liminfavg,limsupavg,dsum}; rationals are written p/q\n";

class UsageError : public std::runtime_error {
public:
  explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

struct Flags {
  std::map<std::string, std::string> kv;
  std::set<std::string> on;

  const std::string& need(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end()) throw UsageError("missing --" + k);
    return it->second;
  }
  std::string get(const std::string& k, const std::string& dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }
  bool has(const std::string& k) const { return kv.count(k) || on.count(k); }
};

Flags parseFlags(const std::vector<std::string>& args, std::size_t from) {
  static const std::set<std::string> boolFlags = {"strict"};
  Flags f;
  for (std::size_t i = from; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) throw UsageError("unexpected argument " + a);
    std::string key = a.substr(2);
    if (boolFlags.count(key)) {
      f.on.insert(key);
      continue;
    }
    if (i + 1 >= args.size()) throw UsageError("flag --" + key + " needs a value");
    f.kv[key] = args[++i];
  }
  return f;
}

QwaSpec specFromFlags(const Flags& f, const std::string& prefix = "") {
  QwaSpec a;
  a.system = loadWlts(f.need(prefix + "aut"));
  auto g = parseWordAgg(f.need(prefix + "g"));
  if (!g) throw UsageError("bad word aggregator");
  a.g = *g;
  auto fa = parseRunAgg(f.need(prefix + "f"));
  if (!fa) throw UsageError("bad run aggregator");
  a.f = *fa;
  if (f.has(prefix + "lambda")) a.lambda = Rational::parse(f.need(prefix + "lambda"));
  auto viol = validate(a);
  if (!viol.empty()) throw UsageError("invalid automaton: " + viol.front().message);
  return a;
}

LangAgg langAggFromFlags(const Flags& f, const std::string& key = "h") {
  auto h = parseLangAgg(f.need(key));
  if (!h) throw UsageError("bad language aggregator");
  return *h;
}

int emit(std::ostream& out, const EvalOutcome& o) {
  out << o.str() << "\n";
  return o.isUnsupported() ? 2 : 0;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << kUsage;
    return 1;
  }
  const std::string& cmd = args[0];

  if (cmd == "eval") {
    Flags f = parseFlags(args, 1);
    QlaSpec spec{langAggFromFlags(f), specFromFlags(f)};
    if (spec.h == LangAgg::E) throw UsageError("eval needs --h != exp (use eval-mc)");
    BuchiAutomaton lang = loadBuchi(f.need("lang"));
    return emit(out, evalRegular(spec, lang));
  }
  if (cmd == "eval-mc") {
    Flags f = parseFlags(args, 1);
    QlaSpec spec{langAggFromFlags(f), specFromFlags(f)};
    if (spec.h != LangAgg::E) throw UsageError("eval-mc needs --h exp");
    MarkovChain mc = loadMarkovChain(f.need("mc"));
    auto viol = validate(mc);
    if (!viol.empty()) throw UsageError("invalid Markov chain: " + viol.front().message);
    return emit(out, evalMarkov(spec, mc));
  }
  if (cmd == "nonempty" || cmd == "universal") {
    Flags f = parseFlags(args, 1);
    QlaSpec spec{langAggFromFlags(f), specFromFlags(f)};
    Rational k = Rational::parse(f.need("k"));
    ProblemVariant v;
    v.strict = f.has("strict");
    std::string restriction = f.get("restriction", "any");
    if (restriction != "any" && restriction != "finite")
      throw UsageError("--restriction must be any or finite");
    v.finiteState = restriction == "finite";
    auto o = cmd == "nonempty" ? decideNonemptiness(spec, k, v) : decideUniversality(spec, k, v);
    return emit(out, o);
  }
  if (cmd == "top" || cmd == "bot") {
    Flags f = parseFlags(args, 1);
    QlaSpec spec{langAggFromFlags(f), specFromFlags(f)};
    return emit(out, cmd == "top" ? qlaTop(spec) : qlaBot(spec));
  }
  if (cmd == "include") {
    Flags f = parseFlags(args, 1);
    QlaSpec lhs{langAggFromFlags(f, "lhs-h"), specFromFlags(f, "lhs-")};
    QlaSpec rhs{langAggFromFlags(f, "rhs-h"), specFromFlags(f, "rhs-")};
    auto r = qlaInclusion(lhs, rhs, f.has("strict"));
    return emit(out, r.outcome);
  }
  if (cmd == "measure") {
    Flags f = parseFlags(args, 1);
    BuchiAutomaton ba = loadBuchi(f.need("ba"));
    MarkovChain mc = loadMarkovChain(f.need("mc"));
    auto viol = validate(mc);
    if (!viol.empty()) throw UsageError("invalid Markov chain: " + viol.front().message);
    Rational mu = measureBuchi(ba, mc);
    out << "VALUE " << mu.str() << "\n";
    return 0;
  }
  if (cmd == "convert") {
    Flags f = parseFlags(args, 1);
    QwaSpec a = specFromFlags(f);
    const std::string op = f.need("op");
    QwaSpec r;
    if (op == "tolimitf")
      r = toLimitRunAggregator(a);
    else if (op == "liftg")
      r = liftWordAggToLimit(a);
    else if (op == "lowerg")
      r = lowerLimitWordAgg(a);
    else
      throw UsageError("--op must be tolimitf, liftg or lowerg");
    std::ofstream os(f.need("out"));
    if (!os) throw UsageError("cannot write " + f.need("out"));
    os << "# converted with op=" << op << "; g=" << aggName(r.g) << " f=" << aggName(r.f) << "\n";
    os << writeWlts(r.system);
    return 0;
  }
  if (cmd == "oracle") {
    if (args.size() < 2 || args[1] != "eval-lasso") throw UsageError("unknown oracle subcommand");
    Flags f = parseFlags(args, 2);
    QwaSpec a;
    a.system = loadWlts(f.need("aut"));
    auto g = parseWordAgg(f.get("g", "sup"));
    auto fa = parseRunAgg(f.get("f", "sup"));
    if (!g || !fa) throw UsageError("bad aggregator");
    a.g = *g;
    a.f = *fa;
    if (f.has("lambda")) a.lambda = Rational::parse(f.need("lambda"));
    LassoWord w = parseLasso(f.need("word"));
    ExtValue v = oracle::bruteEvalLasso(a, w);
    out << "VALUE " << v.str() << "\n";
    return 0;
  }
  err << kUsage;
  return 1;
}

} // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace qlatk
