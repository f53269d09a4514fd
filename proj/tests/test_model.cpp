#include "doctest.h"
#include "qlatk/io.hpp"
#include "qlatk/model.hpp"

#include <fstream>
#include <sstream>

using namespace qlatk;

namespace {
Wlts load(const std::string& name) { return loadWlts(std::string(QLATK_DATA_DIR) + "/" + name); }
} // namespace

TEST_CASE("validate accepts the shipped systems") {
  for (const char* f : {"up.qwa", "sim.qwa", "sta.qwa", "com.qwa", "ab01.qwa", "prop9.qwa"}) {
    Wlts t = load(f);
    CHECK_MESSAGE(validate(t).empty(), f);
  }
}

TEST_CASE("validate flags probability sums and incompleteness") {
  std::istringstream bad1(
      "alphabet a\nstate q\ninitial q\ntrans q a 0 1/2 q\ntrans q a 0 1/3 q\n");
  Wlts t1 = parseWlts(bad1, "bad1");
  auto v1 = validate(t1);
  REQUIRE(!v1.empty());
  CHECK(v1.front().message.find("sum") != std::string::npos);

  std::istringstream bad2("alphabet a b\nstate q\ninitial q\ntrans q a 0 1/1 q\n");
  Wlts t2 = parseWlts(bad2, "bad2");
  auto v2 = validate(t2);
  REQUIRE(!v2.empty());
  CHECK(v2.front().message.find("incomplete") != std::string::npos);
  CHECK(v2.front().letter == 1);
}

TEST_CASE("dual negates weights and is an involution") {
  Wlts up = load("up.qwa");
  Wlts d = dual(up);
  CHECK(d.edges[0][0][0].weight == Rational(-1));
  CHECK(d.edges[0][1][0].weight == Rational(0));
  CHECK(d.edges[0][0][0].prob == up.edges[0][0][0].prob);
  Wlts dd = dual(d);
  CHECK(dd.edges[0][0][0].weight == up.edges[0][0][0].weight);

  Wlts com = load("com.qwa");
  Wlts dc = dual(com);
  bool sawMinus5 = false;
  for (const auto& per : dc.edges)
    for (const auto& slot : per)
      for (const auto& e : slot) sawMinus5 = sawMinus5 || e.weight == Rational(-5);
  CHECK(sawMinus5);
}

TEST_CASE("dualQla swaps aggregators and dualizes the system") {
  QlaSpec s;
  s.h = LangAgg::Sup;
  s.qwa.g = WordAgg::Sup;
  s.qwa.f = RunAgg::LimInfAvg;
  s.qwa.system = load("up.qwa");
  QlaSpec d = dualQla(s);
  CHECK(d.h == LangAgg::Inf);
  CHECK(d.qwa.g == WordAgg::Inf);
  CHECK(d.qwa.f == RunAgg::LimSupAvg);

  QlaSpec e;
  e.h = LangAgg::E;
  e.qwa.g = WordAgg::E;
  e.qwa.f = RunAgg::DSum;
  e.qwa.lambda = Rational(1, 2);
  e.qwa.system = load("up.qwa");
  QlaSpec de = dualQla(e);
  CHECK(de.h == LangAgg::E);
  CHECK(de.qwa.g == WordAgg::E);
  CHECK(de.qwa.f == RunAgg::DSum);

  QlaSpec dd = dualQla(dualQla(s));
  CHECK(dd.h == s.h);
  CHECK(dd.qwa.g == s.qwa.g);
  CHECK(dd.qwa.f == s.qwa.f);
  CHECK(dd.qwa.system.edges[0][0][0].weight == s.qwa.system.edges[0][0][0].weight);
}

TEST_CASE("completeBuchi adds an absorbing rejecting sink") {
  BuchiAutomaton a = loadBuchi(std::string(QLATK_DATA_DIR) + "/a-star-b-omega.ba");
  CHECK(!a.isComplete());
  BuchiAutomaton c = completeBuchi(a);
  CHECK(c.isComplete());
  CHECK(c.numStates == a.numStates + 1);
  CHECK(!c.accepting[c.numStates - 1]);

  BuchiAutomaton already = completeBuchi(c);
  CHECK(already.numStates == c.numStates);
}

TEST_CASE("initial distribution defaults to uniform over declared initials") {
  Wlts sta = load("sta.qwa");
  int support = 0;
  for (const auto& p : sta.initial)
    if (!p.isZero()) {
      CHECK(p == Rational(1, 3));
      ++support;
    }
  CHECK(support == 3);
}

TEST_CASE("lasso literals parse") {
  LassoWord w = parseLasso("on ; on off");
  CHECK(w.prefix == std::vector<std::string>{"on"});
  CHECK(w.period == std::vector<std::string>{"on", "off"});
  LassoWord v = parseLasso("; l r");
  CHECK(v.prefix.empty());
  CHECK(v.period.size() == 2);
  CHECK_THROWS_AS(parseLasso("a b"), ParseError);
  CHECK_THROWS_AS(parseLasso("a ;"), ParseError);
}

TEST_CASE("wlts writer round-trips") {
  Wlts com = load("com.qwa");
  std::istringstream in(writeWlts(com));
  Wlts back = parseWlts(in, "back");
  CHECK(back.numStates() == com.numStates());
  CHECK(back.weightSet() == com.weightSet());
  CHECK(validate(back).empty());
}
