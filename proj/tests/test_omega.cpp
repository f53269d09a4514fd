#include "doctest.h"
#include "qlatk/io.hpp"
#include "qlatk/omega.hpp"
#include "support/gen.hpp"

using namespace qlatk;
using testgen::lasso;

namespace {
BuchiAutomaton load(const std::string& name) {
  return loadBuchi(std::string(QLATK_DATA_DIR) + "/" + name);
}
const Alphabet kAb = testgen::abAlphabet();
} // namespace

TEST_CASE("lasso membership by product simulation") {
  BuchiAutomaton infB = load("sigma-star-b-omega.ba");
  CHECK(lassoAccepts(infB, lasso("; b")));
  CHECK(lassoAccepts(infB, lasso("; a b")));
  CHECK(lassoAccepts(infB, lasso("a a ; b a")));
  CHECK(!lassoAccepts(infB, lasso("b ; a")));
  BuchiAutomaton ab = load("a-star-b-omega.ba");
  CHECK(lassoAccepts(ab, lasso("a a ; b")));
  CHECK(!lassoAccepts(ab, lasso("; a b")));
}

TEST_CASE("intersection implements the two-phase product") {
  BuchiAutomaton infB = load("sigma-star-b-omega.ba");
  BuchiAutomaton all = universalAutomaton(kAb);
  BuchiAutomaton i1 = intersect(infB, all);
  CHECK(i1.numStates <= 2 * (infB.numStates + 1) * (all.numStates + 1));
  CHECK(lassoAccepts(i1, lasso("; b")));
  CHECK(!lassoAccepts(i1, lasso("; a")));

  // eventually-all-b meets eventually-all-a: empty
  BuchiAutomaton ab = load("a-star-b-omega.ba");
  BuchiAutomaton ba;
  {
    ba = ab;
    // swap letters by remapping an alphabet with b first
    Alphabet s;
    s.letters = {"b", "a"};
    ba.alphabet = s;  // now reads b*a^ω
  }
  CHECK(isEmpty(intersect(ab, ba)).empty);

  testgen::Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    BuchiAutomaton a = testgen::randomBuchi(rng, 3);
    BuchiAutomaton self = intersect(a, a);
    for (int j = 0; j < 50; ++j) {
      LassoWord w = testgen::randomLasso(rng, 2, 3);
      CHECK(lassoAccepts(self, w) == lassoAccepts(a, w));
    }
  }
}

TEST_CASE("emptiness with lasso witnesses") {
  CHECK(isEmpty(emptyAutomaton(kAb)).empty);
  auto r = isEmpty(load("a-star-b-omega.ba"));
  REQUIRE(!r.empty);
  REQUIRE(r.witness.has_value());
  CHECK(lassoAccepts(load("a-star-b-omega.ba"), r.witness->word));
  CHECK(r.witness->word.period == std::vector<std::string>{"b"});
}

TEST_CASE("complement of the universal language is empty and vice versa") {
  CHECK(isEmpty(complement(universalAutomaton(kAb))).empty);
  BuchiAutomaton ce = complement(emptyAutomaton(kAb));
  CHECK(lassoAccepts(ce, lasso("; a")));
  CHECK(lassoAccepts(ce, lasso("; b")));
  CHECK(lassoAccepts(ce, lasso("a b ; b a")));
}

TEST_CASE("complement of infinitely-many-b is eventually-all-a") {
  BuchiAutomaton c = complement(load("sigma-star-b-omega.ba"));
  CHECK(lassoAccepts(c, lasso("; a")));
  CHECK(lassoAccepts(c, lasso("b b ; a")));
  CHECK(!lassoAccepts(c, lasso("; a b")));
  CHECK(!lassoAccepts(c, lasso("; b")));
}

TEST_CASE("complement inverts lasso membership on random automata") {
  testgen::Rng rng(31337);
  for (int i = 0; i < 40; ++i) {
    BuchiAutomaton a = testgen::randomBuchi(rng, 1 + rng.below(4));
    BuchiAutomaton c = complement(a);
    for (int j = 0; j < 50; ++j) {
      LassoWord w = testgen::randomLasso(rng, 2, 3);
      bool inA = lassoAccepts(a, w);
      bool inC = lassoAccepts(c, w);
      REQUIRE_MESSAGE(inA != inC, "word " << w.str() << " automaton " << i);
    }
    // double complement preserves membership
    BuchiAutomaton cc = complement(c);
    for (int j = 0; j < 20; ++j) {
      LassoWord w = testgen::randomLasso(rng, 2, 3);
      CHECK(lassoAccepts(cc, w) == lassoAccepts(a, w));
    }
  }
}

TEST_CASE("inclusion via complementation") {
  BuchiAutomaton infB = load("sigma-star-b-omega.ba");
  CHECK(includes(infB, universalAutomaton(kAb)).included);
  auto r = includes(universalAutomaton(kAb), infB);
  REQUIRE(!r.included);
  REQUIRE(r.counterexample.has_value());
  CHECK(!lassoAccepts(infB, r.counterexample->word));
  CHECK(includes(infB, infB).included);
}

TEST_CASE("safety closure trims to live states and adds a sink") {
  BuchiAutomaton infB = load("sigma-star-b-omega.ba");
  BuchiAutomaton cl = safetyClosure(infB);
  // closure over {a,b} is everything
  testgen::Rng rng(5);
  for (int j = 0; j < 30; ++j) CHECK(lassoAccepts(cl, testgen::randomLasso(rng, 2, 3)));

  // closure of a safety language is itself
  BuchiAutomaton aOnly;
  aOnly.alphabet = kAb;
  aOnly.numStates = 1;
  aOnly.initial = {0};
  aOnly.edges.assign(1, std::vector<std::vector<int>>(2));
  aOnly.edges[0][0].push_back(0);  // only a
  aOnly.accepting = {true};
  BuchiAutomaton cl2 = safetyClosure(aOnly);
  CHECK(lassoAccepts(cl2, lasso("; a")));
  CHECK(!lassoAccepts(cl2, lasso("; b")));
  CHECK(!lassoAccepts(cl2, lasso("a ; b")));

  CHECK(isEmpty(safetyClosure(emptyAutomaton(kAb))).empty);

  // L(a) subseteq closure; closure idempotent at the language level
  for (int i = 0; i < 15; ++i) {
    BuchiAutomaton a = testgen::randomBuchi(rng, 1 + rng.below(4));
    BuchiAutomaton c1 = safetyClosure(a);
    BuchiAutomaton c2 = safetyClosure(c1);
    for (int j = 0; j < 30; ++j) {
      LassoWord w = testgen::randomLasso(rng, 2, 3);
      if (lassoAccepts(a, w)) CHECK(lassoAccepts(c1, w));
      CHECK(lassoAccepts(c1, w) == lassoAccepts(c2, w));
    }
  }
}

TEST_CASE("language infiniteness") {
  CHECK(isInfinite(universalAutomaton(kAb)));
  CHECK(isInfinite(load("a-star-b-omega.ba")));
  CHECK(isInfinite(load("sigma-star-b-omega.ba")));

  // singleton a^ω
  CHECK(!isInfinite(lassoAutomaton(kAb, lasso("; a"))));
  CHECK(!isInfinite(lassoAutomaton(kAb, lasso("a b ; b a"))));
  CHECK(!isInfinite(emptyAutomaton(kAb)));

  // finite unions of lassos stay finite
  BuchiAutomaton two = unionAut(lassoAutomaton(kAb, lasso("; a")), lassoAutomaton(kAb, lasso("; b a")));
  CHECK(!isInfinite(two));
  BuchiAutomaton three = unionAut(two, lassoAutomaton(kAb, lasso("b b ; a b")));
  CHECK(!isInfinite(three));
  CHECK(isInfinite(unionAut(two, load("a-star-b-omega.ba"))));
}

TEST_CASE("difference infiniteness") {
  BuchiAutomaton all = universalAutomaton(kAb);
  BuchiAutomaton single = lassoAutomaton(kAb, lasso("; a"));
  CHECK(diffIsInfinite(all, single));
  CHECK(!diffIsInfinite(all, all));
  CHECK(!diffIsInfinite(load("a-star-b-omega.ba"), load("sigma-star-b-omega.ba")));
  // diff infinite implies not included
  CHECK(!includes(all, single).included);
}

TEST_CASE("infinite ambiguity detection") {
  // deterministic: never
  CHECK(!hasInfinitelyAmbiguousWord(load("sigma-star-b-omega.ba")));
  CHECK(!hasInfinitelyAmbiguousWord(load("a-star-b-omega.ba")));

  // two-copy construction: every accepted word has a run per jump point
  BuchiAutomaton a = load("sigma-star-b-omega.ba");
  BuchiAutomaton twoCopy;
  twoCopy.alphabet = a.alphabet;
  twoCopy.numStates = 2 * a.numStates;
  twoCopy.initial = a.initial;
  twoCopy.edges.assign(twoCopy.numStates, std::vector<std::vector<int>>(2));
  twoCopy.accepting.assign(twoCopy.numStates, false);
  for (int q = 0; q < a.numStates; ++q) {
    twoCopy.accepting[q] = a.accepting[q];
    twoCopy.accepting[a.numStates + q] = a.accepting[q];
    for (int l = 0; l < 2; ++l)
      for (int d : a.edges[q][l]) {
        twoCopy.edges[q][l].push_back(d);
        twoCopy.edges[q][l].push_back(a.numStates + d);
        twoCopy.edges[a.numStates + q][l].push_back(a.numStates + d);
      }
  }
  CHECK(hasInfinitelyAmbiguousWord(twoCopy));

  // unambiguous automaton for a*b^ω stays negative
  CHECK(!hasInfinitelyAmbiguousWord(load("a-star-b-omega.ba")));
}
