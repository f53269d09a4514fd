#include "doctest.h"
#include "qlatk/rational.hpp"

using namespace qlatk;

TEST_CASE("rational arithmetic is exact and canonical") {
  Rational a(1, 3), b(1, 6);
  CHECK((a + b) == Rational(1, 2));
  CHECK((a - b) == Rational(1, 6));
  CHECK((a * b) == Rational(1, 18));
  CHECK((a / b) == Rational(2));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(1, 2).str() == "1/2");
  CHECK(Rational(3).str() == "3/1");
  CHECK(Rational(1, 2).pow(3) == Rational(1, 8));
}

TEST_CASE("rational parsing accepts p/q and rejects decimals") {
  CHECK(Rational::parse("5") == Rational(5));
  CHECK(Rational::parse("-7/2") == Rational(-7, 2));
  CHECK(Rational::parse("9/10") == Rational(9, 10));
  CHECK_THROWS_AS(Rational::parse("0.5"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("x"), std::invalid_argument);
}

TEST_CASE("extended values order and negate") {
  ExtValue f(Rational(1, 2));
  CHECK(ExtValue::minusInf() < f);
  CHECK(f < ExtValue::plusInf());
  CHECK(-ExtValue::plusInf() == ExtValue::minusInf());
  CHECK((-f).finite() == Rational(-1, 2));
  CHECK(ExtValue::plusInf().str() == "inf");
  CHECK(ExtValue::minusInf().str() == "-inf");
}
