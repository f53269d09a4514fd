#ifndef QLATK_RATIONAL_HPP
#define QLATK_RATIONAL_HPP

#include <gmpxx.h>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace qlatk {

// Exact arbitrary-precision rational. Canonical form is maintained by GMP:
// gcd(num, den) = 1 and den > 0.
class Rational {
public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}
  Rational(long n, long d) : v_(n, d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // Parses "p", "-p" or "p/q". Decimal notation is rejected.
  static Rational parse(const std::string& s);

  const mpq_class& raw() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }

  bool isZero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  bool isInteger() const { return v_.get_den() == 1; }

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.isZero()) throw std::domain_error("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
  friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
  friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
  friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  Rational abs() const { return sign() < 0 ? -*this : *this; }
  Rational pow(unsigned long e) const;

  double toDouble() const { return v_.get_d(); }

  // Always prints as "p/q", including integers ("2/1").
  std::string str() const;
  // Prints "p" for integers, "p/q" otherwise.
  std::string strShort() const;

private:
  mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

// Value in the extended reals: a rational, +inf, or -inf.
class ExtValue {
public:
  enum class Kind { MinusInf, Finite, PlusInf };

  ExtValue() : kind_(Kind::Finite), v_() {}
  ExtValue(Rational r) : kind_(Kind::Finite), v_(std::move(r)) {}
  static ExtValue plusInf() { ExtValue e; e.kind_ = Kind::PlusInf; return e; }
  static ExtValue minusInf() { ExtValue e; e.kind_ = Kind::MinusInf; return e; }

  Kind kind() const { return kind_; }
  bool isFinite() const { return kind_ == Kind::Finite; }
  const Rational& finite() const {
    if (!isFinite()) throw std::logic_error("ExtValue: not finite");
    return v_;
  }

  ExtValue operator-() const {
    switch (kind_) {
      case Kind::PlusInf: return minusInf();
      case Kind::MinusInf: return plusInf();
      default: return ExtValue(-v_);
    }
  }

  friend bool operator==(const ExtValue& a, const ExtValue& b) {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ != Kind::Finite || a.v_ == b.v_;
  }
  friend bool operator!=(const ExtValue& a, const ExtValue& b) { return !(a == b); }
  friend bool operator<(const ExtValue& a, const ExtValue& b) {
    if (a.kind_ == b.kind_) return a.kind_ == Kind::Finite && a.v_ < b.v_;
    if (a.kind_ == Kind::MinusInf) return true;
    if (b.kind_ == Kind::PlusInf) return true;
    return false;
  }
  friend bool operator<=(const ExtValue& a, const ExtValue& b) { return a < b || a == b; }
  friend bool operator>(const ExtValue& a, const ExtValue& b) { return b < a; }
  friend bool operator>=(const ExtValue& a, const ExtValue& b) { return b <= a; }

  std::string str() const;

private:
  Kind kind_;
  Rational v_;
};

std::ostream& operator<<(std::ostream& os, const ExtValue& v);

inline ExtValue maxValue(const ExtValue& a, const ExtValue& b) { return a < b ? b : a; }
inline ExtValue minValue(const ExtValue& a, const ExtValue& b) { return a < b ? a : b; }

} // namespace qlatk

#endif
