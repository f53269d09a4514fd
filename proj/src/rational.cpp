#include "qlatk/rational.hpp"

#include <ostream>

namespace qlatk {

Rational Rational::parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");
  if (s.find('.') != std::string::npos)
    throw std::invalid_argument("Rational::parse: decimal notation rejected: " + s);
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      mpq_class q(s, 10);
      q.canonicalize();
      return Rational(q);
    }
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (num.empty() || den.empty())
      throw std::invalid_argument("Rational::parse: malformed fraction: " + s);
    mpq_class q(num + "/" + den, 10);
    if (q.get_den() == 0) throw std::invalid_argument("Rational::parse: zero denominator: " + s);
    q.canonicalize();
    return Rational(q);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("Rational::parse: not a rational: " + s);
  }
}

Rational Rational::pow(unsigned long e) const {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), v_.get_num().get_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), v_.get_den().get_mpz_t(), e);
  return Rational(mpq_class(num) / mpq_class(den));
}

std::string Rational::str() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string Rational::strShort() const {
  if (isInteger()) return v_.get_num().get_str();
  return str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

std::string ExtValue::str() const {
  switch (kind_) {
    case Kind::PlusInf: return "inf";
    case Kind::MinusInf: return "-inf";
    default: return v_.str();
  }
}

std::ostream& operator<<(std::ostream& os, const ExtValue& v) { return os << v.str(); }

} // namespace qlatk
