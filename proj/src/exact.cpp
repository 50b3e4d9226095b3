#include "metent/exact.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "metent/errors.hpp"

namespace metent {

namespace {

BigInt pow10(unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational rational_pow(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  if (base == 0 && e < 0) throw ParameterError("zero raised to a negative power");
  Rational r(1);
  const unsigned long m = static_cast<unsigned long>(e < 0 ? -e : e);
  for (unsigned long i = 0; i < m; ++i) r *= base;
  return e < 0 ? Rational(1) / r : r;
}

// Decimal literal: [+-]digits[.digits][e[+-]digits]
Rational parse_decimal(const std::string& s) {
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  BigInt mant = 0;
  long scale = 0;
  bool any = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    mant = mant * 10 + (s[i++] - '0');
    any = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      mant = mant * 10 + (s[i++] - '0');
      --scale;
      any = true;
    }
  }
  if (!any) throw ParameterError("not a number: '" + s + "'");
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    long e = 0;
    bool edig = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      e = e * 10 + (s[i++] - '0');
      edig = true;
      if (e > 100000) throw ParameterError("exponent too large: '" + s + "'");
    }
    if (!edig) throw ParameterError("bad exponent: '" + s + "'");
    scale += eneg ? -e : e;
  }
  if (i != s.size()) throw ParameterError("not a number: '" + s + "'");
  Rational r(mant);
  if (scale > 0) r *= Rational(pow10(static_cast<unsigned>(scale)));
  if (scale < 0) r /= Rational(pow10(static_cast<unsigned>(-scale)));
  return neg ? -r : r;
}

// factor := decimal | decimal '^' integer
Rational parse_factor(const std::string& s) {
  const auto caret = s.find('^');
  if (caret == std::string::npos) return parse_decimal(s);
  const Rational base = parse_decimal(s.substr(0, caret));
  const std::string es = s.substr(caret + 1);
  std::size_t used = 0;
  long e = 0;
  try {
    e = std::stol(es, &used);
  } catch (const std::exception&) {
    throw ParameterError("bad power exponent in '" + s + "'");
  }
  if (used != es.size() || e > 100000 || e < -100000) throw ParameterError("bad power exponent in '" + s + "'");
  return rational_pow(base, e);
}

}  // namespace

ExactNumber parse_exact(const std::string& text) {
  if (text.empty()) throw ParameterError("empty number");
  const auto slash = text.find('/');
  Rational v;
  if (slash == std::string::npos) {
    v = parse_factor(text);
  } else {
    const Rational num = parse_factor(text.substr(0, slash));
    const Rational den = parse_factor(text.substr(slash + 1));
    if (den == 0) throw ParameterError("division by zero in '" + text + "'");
    v = num / den;
  }
  return ExactNumber{v, text};
}

double ExactNumber::to_double() const { return static_cast<double>(value); }

double log_bigint(const BigInt& n) {
  if (n <= 0) throw ParameterError("log of a non-positive integer");
  const std::size_t bits = boost::multiprecision::msb(n) + 1;
  if (bits <= 53) return std::log(static_cast<double>(n));
  const std::size_t shift = bits - 53;
  const BigInt top = n >> shift;
  return std::log(static_cast<double>(top)) + static_cast<double>(shift) * std::numbers::ln2;
}

double ExactNumber::log() const {
  if (value <= 0) throw ParameterError("log of a non-positive number '" + text + "'");
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  // Powers of two stay exact: log(2^-96) is -96 * ln 2 with one rounding.
  if (num == 1) {
    const std::size_t lsb = boost::multiprecision::lsb(den);
    if ((BigInt(1) << lsb) == den) return -static_cast<double>(lsb) * std::numbers::ln2;
  }
  if (den == 1) {
    const std::size_t lsb = boost::multiprecision::lsb(num);
    if ((BigInt(1) << lsb) == num) return static_cast<double>(lsb) * std::numbers::ln2;
  }
  return log_bigint(num) - log_bigint(den);
}

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw ParameterError("exact_from_double: non-finite value");
  int e = 0;
  const double m = std::frexp(x, &e);
  // m * 2^53 is an integer for every finite double.
  const auto mi = static_cast<long long>(std::ldexp(m, 53));
  Rational r(mi);
  const int shift = e - 53;
  if (shift > 0) r *= Rational(BigInt(1) << shift);
  if (shift < 0) r /= Rational(BigInt(1) << (-shift));
  return r;
}

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace metent
