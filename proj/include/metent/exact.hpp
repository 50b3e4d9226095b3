#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace metent {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// A positive or negative rational read from text without rounding.
/// Accepted: integers, decimals with optional exponent ("0.01", "1e-3"),
/// fractions ("1/25") and integer powers ("2^-96", "4^-3/25").
struct ExactNumber {
  Rational value;
  std::string text;

  double to_double() const;
  /// Natural log, accurate for magnitudes far outside double range.
  double log() const;
};

ExactNumber parse_exact(const std::string& text);

/// Exact rational equal to a finite double.
Rational exact_from_double(double x);

std::string to_string(const Rational& r);

/// Natural log of a positive big integer.
double log_bigint(const BigInt& n);

}  // namespace metent
