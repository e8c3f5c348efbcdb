#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace loopmaps {

// Exact arithmetic substrate. Map counts are integers and the fixed-point
// series must match enumeration oracles coefficient by coefficient, so all
// series coefficients are arbitrary-precision rationals kept in lowest terms
// with positive denominator (cpp_rational maintains that canonical form).
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

inline Rational rat(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

// Exact conversion: every finite double is a dyadic rational.
inline Rational rat_from_double(double x) { return Rational(x); }

BigInt factorial(unsigned n);
BigInt binomial(unsigned n, unsigned k);

std::string to_string(const Rational& r);

}  // namespace loopmaps
