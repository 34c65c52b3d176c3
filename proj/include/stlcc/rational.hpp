#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace stlcc {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "12", "-3.25", "1e-3", "2.5E+2" or "7/3" exactly; nullopt otherwise.
std::optional<Rational> parse_rational(std::string_view text);

/// "p" or "p/q" in lowest terms.
std::string to_string(const Rational& r);

/// Finite decimal expansion when the denominator is 2^a 5^b, else "p/q".
std::string to_decimal_string(const Rational& r);

double to_double(const Rational& r);

/// The exact binary value of a finite double.
Rational rational_from_double(double x);

/// r^k for any integer k; throws std::domain_error for 0^k with k < 0.
Rational pow(const Rational& r, int k);

inline int sign(const Rational& r) { return r.sign(); }

}  // namespace stlcc
