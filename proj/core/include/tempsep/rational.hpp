#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tempsep {

// Exact rational scalar used for all symbolic coefficient arithmetic.
using Rational = mpq_class;

// Parses "3", "-3/2", "1.5", "2.5e-3" into an exact rational. Decimal input is
// converted digit-for-digit, so "0.1" becomes 1/10 rather than the nearest double.
Rational parse_rational(std::string_view text);

// Exact conversion of a finite double (every double is a dyadic rational).
Rational rational_from_double(double value);

double to_double(const Rational& value);
long double to_long_double(const Rational& value);

// "num/den" in lowest terms; integers print without the "/1".
std::string to_exact_string(const Rational& value);

// Scientific notation with `digits` significant digits, e.g. "1.59423e+63".
// Rounding is done in extended precision so magnitudes beyond double range are safe.
std::string to_scientific_string(const Rational& value, int digits);

// True when the rational is an integer.
bool is_integer(const Rational& value);

// Integer power of a rational; negative exponents invert.
Rational pow(const Rational& base, long exponent);

}  // namespace tempsep
