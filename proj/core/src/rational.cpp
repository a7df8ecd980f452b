#include "tempsep/rational.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>

#include "tempsep/error.hpp"

namespace tempsep {

namespace {

Rational parse_decimal(std::string_view text) {
  std::string digits;
  long exponent = 0;
  bool negative = false;
  bool seen_point = false;
  bool seen_digit = false;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) {
    throw Error(ErrorKind::kInvalidArgument, "not a number: '" + std::string(text) + "'");
  }
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') {
      throw Error(ErrorKind::kInvalidArgument, "not a number: '" + std::string(text) + "'");
    }
    const std::string tail(text.substr(pos + 1));
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tail.empty() || used != tail.size()) {
      throw Error(ErrorKind::kInvalidArgument, "bad exponent in '" + std::string(text) + "'");
    }
    exponent += e;
  }
  mpz_class mantissa(digits, 10);
  Rational value(mantissa);
  value *= pow(Rational(10), exponent);
  if (negative) value = -value;
  return value;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

}  // namespace

Rational parse_rational(std::string_view raw) {
  const std::string text = trim(raw);
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  const Rational num = parse_decimal(trim(std::string_view(text).substr(0, slash)));
  const Rational den = parse_decimal(trim(std::string_view(text).substr(slash + 1)));
  if (den == 0) throw Error(ErrorKind::kInvalidArgument, "zero denominator in '" + text + "'");
  Rational out = num / den;
  out.canonicalize();
  return out;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::kInvalidArgument, "non-finite value cannot be made exact");
  }
  Rational out;
  mpq_set_d(out.get_mpq_t(), value);
  return out;
}

double to_double(const Rational& value) { return value.get_d(); }

long double to_long_double(const Rational& value) {
  // mpq_get_d truncates to double; go through mpf for the extra bits.
  mpf_class f(value, 128);
  long exp = 0;
  const double mant = mpf_get_d_2exp(&exp, f.get_mpf_t());
  mpf_class rest = f;
  // Recover the low bits that did not fit into the double mantissa.
  mpf_class hi(0, 128);
  mpf_set_d(hi.get_mpf_t(), mant);
  if (exp >= 0) {
    mpf_mul_2exp(hi.get_mpf_t(), hi.get_mpf_t(), static_cast<mp_bitcnt_t>(exp));
  } else {
    mpf_div_2exp(hi.get_mpf_t(), hi.get_mpf_t(), static_cast<mp_bitcnt_t>(-exp));
  }
  rest -= hi;
  // Take the remainder relative to 2^exp so it stays in double range.
  if (exp >= 0) {
    mpf_div_2exp(rest.get_mpf_t(), rest.get_mpf_t(), static_cast<mp_bitcnt_t>(exp));
  } else {
    mpf_mul_2exp(rest.get_mpf_t(), rest.get_mpf_t(), static_cast<mp_bitcnt_t>(-exp));
  }
  return std::ldexp(static_cast<long double>(mant) + static_cast<long double>(rest.get_d()),
                    static_cast<int>(exp));
}

std::string to_exact_string(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  if (v.get_den() == 1) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

std::string to_scientific_string(const Rational& value, int digits) {
  digits = std::clamp(digits, 1, 17);
  if (value == 0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, 0.0);
    return buf;
  }
  // Scale into [1, 10) exactly, then round the mantissa in double.
  Rational mag = abs(value);
  long exp10 = static_cast<long>(std::floor(std::log10(to_long_double(mag))));
  Rational scaled = mag / pow(Rational(10), exp10);
  if (scaled >= 10) {
    scaled /= 10;
    ++exp10;
  } else if (scaled < 1) {
    scaled *= 10;
    --exp10;
  }
  // Round half up on the exact mantissa.
  Rational shifted = scaled * pow(Rational(10), digits - 1) + Rational(1, 2);
  mpz_class mantissa;
  mpz_fdiv_q(mantissa.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  std::string text = mantissa.get_str();
  if (static_cast<int>(text.size()) > digits) {
    text.pop_back();
    ++exp10;
  }
  std::string out = value < 0 ? "-" : "";
  out += text.substr(0, 1);
  if (digits > 1) out += "." + text.substr(1);
  char buf[32];
  std::snprintf(buf, sizeof buf, "e%s%02ld", exp10 < 0 ? "-" : "+", exp10 < 0 ? -exp10 : exp10);
  return out + buf;
}

bool is_integer(const Rational& value) {
  return mpz_divisible_p(value.get_num_mpz_t(), value.get_den_mpz_t()) != 0;
}

Rational pow(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base == 0) throw Error(ErrorKind::kInvalidArgument, "zero to a negative power");
    Rational inv = 1 / base;
    return pow(inv, -exponent);
  }
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  Rational out(num, den);
  out.canonicalize();
  return out;
}

}  // namespace tempsep
