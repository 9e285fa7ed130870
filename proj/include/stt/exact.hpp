#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace stt {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
// High-precision float for log-domain work on quantities whose magnitude
// exceeds double range (schedule certification, tie escalation).
using BigFloat = boost::multiprecision::cpp_bin_float_100;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(const BigInt& n) { return n.convert_to<double>(); }
inline BigFloat to_bigfloat(const Rational& r) { return r.convert_to<BigFloat>(); }
inline BigFloat to_bigfloat(const BigInt& n) { return n.convert_to<BigFloat>(); }

inline Rational rational_pow(const Rational& base, std::uint64_t e) {
  Rational acc = 1, b = base;
  while (e) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

// Natural log of a positive rational, in the requested precision.
inline BigFloat log_bigfloat(const Rational& r) {
  if (r <= 0) throw std::domain_error("log of non-positive rational");
  return log(to_bigfloat(r));
}
inline double log_rational(const Rational& r) { return log_bigfloat(r).convert_to<double>(); }

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}
inline BigInt ceil_div(const BigInt& a, const BigInt& b) { return -floor_div(-a, b); }

inline BigInt floor_rational(const Rational& r) {
  return floor_div(numerator(r), denominator(r));
}
inline BigInt ceil_rational(const Rational& r) {
  return ceil_div(numerator(r), denominator(r));
}

// floor(sqrt(n)) for n >= 0.
inline BigInt isqrt(const BigInt& n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  return sqrt(n);
}
inline std::int64_t isqrt_i64(std::int64_t n) {
  return isqrt(BigInt(n)).convert_to<std::int64_t>();
}
inline std::int64_t ceil_sqrt_i64(std::int64_t n) {
  std::int64_t s = isqrt_i64(n);
  return s * s == n ? s : s + 1;
}

// Doubles are dyadic rationals; this conversion is exact.
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite double");
  int exp = 0;
  double mant = std::frexp(v, &exp);  // v = mant * 2^exp, |mant| in [0.5, 1)
  std::int64_t m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r(m, 1);
  if (exp > 0)
    r *= rational_pow(Rational(2), static_cast<std::uint64_t>(exp));
  else if (exp < 0)
    r /= rational_pow(Rational(2), static_cast<std::uint64_t>(-exp));
  return r;
}

// Exact parse of "p/q", "-3", "0.25", "2.5e-3" style literals.
inline Rational parse_rational(const std::string& text) {
  std::string s = text;
  auto fail = [&] { throw std::invalid_argument("cannot parse rational: '" + text + "'"); };
  if (s.empty()) fail();
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den == 0) fail();
    return Rational(num, den);
  }
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');
  std::string digits;
  std::int64_t frac_digits = 0, exponent = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      digits += c;
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.') {
      if (seen_dot) fail();
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      if (!seen_digit) fail();
      exponent = std::stoll(s.substr(i + 1));
      break;
    } else {
      fail();
    }
  }
  if (!seen_digit) fail();
  // cpp_int would read a leading zero as an octal prefix.
  std::size_t nz = digits.find_first_not_of('0');
  digits = nz == std::string::npos ? "0" : digits.substr(nz);
  Rational r(BigInt(digits), 1);
  std::int64_t pow10 = exponent - frac_digits;
  if (pow10 > 0)
    r *= rational_pow(Rational(10), static_cast<std::uint64_t>(pow10));
  else if (pow10 < 0)
    r /= rational_pow(Rational(10), static_cast<std::uint64_t>(-pow10));
  return neg ? -r : r;
}

// "p/q" for non-integers, plain integer string otherwise.
inline std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace stt
