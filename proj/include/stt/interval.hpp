#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stt/exact.hpp"

namespace stt {

// Closed double interval with outward rounding after every arithmetic step.
// One ulp outward per operation; enough for the enclosure contracts here,
// which never chain more than a few thousand operations.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  explicit Interval(double v) : lo(v), hi(v) {}
  Interval(double l, double h) : lo(l), hi(h) {
    if (!(l <= h)) throw std::invalid_argument("interval bounds out of order");
  }

  static Interval outward(double l, double h) {
    return Interval(step_down(l), step_up(h));
  }
  static Interval from_rational(const Rational& r) {
    double v = to_double(r);
    return outward(v, v);
  }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

  static double step_up(double v) {
    return std::nextafter(v, std::numeric_limits<double>::infinity());
  }
  static double step_down(double v) {
    return std::nextafter(v, -std::numeric_limits<double>::infinity());
  }
};

inline Interval operator+(const Interval& a, const Interval& b) {
  return Interval::outward(a.lo + b.lo, a.hi + b.hi);
}
inline Interval operator-(const Interval& a, const Interval& b) {
  return Interval::outward(a.lo - b.hi, a.hi - b.lo);
}
inline Interval operator*(const Interval& a, const Interval& b) {
  double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return Interval::outward(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
}
inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo <= 0.0 && 0.0 <= b.hi) throw std::domain_error("interval division by zero");
  double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
  return Interval::outward(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
}

inline Interval abs(const Interval& a) {
  if (a.lo >= 0) return a;
  if (a.hi <= 0) return Interval(-a.hi, -a.lo);
  return Interval(0.0, std::max(-a.lo, a.hi));
}

inline Interval log(const Interval& a) {
  if (a.lo <= 0) throw std::domain_error("interval log of non-positive");
  return Interval::outward(std::log(a.lo), std::log(a.hi));
}
inline Interval exp(const Interval& a) {
  return Interval::outward(std::exp(a.lo), std::exp(a.hi));
}
// a^e for positive a, real exponent.
inline Interval pow(const Interval& a, double e) {
  if (a.lo <= 0) throw std::domain_error("interval pow of non-positive base");
  double p = std::pow(a.lo, e), q = std::pow(a.hi, e);
  return Interval::outward(std::min(p, q), std::max(p, q));
}

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

}  // namespace stt
