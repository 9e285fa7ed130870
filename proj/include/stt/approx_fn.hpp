#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stt/exact.hpp"

namespace stt {

// r with log(p) = r * log(q), when p and q are commensurable powers
// (p^k == q^j for small integers); exact bigint verification.
inline std::optional<Rational> exact_log_ratio(const Rational& p, const Rational& q) {
  if (!(p > 0) || !(q > 0) || q == 1) return std::nullopt;
  if (p == 1) return Rational(0);
  if (p == q) return Rational(1);
  for (int k = 1; k <= 64; ++k) {
    Rational pk = rational_pow(p, k);
    Rational qj = 1;
    for (int j = 1; j <= 64; ++j) {
      qj *= q;
      if (pk == qj) return Rational(j, k);
      // inverse relation p^k == q^{-j}
      if (pk * qj == 1) return Rational(-j, k);
    }
  }
  return std::nullopt;
}

// Exponential decay rate, either exactly coeff*log(base) (base rational > 1),
// a plain real, or infinite. The exact form is what lets downstream code
// decide critical cases without floating ties.
struct AlphaForm {
  enum class Kind { exact_log, real, infinite };
  Kind kind = Kind::real;
  Rational coeff;  // exact_log: alpha = coeff * log(base)
  Rational base;
  double real_value = 0.0;

  static AlphaForm exact(Rational coeff_, Rational base_) {
    if (!(base_ > 1)) throw std::invalid_argument("alpha log base must exceed 1");
    if (coeff_ < 0) throw std::invalid_argument("alpha must be >= 0");
    AlphaForm a;
    a.kind = Kind::exact_log;
    a.coeff = std::move(coeff_);
    a.base = std::move(base_);
    return a;
  }
  static AlphaForm from_real(double v) {
    if (v < 0) throw std::invalid_argument("alpha must be >= 0");
    AlphaForm a;
    a.kind = Kind::real;
    a.real_value = v;
    return a;
  }
  static AlphaForm inf() {
    AlphaForm a;
    a.kind = Kind::infinite;
    return a;
  }

  bool is_infinite() const { return kind == Kind::infinite; }
  bool is_exact() const { return kind == Kind::exact_log; }
  bool is_zero() const {
    return (kind == Kind::exact_log && coeff == 0) || (kind == Kind::real && real_value == 0.0);
  }

  double value() const {
    switch (kind) {
      case Kind::exact_log: return to_double(coeff) * log_rational(base);
      case Kind::real: return real_value;
      case Kind::infinite: return std::numeric_limits<double>::infinity();
    }
    return 0;
  }
  BigFloat value_bigfloat() const {
    if (kind == Kind::exact_log) return to_bigfloat(coeff) * log_bigfloat(base);
    if (kind == Kind::real) return BigFloat(real_value);
    throw std::domain_error("infinite rate has no value");
  }

  // r with alpha = r * log(g), if commensurable.
  std::optional<Rational> ratio_to_log(const Rational& g) const {
    if (kind != Kind::exact_log) return std::nullopt;
    if (coeff == 0) return Rational(0);
    auto r = exact_log_ratio(base, g);
    if (!r) return std::nullopt;
    return coeff * *r;
  }

  // "r*log(p/q)" / "log(p/q)" / plain rational / "inf"
  static AlphaForm parse(const std::string& text) {
    if (text == "inf" || text == "infinity") return inf();
    auto lp = text.find("log(");
    if (lp != std::string::npos) {
      auto rp = text.rfind(')');
      if (rp == std::string::npos || rp < lp) throw std::invalid_argument("bad rate literal");
      Rational base = parse_rational(text.substr(lp + 4, rp - lp - 4));
      Rational coeff = 1;
      if (lp > 0) {
        std::string head = text.substr(0, lp);
        if (!head.empty() && head.back() == '*') head.pop_back();
        if (!head.empty()) coeff = parse_rational(head);
      }
      return exact(coeff, base);
    }
    Rational r = parse_rational(text);
    // A rational literal gives a plain real rate: e^{-alpha} is transcendental,
    // so no exactness is gained by keeping it rational.
    return from_real(to_double(r));
  }

  std::string str() const {
    switch (kind) {
      case Kind::exact_log:
        return format_rational(coeff) + "*log(" + format_rational(base) + ")";
      case Kind::real: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", real_value);
        return buf;
      }
      case Kind::infinite: return "inf";
    }
    return "";
  }
};

// Polynomial exponent parameter: a plain rational, a plain real, or
// coeff * log(num) / log(den). The log form combines exactly with log-form
// Hill-Velani exponents.
struct BetaForm {
  enum class Kind { rational_v, log_ratio_v, real_v };
  Kind kind = Kind::rational_v;
  Rational plain;        // plain rational beta
  Rational coeff, num, den;
  double real_value = 0;

  static BetaForm rational(Rational b) {
    if (b < 0) throw std::invalid_argument("beta must be >= 0");
    BetaForm f;
    f.plain = std::move(b);
    return f;
  }
  static BetaForm log_ratio(Rational coeff_, Rational num_, Rational den_) {
    if (!(num_ > 1) || !(den_ > 1)) throw std::invalid_argument("log bases must exceed 1");
    BetaForm f;
    f.kind = Kind::log_ratio_v;
    f.coeff = std::move(coeff_);
    f.num = std::move(num_);
    f.den = std::move(den_);
    return f;
  }
  static BetaForm from_real(double v) {
    if (v < 0) throw std::invalid_argument("beta must be >= 0");
    BetaForm f;
    f.kind = Kind::real_v;
    f.real_value = v;
    return f;
  }

  bool is_log_ratio_form() const { return kind == Kind::log_ratio_v; }
  bool is_zero() const { return kind == Kind::rational_v && plain == 0; }

  double value() const {
    switch (kind) {
      case Kind::rational_v: return to_double(plain);
      case Kind::log_ratio_v:
        return to_double(coeff) * log_rational(num) / log_rational(den);
      case Kind::real_v: return real_value;
    }
    return 0;
  }
  BigFloat value_bigfloat() const {
    switch (kind) {
      case Kind::rational_v: return to_bigfloat(plain);
      case Kind::log_ratio_v:
        return to_bigfloat(coeff) * log_bigfloat(num) / log_bigfloat(den);
      case Kind::real_v: return BigFloat(real_value);
    }
    return BigFloat(0);
  }
};

struct ShrinkRate {
  bool unbounded = false;
  bool heuristic = false;  // table-derived estimates are never exact
  double value = 0.0;
  std::optional<AlphaForm> exact_form;
};

// Approximating function psi: either the parametric family
// psi(n) = c * n^{-beta} * exp(-alpha n) or a finite monotone table.
// Table entries are exact rationals indexed from n = 1.
class ApproxFn {
 public:
  enum class Family { exp_poly, table };

  static ApproxFn exp_poly(Rational c, BetaForm beta, AlphaForm alpha) {
    if (!(c > 0)) throw std::invalid_argument("c must be positive");
    ApproxFn f;
    f.family_ = Family::exp_poly;
    f.c_ = std::move(c);
    f.beta_ = std::move(beta);
    f.alpha_ = std::move(alpha);
    return f;
  }
  static ApproxFn pure_exponential(AlphaForm alpha, Rational c = 1) {
    return exp_poly(std::move(c), BetaForm::rational(0), std::move(alpha));
  }
  static ApproxFn from_table(std::vector<Rational> values) {
    if (values.empty()) throw std::invalid_argument("empty table");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] >= 0)) throw std::invalid_argument("table entries must be >= 0");
      if (i && values[i] > values[i - 1])
        throw std::invalid_argument("table must be monotone decreasing");
    }
    ApproxFn f;
    f.family_ = Family::table;
    f.table_ = std::move(values);
    return f;
  }

  Family family() const { return family_; }
  bool is_table() const { return family_ == Family::table; }
  const Rational& c() const { return c_; }
  const BetaForm& beta() const { return beta_; }
  const AlphaForm& alpha() const { return alpha_; }
  const std::vector<Rational>& table() const { return table_; }
  std::size_t table_size() const { return table_.size(); }

  // log psi(n). For exp_poly, n = 0 with beta > 0 is treated as +infinity
  // (monotone extension); rho() then takes its clamp path.
  double log_at(std::int64_t n) const {
    if (family_ == Family::table) {
      const Rational& v = table_value(n);
      if (v == 0) return -std::numeric_limits<double>::infinity();
      return log_rational(v);
    }
    if (alpha_.is_infinite()) throw std::domain_error("psi with infinite rate has no pointwise form");
    double lc = log_rational(c_);
    if (n == 0) return beta_.is_zero() ? lc : std::numeric_limits<double>::infinity();
    return lc - beta_.value() * std::log(static_cast<double>(n)) - alpha_.value() * n;
  }

  BigFloat log_at_bigfloat(const BigInt& n) const {
    if (family_ == Family::table) return BigFloat(log_at(n.convert_to<std::int64_t>()));
    if (alpha_.is_infinite()) throw std::domain_error("psi with infinite rate has no pointwise form");
    BigFloat lc = log_bigfloat(c_);
    if (n == 0) return beta_.is_zero() ? lc : BigFloat(std::numeric_limits<double>::infinity());
    return lc - beta_.value_bigfloat() * log(to_bigfloat(n)) - alpha_.value_bigfloat() * to_bigfloat(n);
  }

  const Rational& table_value(std::int64_t n) const {
    if (family_ != Family::table) throw std::logic_error("not a table");
    if (n < 1 || n > static_cast<std::int64_t>(table_.size()))
      throw std::out_of_range("psi table queried past its end");
    return table_[static_cast<std::size_t>(n - 1)];
  }

  double value_at(std::int64_t n) const {
    if (family_ == Family::table) return to_double(table_value(n));
    return std::exp(log_at(n));
  }

  // liminf of -log psi(n) / n. Exact for the parametric family; a flagged
  // tail-window estimate for tables, with a growth heuristic for
  // super-exponential data.
  ShrinkRate shrinking_rate() const {
    ShrinkRate r;
    if (family_ == Family::exp_poly) {
      if (alpha_.is_infinite()) {
        r.unbounded = true;
        r.value = std::numeric_limits<double>::infinity();
        return r;
      }
      r.value = alpha_.value();
      r.exact_form = alpha_;
      return r;
    }
    r.heuristic = true;
    std::size_t len = table_.size();
    std::size_t begin = std::max<std::size_t>(1, len / 2);
    double vmin = std::numeric_limits<double>::infinity();
    double vfirst = 0, vlast = 0;
    bool increasing = true, first = true;
    double prev = 0;
    for (std::size_t n = begin; n <= len; ++n) {
      if (table_[n - 1] == 0) {
        r.unbounded = true;
        r.value = std::numeric_limits<double>::infinity();
        return r;
      }
      double v = -log_rational(table_[n - 1]) / static_cast<double>(n);
      vmin = std::min(vmin, v);
      if (first) {
        vfirst = v;
        first = false;
      } else if (v <= prev) {
        increasing = false;
      }
      prev = v;
      vlast = v;
    }
    if (increasing && len >= 4 && vlast >= 1.5 * std::max(vfirst, 1e-300)) {
      r.unbounded = true;
      r.value = std::numeric_limits<double>::infinity();
      return r;
    }
    r.value = vmin;
    return r;
  }

 private:
  Family family_ = Family::exp_poly;
  Rational c_ = 1;
  BetaForm beta_ = BetaForm::rational(0);
  AlphaForm alpha_ = AlphaForm::from_real(0);
  std::vector<Rational> table_;
};

}  // namespace stt
