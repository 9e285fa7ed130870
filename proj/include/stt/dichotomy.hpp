#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stt/approx_fn.hpp"
#include "stt/exact.hpp"
#include "stt/ifs.hpp"
#include "stt/thermo.hpp"
#include "stt/word.hpp"

namespace stt {

enum class Convergence {
  converges,
  diverges,
  heuristic_converges,
  heuristic_diverges,
  inconclusive,
};

enum class MeasureStatement {
  zero,
  full,
  dimension_below_s,
  dimension_above_s,
};

inline const char* to_string(Convergence c) {
  switch (c) {
    case Convergence::converges: return "converges";
    case Convergence::diverges: return "diverges";
    case Convergence::heuristic_converges: return "heuristic_converges";
    case Convergence::heuristic_diverges: return "heuristic_diverges";
    case Convergence::inconclusive: return "inconclusive";
  }
  return "";
}
inline const char* to_string(MeasureStatement m) {
  switch (m) {
    case MeasureStatement::zero: return "zero";
    case MeasureStatement::full: return "full";
    case MeasureStatement::dimension_below_s: return "dimension_below_s";
    case MeasureStatement::dimension_above_s: return "dimension_above_s";
  }
  return "";
}

struct Verdict {
  double s = 0;
  double alpha = 0;
  bool alpha_infinite = false;
  double dim_w = 0;
  Convergence convergence = Convergence::inconclusive;
  MeasureStatement measure = MeasureStatement::zero;
  bool heuristic = false;
  std::string critical_series;  // human-readable description of the decided series
  std::string provenance;       // how convergence was decided
  std::vector<double> partial_sums;  // table mode: trajectory of partial sums
  std::optional<std::string> ball_restriction;  // cylinder word confining the ball
};

// One term of the critical series: psi(n)^s * (sum_i a_i^s)^n, evaluated in
// the log domain so overflow is impossible.
inline double critical_sum_term(const IfsSpec& ifs, const ApproxFn& psi, double s,
                                std::int64_t n) {
  PressureProfile profile(ifs);
  double lp = psi.is_table() && psi.table_value(n) == 0
                  ? -std::numeric_limits<double>::infinity()
                  : psi.log_at(n);
  if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(s * lp + static_cast<double>(n) * profile.pressure(s));
}

namespace detail {

// P(s) - s*alpha with an exact sign when both carry commensurable log forms;
// falls back to a floating comparison with a 1e-12 tie window.
struct CriticalGap {
  int sign = 0;  // -1, 0 (critical), +1
  bool exact = false;
  double value = 0;
};

inline CriticalGap critical_gap(const IfsSpec& ifs, const PressureProfile& profile,
                                const ApproxFn& psi, double s,
                                const std::optional<ExactExponent>& s_exact) {
  CriticalGap g;
  double alpha = psi.shrinking_rate().value;
  g.value = profile.pressure(s) - s * alpha;
  // Exact route: uniform-ratio system, s given in exact form, alpha exact.
  if (s_exact && (psi.alpha().is_exact() || psi.alpha().is_zero()) &&
      ifs.mode() == IfsMode::similarity) {
    // P(s) - s alpha = log m + s log a - s alpha; with s = c_s log m / log(1/a)
    // and alpha = r log(1/a) this is log m (1 - c_s (1 + r)).
    Rational inv_a = s_exact->den;
    auto r = psi.alpha().is_zero() ? std::optional<Rational>(Rational(0))
                                   : psi.alpha().ratio_to_log(inv_a);
    if (r) {
      Rational coeff = 1 - s_exact->coeff * (1 + *r);
      g.exact = true;
      g.sign = coeff == 0 ? 0 : (coeff > 0 ? 1 : -1);
      return g;
    }
  }
  if (std::abs(g.value) <= 1e-12 * (1 + std::abs(g.value))) {
    g.sign = 0;
  } else {
    g.sign = g.value > 0 ? 1 : -1;
  }
  return g;
}

// beta * s as an exact rational when the log forms cancel; nullopt otherwise.
inline std::optional<Rational> exact_beta_s(const BetaForm& beta,
                                            const std::optional<ExactExponent>& s_exact) {
  if (!s_exact) return std::nullopt;
  if (beta.is_zero()) return Rational(0);
  if (!beta.is_log_ratio_form()) {
    // rational or real beta against an irrational s: exact only when zero.
    return std::nullopt;
  }
  auto r1 = exact_log_ratio(beta.num, s_exact->den);   // log(num)/log(1/a)
  auto r2 = exact_log_ratio(s_exact->num, beta.den);   // log(m)/log(den)
  if (!r1 || !r2) return std::nullopt;
  return beta.coeff * s_exact->coeff * *r1 * *r2;
}

}  // namespace detail

struct ClassifyOptions {
  std::optional<double> s;                 // defaults to the Hill-Velani exponent
  std::optional<Word> ball_cylinder;       // restrict to a cylinder inside the ball
  int table_window = 16;                   // tail window for table heuristics
};

// The zero/full classifier. Decides the critical series
// sum_n psi(n)^s sum_{|i|=n} ||f_i'||^s analytically for the parametric
// family, and heuristically (flagged) for tables.
inline Verdict classify(const IfsSpec& ifs, const SymbolStream& /*x_coding*/,
                        const ApproxFn& psi, ClassifyOptions opts = {}) {
  PressureProfile profile(ifs);
  Verdict v;
  ShrinkRate rate = psi.shrinking_rate();
  v.alpha = rate.value;
  v.alpha_infinite = rate.unbounded;
  v.heuristic = rate.heuristic;
  if (opts.ball_cylinder) v.ball_restriction = opts.ball_cylinder->str(ifs.alphabet_size());

  double d = dimension(profile);
  auto s_exact = (psi.alpha().is_exact() || psi.alpha().is_zero()) && !psi.is_table()
                     ? hv_exponent_exact(ifs, psi.alpha())
                     : std::nullopt;

  if (rate.unbounded) {
    v.dim_w = 0.0;
    v.s = opts.s.value_or(0.0);
    if (v.s > 0) {
      v.convergence = rate.heuristic ? Convergence::heuristic_converges : Convergence::converges;
      v.measure = MeasureStatement::zero;
      v.provenance = "infinite shrinking rate: terms decay super-exponentially; dim W = 0 < s";
    } else {
      v.convergence = rate.heuristic ? Convergence::heuristic_diverges : Convergence::diverges;
      v.measure = MeasureStatement::full;
      v.provenance = "s = 0: W is a dense G-delta, H^0 is infinite on every ball";
    }
    v.critical_series = "sum_n psi(n)^s (#A)^n a^{sn}-type terms with super-exponential psi";
    return v;
  }

  // The exact exponent form only describes the default (Hill-Velani) s.
  std::optional<ExactExponent> effective_exact = opts.s ? std::nullopt : s_exact;
  double s = opts.s.value_or(s_exact ? s_exact->value() : hv_exponent(profile, v.alpha));
  v.s = s;
  v.dim_w = (s_exact && !opts.s) ? s : hv_exponent(profile, v.alpha);
  v.critical_series = "sum_n psi(n)^s * exp(n P(s))";

  if (s == 0.0) {
    v.convergence = Convergence::diverges;
    v.measure = MeasureStatement::full;
    v.provenance = "s = 0: counting series diverges; H^0 statement on every ball";
    return v;
  }

  std::vector<double> terms;
  if (psi.is_table()) {
    // The trajectory ships with every table verdict.
    double acc = 0;
    for (std::int64_t n = 1; n <= static_cast<std::int64_t>(psi.table_size()); ++n) {
      terms.push_back(critical_sum_term(ifs, psi, s, n));
      acc += terms.back();
      v.partial_sums.push_back(acc);
    }
  }

  auto gap = detail::critical_gap(ifs, profile, psi, s, effective_exact);

  if (gap.sign > 0) {
    v.convergence = psi.is_table() ? Convergence::heuristic_diverges : Convergence::diverges;
    v.measure = MeasureStatement::dimension_above_s;
    v.provenance = "P(s) > s*alpha: root test limsup e^{P(s)-s alpha} > 1; dim W > s";
    return v;
  }
  if (gap.sign < 0) {
    v.convergence = psi.is_table() ? Convergence::heuristic_converges : Convergence::converges;
    v.measure = MeasureStatement::zero;
    v.provenance = "P(s) < s*alpha: root test limsup < 1, series converges";
    if (v.dim_w < s) v.measure = MeasureStatement::zero;
    return v;
  }

  // Critical case P(s) = s*alpha.
  if (!psi.is_table()) {
    // Terms are c^s n^{-beta s}: a p-series, divergent iff beta*s <= 1.
    auto bs_exact = detail::exact_beta_s(psi.beta(), effective_exact);
    bool diverges;
    std::string how;
    if (bs_exact) {
      diverges = *bs_exact <= 1;
      how = "exact exponent algebra: beta*s = " + format_rational(*bs_exact);
    } else {
      double bs = psi.beta().value() * s;
      diverges = bs <= 1.0 + 1e-12;
      how = "floating exponent algebra: beta*s = " + std::to_string(bs);
    }
    v.convergence = diverges ? Convergence::diverges : Convergence::converges;
    v.measure = diverges ? MeasureStatement::full : MeasureStatement::zero;
    v.provenance = "critical case P(s) = s*alpha; terms ~ n^{-beta s}; " + how;
    return v;
  }

  // Table mode at criticality: only heuristics are honest.
  v.heuristic = true;
  std::int64_t len = static_cast<std::int64_t>(psi.table_size());
  std::int64_t w = std::min<std::int64_t>(opts.table_window, len / 2);
  if (w >= 4) {
    bool geometric = true, heavy = true;
    for (std::int64_t n = len - w; n < len; ++n) {
      double ratio = terms[n] / std::max(terms[n - 1], 1e-300);
      if (!(ratio < 0.95)) geometric = false;
      if (!(terms[n] * static_cast<double>(n + 1) > 1e-6)) heavy = false;
    }
    if (geometric) {
      v.convergence = Convergence::heuristic_converges;
      v.measure = MeasureStatement::zero;
      v.provenance = "table tail decays geometrically (partial-sum heuristic)";
      return v;
    }
    if (heavy) {
      v.convergence = Convergence::heuristic_diverges;
      v.measure = MeasureStatement::full;
      v.provenance = "table terms stay above c/n over the tail window (heuristic)";
      return v;
    }
  }
  v.convergence = Convergence::inconclusive;
  v.measure = MeasureStatement::zero;
  v.provenance = "finite table cannot decide the critical series";
  return v;
}

// Missing-digit translation: the set of points p/q-approximable along powers
// of b inside the digit-restricted set corresponds to a shrinking target
// with psi(n) = b^n phi(b^n) on the uniform-ratio system.
struct LsvInstance {
  int base = 3;
  std::vector<int> digits;
  ApproxFn phi = ApproxFn::pure_exponential(AlphaForm::from_real(0));  // in q
  double s = 0;
};

struct LsvReport {
  Verdict translated;       // classify() on the translated system
  Convergence direct;       // direct series sum phi(b^n)^s (b^n)^{gamma*}
  bool agree = false;
  double gamma_star = 0;
};

inline LsvReport lsv_crosscheck(const LsvInstance& inst) {
  if (inst.phi.is_table())
    throw std::invalid_argument("lsv crosscheck needs a parametric phi");
  IfsSpec ifs = make_missing_digit_ifs(inst.base, inst.digits);
  LsvReport rep;
  rep.gamma_star = std::log(static_cast<double>(inst.digits.size())) /
                   std::log(static_cast<double>(inst.base));

  // Direct decision of sum_n phi(b^n)^s (b^n)^{gamma*}: with
  // phi(q) = c q^{-beta_phi} e^{-gamma_phi q}, the n-th term is
  // c^s b^{n(gamma* - s beta_phi)} e^{-s gamma_phi b^n}.
  const auto& alpha_phi = inst.phi.alpha();
  bool super_exp = !alpha_phi.is_zero();
  if (super_exp) {
    rep.direct = Convergence::converges;
  } else {
    // Exact when beta_phi is rational: exponent coefficient per n is
    // (gamma* - s beta_phi) log b; gamma* = log(#J)/log b.
    double expo = rep.gamma_star - inst.s * inst.phi.beta().value();
    double tie = 1e-12 * (1 + std::abs(expo));
    if (expo > tie)
      rep.direct = Convergence::diverges;
    else if (expo < -tie)
      rep.direct = Convergence::converges;
    else
      rep.direct = Convergence::diverges;  // constant terms c^s
  }

  // Translated system: psi(n) = b^n phi(b^n) = c * b^{n(1-beta_phi)} (when
  // gamma_phi = 0); super-exponential phi gives an infinite shrinking rate.
  ApproxFn psi = [&] {
    if (super_exp) {
      // Represent via a table long enough for the rate heuristic to flag
      // an infinite shrinking rate.
      std::vector<Rational> tbl;
      Rational q = 1;
      for (int n = 1; n <= 24 && q <= 1000000000000000LL; ++n) {
        q *= inst.base;
        double lv = log_rational(q) + inst.phi.log_at(q.convert_to<std::int64_t>());
        tbl.push_back(rational_from_double(std::exp(std::max(lv, -700.0))));
      }
      for (std::size_t i = 1; i < tbl.size(); ++i) tbl[i] = std::min(tbl[i], tbl[i - 1]);
      return ApproxFn::from_table(tbl);
    }
    if (inst.phi.beta().kind != BetaForm::Kind::rational_v)
      throw std::invalid_argument("lsv translation expects rational beta_phi");
    Rational coeff = inst.phi.beta().plain - 1;  // alpha_psi = (beta_phi - 1) log b
    if (coeff < 0) throw std::invalid_argument("phi must decay at least like 1/q");
    return ApproxFn::exp_poly(inst.phi.c(), BetaForm::rational(0),
                              AlphaForm::exact(coeff, inst.base));
  }();

  ClassifyOptions opts;
  opts.s = inst.s;
  rep.translated = classify(ifs, SymbolStream::constant(0), psi, opts);
  Convergence got = rep.translated.convergence;
  auto normalize = [](Convergence c) {
    if (c == Convergence::heuristic_converges) return Convergence::converges;
    if (c == Convergence::heuristic_diverges) return Convergence::diverges;
    return c;
  };
  rep.agree = normalize(got) == normalize(rep.direct);
  return rep;
}

}  // namespace stt
