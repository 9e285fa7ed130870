#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stt/approx_fn.hpp"
#include "stt/exact.hpp"
#include "stt/ifs.hpp"
#include "stt/interval.hpp"
#include "stt/word.hpp"

namespace stt {

// Pressure of the system: closed form log(sum a_i^s) for similarities,
// level-n estimates with a distortion error bar otherwise.
class PressureProfile {
 public:
  enum class Mode { closed_form_self_similar, finite_n_estimate };

  explicit PressureProfile(const IfsSpec& ifs, int estimate_depth = 8)
      : ifs_(&ifs), depth_(estimate_depth) {
    mode_ = ifs.mode() == IfsMode::similarity ? Mode::closed_form_self_similar
                                              : Mode::finite_n_estimate;
  }

  Mode mode() const { return mode_; }
  const IfsSpec& ifs() const { return *ifs_; }
  int estimate_depth() const { return depth_; }

  double pressure(double s) const {
    if (s < 0) throw std::invalid_argument("pressure needs s >= 0");
    if (mode_ == Mode::closed_form_self_similar) {
      if (s == 0.0) return std::log(static_cast<double>(ifs_->alphabet_size()));
      double sum = 0;
      for (int i = 0; i < ifs_->alphabet_size(); ++i) sum += std::exp(s * ifs_->log_ratio(i));
      return std::log(sum);
    }
    return pressure_interval(s).mid();
  }

  // Enclosure of P(s). In estimate mode the level-n sum is corrected by the
  // distortion-subadditivity bar s*log(C)/n on both sides, widened by the
  // per-word derivative enclosures.
  Interval pressure_interval(double s) const {
    if (mode_ == Mode::closed_form_self_similar) {
      double p = pressure(s);
      return Interval::outward(p, p);
    }
    int n = depth_;
    Interval sum(0.0);
    Word w;
    std::function<void(int)> rec = [&](int remaining) {
      if (remaining == 0) {
        sum = sum + pow(ifs_->word_derivative_enclosure(w), s);
        return;
      }
      for (int sym = 0; sym < ifs_->alphabet_size(); ++sym) {
        w.push_back(sym);
        rec(remaining - 1);
        w.sym.pop_back();
      }
    };
    rec(n);
    Interval level = log(sum) / Interval(static_cast<double>(n));
    double bar = s * std::log(ifs_->distortion_c()) / n;
    return Interval::outward(level.lo - bar, level.hi + bar);
  }

 private:
  const IfsSpec* ifs_;
  Mode mode_;
  int depth_;
};

// Root of a strictly decreasing function by plain bisection; the bracket is
// [lo, hi] with f(lo) > 0 >= f(hi).
inline double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                int max_iter = 200) {
  for (int i = 0; i < max_iter && hi - lo > 1e-16 * (1 + std::abs(hi)); ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Hausdorff dimension of the attractor: the root of P(d) = 0 under the OSC.
inline double dimension(const PressureProfile& profile) {
  double t = static_cast<double>(profile.ifs().ambient_dim());
  if (profile.ifs().alphabet_size() == 1) return 0.0;
  auto f = [&](double s) { return profile.pressure(s); };
  if (f(t) > 0)
    throw std::domain_error("pressure positive at ambient dimension; OSC assertion untenable");
  double d = bisect_decreasing(f, 0.0, t);
  if (std::abs(f(d)) > 1e-12)
    throw std::runtime_error("dimension root residual too large");
  return d;
}

// Dimension bracket for estimate mode: roots of the lower/upper pressure
// curves.
inline std::pair<double, double> dimension_bracket(const PressureProfile& profile) {
  double t = static_cast<double>(profile.ifs().ambient_dim());
  auto flo = [&](double s) { return profile.pressure_interval(s).lo; };
  auto fhi = [&](double s) { return profile.pressure_interval(s).hi; };
  double lo = flo(0.0) <= 0 ? 0.0 : bisect_decreasing(flo, 0.0, t);
  double hi = bisect_decreasing(fhi, 0.0, t);
  return {lo, hi};
}

// The shrinking-target dimension: unique root of P(s) = s*alpha on [0, d];
// 0 when the rate is infinite, d when the rate vanishes.
inline double hv_exponent(const PressureProfile& profile, double alpha) {
  if (std::isinf(alpha)) return 0.0;
  if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
  double d = dimension(profile);
  if (alpha == 0.0) return d;
  auto f = [&](double s) { return profile.pressure(s) - s * alpha; };
  double s = bisect_decreasing(f, 0.0, d);
  if (std::abs(f(s)) > 1e-12) throw std::runtime_error("exponent root residual too large");
  return s;
}

// Exact-form exponent value: coeff * log(num) / log(den).
struct ExactExponent {
  Rational coeff, num, den;
  double value() const { return to_double(coeff) * log_rational(num) / log_rational(den); }
};

// For uniform-ratio systems (m maps of ratio a) with a commensurable rate,
// the exponent has closed form log m / (alpha - log a) = coeff*log(m)/log(1/a).
inline std::optional<ExactExponent> hv_exponent_exact(const IfsSpec& ifs,
                                                      const AlphaForm& alpha) {
  if (ifs.mode() != IfsMode::similarity) return std::nullopt;
  const auto& maps = ifs.maps();
  for (const auto& m : maps)
    if (m.ratio != maps[0].ratio) return std::nullopt;
  Rational inv_a = 1 / maps[0].ratio;
  Rational rho;  // alpha = rho * log(1/a)
  if (alpha.is_zero()) {
    rho = 0;
  } else {
    auto r = alpha.ratio_to_log(inv_a);
    if (!r) return std::nullopt;
    rho = *r;
  }
  return ExactExponent{Rational(1) / (rho + 1), Rational(maps.size()), inv_a};
}

// Bernoulli weights w_i = e^{-alpha s} a_i^s of the equilibrium state in
// similarity SSC mode (the comparability constant is exactly 1 there). When
// the ratios are uniform and s sits at the root, the weights are exactly 1/m.
struct GibbsWeights {
  double alpha = 0, s = 0;
  std::vector<double> log_w;
  std::optional<Rational> exact_uniform;  // each weight, when exactly 1/m

  double weight(int i) const { return std::exp(log_w.at(i)); }
  double sum() const {
    double t = 0;
    for (double lw : log_w) t += std::exp(lw);
    return t;
  }
  bool is_exact() const { return exact_uniform.has_value(); }
};

inline GibbsWeights make_gibbs(const IfsSpec& ifs, double alpha, double s) {
  if (ifs.mode() != IfsMode::similarity)
    throw std::logic_error("pointwise Gibbs weights require similarity mode");
  GibbsWeights g;
  g.alpha = alpha;
  g.s = s;
  for (int i = 0; i < ifs.alphabet_size(); ++i)
    g.log_w.push_back(-alpha * s + s * ifs.log_ratio(i));
  bool uniform = true;
  for (const auto& m : ifs.maps())
    if (m.ratio != ifs.maps()[0].ratio) uniform = false;
  if (uniform && std::abs(g.sum() - 1.0) < 1e-9)
    g.exact_uniform = Rational(1, ifs.alphabet_size());
  return g;
}

// Product mass of a cylinder word under the Bernoulli weights.
inline double gibbs_mass(const GibbsWeights& g, const Word& w) {
  double acc = 0;
  for (int s : w.sym) acc += g.log_w.at(s);
  return std::exp(acc);
}
inline Rational gibbs_mass_exact(const GibbsWeights& g, const Word& w) {
  if (!g.exact_uniform) throw std::logic_error("weights are not exact");
  return rational_pow(*g.exact_uniform, w.size());
}

// Enclosure version for conformal systems: the comparability constant C
// enters on both sides.
inline Interval gibbs_mass_enclosure(const IfsSpec& ifs, double alpha, double s, const Word& w) {
  Interval d = ifs.word_derivative_enclosure(w);
  double c = ifs.distortion_c();
  Interval core = exp(Interval(-alpha * s * static_cast<double>(w.size()))) * pow(d, s);
  return Interval(1.0 / c, c) * core;
}

struct KlReport {
  double d = 0, s = 0, chi = 0;
  double d_kl = 0;          // sum lambda_i log(lambda_i / w_i)
  double identity_rhs = 0;  // (s - d) chi + s alpha
  double residual = 0;
};

// Relative entropy of the dimension measure lambda_i = a_i^d against the
// shrinking-target equilibrium weights, with the closed-form identity it
// must satisfy. Vanishes exactly when the ratios are uniform or alpha = 0.
inline KlReport kl_divergence(const IfsSpec& ifs, double alpha, double s) {
  if (ifs.mode() != IfsMode::similarity)
    throw std::logic_error("KL divergence requires similarity mode");
  PressureProfile profile(ifs);
  if (std::abs(profile.pressure(s) - s * alpha) > 1e-8)
    throw std::invalid_argument("s must solve P(s) = s*alpha");
  KlReport rep;
  rep.s = s;
  rep.d = dimension(profile);
  double sum_lambda = 0;
  for (int i = 0; i < ifs.alphabet_size(); ++i) sum_lambda += std::exp(rep.d * ifs.log_ratio(i));
  if (std::abs(sum_lambda - 1.0) > 1e-9)
    throw std::invalid_argument("dimension weights not normalized");
  double chi = 0, dkl = 0;
  for (int i = 0; i < ifs.alphabet_size(); ++i) {
    double la = ifs.log_ratio(i);
    double lambda = std::exp(rep.d * la);
    double log_w = -alpha * s + s * la;
    chi -= lambda * la;
    dkl += lambda * (rep.d * la - log_w);
  }
  rep.chi = chi;
  rep.d_kl = dkl;
  rep.identity_rhs = (s - rep.d) * chi + s * alpha;
  rep.residual = std::abs(rep.d_kl - rep.identity_rhs);
  return rep;
}

}  // namespace stt
