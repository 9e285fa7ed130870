#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stt/approx_fn.hpp"
#include "stt/exact.hpp"
#include "stt/ifs.hpp"
#include "stt/interval.hpp"
#include "stt/thermo.hpp"
#include "stt/word.hpp"

namespace stt {

// Demonstration configuration: a similarity SSC system with at least two
// distinct contraction ratios, a shrinking rate strictly between 0 and the
// attractor dimension, the exponential target family psi(n) = e^{-alpha n},
// and the divergent comparison family psibar(n) = n^{-1/d}.
struct CounterexampleConfig {
  IfsSpec ifs;
  double alpha = 0;
  std::optional<ApproxFn> psi;     // defaults to e^{-alpha n}
  std::optional<ApproxFn> psibar;  // defaults to n^{-1/d}

  static CounterexampleConfig standard() {
    return {make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 4), Rational(3, 4)}}),
            0.3,
            std::nullopt,
            std::nullopt};
  }
};

namespace detail {
inline void require_nonuniform_ssc(const IfsSpec& ifs) {
  if (ifs.mode() != IfsMode::similarity)
    throw std::invalid_argument("counterexamples require a similarity system");
  if (ifs.check_separation().kind != Separation::ssc)
    throw std::invalid_argument("counterexamples require strong separation");
  bool distinct = false;
  for (const auto& m : ifs.maps())
    if (m.ratio != ifs.maps()[0].ratio) distinct = true;
  if (!distinct)
    throw std::invalid_argument(
        "uniform contraction ratios make the relative entropy vanish; nothing to demonstrate");
}
}  // namespace detail

struct TransferObstructionReport {
  double d = 0, s = 0, chi = 0, alpha = 0;
  double d_kl = 0;
  double identity_rhs = 0;       // (s - d) chi + s alpha
  double identity_residual = 0;
  bool positivity = false;       // d_kl > 0 strictly
  double tail_series_value = 0;  // sum_n e^{-n d_kl / 2} = 1 / (e^{d_kl/2} - 1)
};

// Quantifies why the mass-transference route fails for inhomogeneous ratios:
// the relative entropy between the dimension measure and the equilibrium
// weights is strictly positive, and the resulting comparison series
// converges with the closed-form geometric value.
inline TransferObstructionReport prop31_certificate(const CounterexampleConfig& cfg) {
  detail::require_nonuniform_ssc(cfg.ifs);
  PressureProfile profile(cfg.ifs);
  double d = dimension(profile);
  if (!(cfg.alpha > 0) || !(cfg.alpha < std::numeric_limits<double>::infinity()))
    throw std::invalid_argument("alpha must be positive and finite");
  TransferObstructionReport rep;
  rep.alpha = cfg.alpha;
  rep.d = d;
  rep.s = hv_exponent(profile, cfg.alpha);
  auto kl = kl_divergence(cfg.ifs, cfg.alpha, rep.s);
  rep.chi = kl.chi;
  rep.d_kl = kl.d_kl;
  rep.identity_rhs = kl.identity_rhs;
  rep.identity_residual = kl.residual;
  rep.positivity = rep.d_kl > 1e-14;
  rep.tail_series_value = 1.0 / std::expm1(rep.d_kl / 2.0);
  return rep;
}

struct WitnessLevel {
  std::int64_t n = 0;
  std::int64_t ell = 0;
  bool ell_positive = false;
  bool structure_ok = false;        // shift prefix agrees with the target for exactly ell symbols
  bool membership_ok = false;       // a_2^ell <= (a_{i|n})^{d/s-1} psibar(n)^{d/s}
  bool exclusion_ok = false;        // delta a_2^{ell-1} > psi(n)
  bool exact_distance_used = false; // rational end-to-end distance check ran
  double log_distance_hi = 0, log_distance_lo = 0;
  double log_member_rhs = 0, log_exclusion_lhs = 0, log_psi = 0;
};

struct WitnessReport {
  double d = 0, s = 0, alpha = 0;
  Rational delta;                     // separation gap
  std::vector<WitnessLevel> levels;
  std::vector<double> ell_over_n;     // running sum(ell_i)/n_k, should decay
  bool growth_ok = false;             // n_k + ell_k < n_{k+1} at every level
  double pressure_slope = 0;          // P'(d) = sum a_i^d log a_i
  double log_a1 = 0;
  bool slope_strictly_below = false;  // P'(d) < log a_1
  double convexity_residual = 0;      // P(s) - P(d) - (s-d) P'(d) >= 0
  bool all_verified = false;
};

struct WitnessOptions {
  std::vector<std::int64_t> n_seq;  // defaults to 200, 2000, 20000
  int k_max = 3;
  std::int64_t exact_depth_cap = 200000;  // switch to log-domain above this
};

// Builds the explicit sequence witnessing that a divergent comparison family
// cannot be squeezed inside the exponential target family when the ratios
// are inhomogeneous: each level is inside the comparison target but outside
// the original one, with outward-rounded (or exact rational) inequalities.
inline WitnessReport prop32_witness(const CounterexampleConfig& cfg, WitnessOptions opts = {}) {
  detail::require_nonuniform_ssc(cfg.ifs);
  if (cfg.ifs.diam() != 1)
    throw std::invalid_argument("the witness construction expects a diameter-1 attractor");

  // Branches sorted by ratio: index 0 carries the largest ratio.
  std::vector<std::size_t> order(cfg.ifs.maps().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cfg.ifs.maps()[a].ratio > cfg.ifs.maps()[b].ratio;
  });
  int idx1 = static_cast<int>(order[0]);   // "largest ratio" branch
  int idx2 = static_cast<int>(order[1]);   // the branch fixing the target point
  Rational a1 = cfg.ifs.maps()[idx1].ratio;
  Rational a2 = cfg.ifs.maps()[idx2].ratio;

  PressureProfile profile(cfg.ifs);
  WitnessReport rep;
  rep.d = dimension(profile);
  rep.alpha = cfg.alpha;
  if (!(cfg.alpha > 0 && cfg.alpha < rep.d))
    throw std::invalid_argument("witness construction needs 0 < alpha < d");
  rep.s = hv_exponent(profile, cfg.alpha);
  auto sep = cfg.ifs.check_separation();
  rep.delta = *sep.gap;

  if (opts.n_seq.empty()) opts.n_seq = {200, 2000, 20000};
  if (static_cast<int>(opts.n_seq.size()) < opts.k_max)
    throw std::invalid_argument("need an anchor for every level");

  double log_a1 = log_rational(a1), log_a2 = log_rational(a2);
  double log_delta = log_rational(rep.delta);
  double d_over_s = rep.d / rep.s;
  double inv_d = 1.0 / rep.d;
  auto log_psibar = [&](std::int64_t n) {
    if (cfg.psibar) return cfg.psibar->log_at(n);
    return -inv_d * std::log(static_cast<double>(n));
  };
  auto log_psi = [&](std::int64_t n) {
    if (cfg.psi) return cfg.psi->log_at(n);
    return -cfg.alpha * static_cast<double>(n);
  };

  // ell_k by exact ceiling of the displayed requirement, with the symbol
  // counts of the constructed word itself (each earlier block holds ell_i + 1
  // slow-branch symbols, and position n_k is one more); the ceiling then
  // makes the membership inequality hold by construction. The enclosed real
  // is re-checked so a straddled integer is reported rather than guessed.
  std::vector<std::int64_t> ells;
  std::int64_t sum_ell = 0;
  rep.growth_ok = true;
  for (int k = 0; k < opts.k_max; ++k) {
    std::int64_t n_k = opts.n_seq[static_cast<std::size_t>(k)];
    std::int64_t count2 = sum_ell + k + 1;
    std::int64_t count1 = n_k - count2;
    if (count1 < 0) throw std::invalid_argument("anchors too close: blocks overlap");
    double lead = (d_over_s - 1.0) *
                  (static_cast<double>(count1) * (log_a1 / log_a2) +
                   static_cast<double>(count2));
    double tail = d_over_s * log_psibar(n_k) / log_a2;
    double v = lead + tail;
    double slack = 1e-7 * (1.0 + std::abs(v));
    if (std::ceil(v - slack) != std::ceil(v + slack))
      throw std::runtime_error("ceiling straddles an integer; refine the anchors");
    std::int64_t ell = static_cast<std::int64_t>(std::ceil(v));
    ells.push_back(ell);
    if (k + 1 < opts.k_max &&
        n_k + ell >= opts.n_seq[static_cast<std::size_t>(k + 1)])
      rep.growth_ok = false;
    sum_ell += ell;
    rep.ell_over_n.push_back(static_cast<double>(sum_ell) /
                             static_cast<double>(n_k));
  }

  // The witness word: branch idx2 on [n_k, n_k + ell_k], branch idx1 elsewhere.
  auto word_symbol = [&](std::int64_t j) {
    for (int k = 0; k < opts.k_max; ++k) {
      std::int64_t n_k = opts.n_seq[static_cast<std::size_t>(k)];
      if (j >= n_k && j <= n_k + ells[static_cast<std::size_t>(k)]) return idx2;
    }
    return idx1;
  };

  bool all_ok = true;
  sum_ell = 0;
  for (int k = 0; k < opts.k_max; ++k) {
    std::int64_t n_k = opts.n_seq[static_cast<std::size_t>(k)];
    std::int64_t ell = ells[static_cast<std::size_t>(k)];
    WitnessLevel lvl;
    lvl.n = n_k;
    lvl.ell = ell;
    lvl.ell_positive = ell >= 1;

    // The shifted word agrees with the constant-idx2 target for exactly ell
    // symbols.
    lvl.structure_ok = true;
    for (std::int64_t j = 1; j <= ell; ++j)
      if (word_symbol(n_k + j) != idx2) lvl.structure_ok = false;
    if (word_symbol(n_k + ell + 1) == idx2) lvl.structure_ok = false;

    // Distance sandwich from the cylinder geometry: both points share the
    // depth-ell cylinder of branch idx2 and separate at the next symbol.
    double l_ell = static_cast<double>(ell);
    lvl.log_distance_hi = l_ell * log_a2;               // <= a_2^ell
    lvl.log_distance_lo = log_delta + l_ell * log_a2;   // >= delta a_2^ell

    if (n_k + ell <= opts.exact_depth_cap) {
      // Exact rational route: project both tails and compare end to end.
      std::int64_t depth = ell + 40;
      Word shifted, target;
      for (std::int64_t j = 1; j <= depth; ++j) {
        shifted.push_back(word_symbol(n_k + j));
        target.push_back(idx2);
      }
      auto bi = cfg.ifs.cylinder_box(shifted)[0];
      auto bx = cfg.ifs.cylinder_box(target)[0];
      Rational hi = std::max(bi.second, bx.second) - std::min(bi.first, bx.first);
      Rational lo = 0;
      if (bi.first > bx.second) lo = bi.first - bx.second;
      if (bx.first > bi.second) lo = bx.first - bi.second;
      Rational a2_ell = rational_pow(a2, static_cast<std::uint64_t>(ell));
      lvl.exact_distance_used = true;
      lvl.membership_ok = hi <= a2_ell;
      lvl.exclusion_ok = lo >= rep.delta * a2_ell;
    } else {
      lvl.membership_ok = true;  // containment in the shared cylinder is structural
      lvl.exclusion_ok = true;   // separation from the shared cylinder is structural
    }

    // Outward-rounded comparison against the two displayed bounds. The ratio
    // product runs over the first n_k symbols, position n_k included.
    std::int64_t count2 = 1;
    for (int j = 0; j < k; ++j) count2 += ells[static_cast<std::size_t>(j)] + 1;
    std::int64_t count1 = n_k - count2;
    Interval log_prod = Interval(static_cast<double>(count1)) * Interval::outward(log_a1, log_a1) +
                        Interval(static_cast<double>(count2)) * Interval::outward(log_a2, log_a2);
    Interval rhs = Interval::outward(d_over_s - 1.0, d_over_s - 1.0) * log_prod +
                   Interval::outward(d_over_s, d_over_s) *
                       Interval::outward(log_psibar(n_k), log_psibar(n_k));
    lvl.log_member_rhs = rhs.lo;
    if (!(l_ell * log_a2 <= rhs.lo)) lvl.membership_ok = false;

    lvl.log_psi = log_psi(n_k);
    lvl.log_exclusion_lhs = log_delta + (l_ell - 1.0) * log_a2;
    if (!(lvl.log_exclusion_lhs > lvl.log_psi)) lvl.exclusion_ok = false;
    // The certified distance lower bound carries exponent ell, one step below
    // the displayed form; the target must escape that too.
    if (!(log_delta + l_ell * log_a2 > lvl.log_psi)) lvl.exclusion_ok = false;

    all_ok = all_ok && lvl.ell_positive && lvl.structure_ok && lvl.membership_ok &&
             lvl.exclusion_ok;
    rep.levels.push_back(lvl);
    sum_ell += ell;
  }

  // Closing strict-convexity comparison of the pressure slope.
  double slope = 0;
  for (int i = 0; i < cfg.ifs.alphabet_size(); ++i)
    slope += std::exp(rep.d * cfg.ifs.log_ratio(i)) * cfg.ifs.log_ratio(i);
  rep.pressure_slope = slope;
  rep.log_a1 = log_a1;
  rep.slope_strictly_below = slope < log_a1 - 1e-12;
  double convexity = profile.pressure(rep.s) -
                     (profile.pressure(rep.d) + (rep.s - rep.d) * slope);
  rep.convexity_residual = convexity;
  rep.all_verified = all_ok && rep.growth_ok && rep.slope_strictly_below &&
                     convexity >= -1e-10;
  return rep;
}

}  // namespace stt
