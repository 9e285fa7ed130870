#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "stt/omega.hpp"
#include "stt/rng.hpp"
#include "stt/schedule.hpp"
#include "stt/thermo.hpp"

namespace stt {

struct SampledBlock {
  std::int64_t A = 0;
  std::int64_t p = 0, q = 0;  // avoidance block occupies positions p+2 .. q-1
  int omega_sym = 0, tau_sym = 0;
  Word omega_word;            // may be truncated by the horizon
  bool omega_complete = false;
};

struct EtaSample {
  std::uint64_t seed = 0;
  int y = 0;
  std::vector<std::int64_t> anchors;    // all sampled A_k
  std::vector<std::int64_t> realized;   // anchors <= K
  std::vector<std::int64_t> hits;       // l in [0, K] with sigma^l(word) in [x|rho(l)]
  bool hit_set_equal = false;
  Word word;
  std::int64_t horizon = 0;
  std::int64_t depth_k = 0;
  std::uint64_t rejects = 0;
  std::vector<SampledBlock> blocks;
};

struct EtaSampleOptions {
  int max_rejects = 10000;
};

// The deterministic-symbol rules: both are the smallest symbol distinct from
// the forbidden one.
inline int omega_symbol(const RhoTable& rho, std::int64_t A) {
  std::int64_t arg = A - isqrt_i64(A);
  std::int64_t r = rho.rho(arg).value;
  std::size_t m = minimal_period(rho.coding(), static_cast<std::size_t>(r));
  int forbidden = rho.coding().at(m);
  return forbidden == 0 ? 1 : 0;
}

inline int tau_symbol(const RhoTable& rho, std::int64_t A) {
  std::int64_t r = rho.rho(A).value;
  std::size_t m = minimal_period(rho.coding(), static_cast<std::size_t>(r));
  std::int64_t idx = r - (r / static_cast<std::int64_t>(m)) * static_cast<std::int64_t>(m) + 1;
  int forbidden = rho.coding().at(static_cast<std::uint64_t>(idx));
  return forbidden == 0 ? 1 : 0;
}

// Draws one word of eta = int mu_A dnu(A) to a finite horizon: anchors A_k
// are drawn with the epsilon window weights, the deterministic blocks are
// emitted verbatim, and each avoidance block is drawn from the Bernoulli
// measure by rejection against the membership test.
inline EtaSample sample_eta(const Schedule& sched, const EpsilonEval& eps,
                            const GibbsWeights& g, std::int64_t K, std::uint64_t seed,
                            EtaSampleOptions opts = {}) {
  if (sched.strict)
    throw std::invalid_argument(
        "strict-mode schedules are not enumerable; sampling requires a relaxed schedule");
  const RhoTable& rho = eps.rho();
  const SymbolStream& x = rho.coding();
  int alphabet = rho.ifs().alphabet_size();
  if (alphabet < 2) throw std::invalid_argument("sampling needs at least two symbols");

  EtaSample out;
  out.seed = seed;
  out.depth_k = K;
  out.y = x.at(1) == 0 ? 1 : 0;
  out.horizon = K + rho.rho(K).value + 1;

  Rng rng(seed);
  std::vector<double> gw;
  for (int i = 0; i < alphabet; ++i) gw.push_back(g.weight(i) / g.sum());

  // Anchor of level j.
  auto draw_anchor = [&](std::size_t level) -> std::int64_t {
    auto ww = window_weights(eps, sched, level);
    std::size_t idx = ww.exact_each ? static_cast<std::size_t>(rng.below(ww.w.size()))
                                    : rng.discrete(ww.w);
    return sched.n(level).convert_to<std::int64_t>() + static_cast<std::int64_t>(idx);
  };

  std::int64_t a1 = draw_anchor(1);
  out.anchors.push_back(a1);
  for (std::int64_t i = 1; i < a1; ++i) out.word.push_back(out.y);

  for (std::size_t level = 1;; ++level) {
    std::int64_t A = out.anchors.back();
    std::int64_t r = rho.rho(A).value;
    SampledBlock blk;
    blk.A = A;
    blk.omega_sym = omega_symbol(rho, A);
    blk.tau_sym = tau_symbol(rho, A);
    out.word.push_back(blk.omega_sym);
    for (std::int64_t j = 1; j <= r; ++j) out.word.push_back(x.at(j));
    out.word.push_back(blk.tau_sym);
    blk.p = A + r;

    if (static_cast<std::int64_t>(out.word.size()) > out.horizon ||
        level + 1 > sched.size()) {
      out.blocks.push_back(blk);
      break;
    }

    std::int64_t Anext = draw_anchor(level + 1);
    out.anchors.push_back(Anext);
    blk.q = Anext;
    OmegaClauses oc = build_omega_clauses(rho, blk.p, blk.q);
    Word w(std::vector<int>(static_cast<std::size_t>(oc.len), 0));
    bool ok = false;
    for (int attempt = 0; attempt < opts.max_rejects; ++attempt) {
      for (auto& sym : w.sym) sym = static_cast<int>(rng.discrete(gw));
      if (omega_membership(oc, w)) {
        ok = true;
        break;
      }
      ++out.rejects;
    }
    if (!ok) throw std::runtime_error("avoidance-block rejection cap exceeded");
    blk.omega_word = w;
    blk.omega_complete = true;
    for (int sym : w.sym) out.word.push_back(sym);
    out.blocks.push_back(blk);
    if (static_cast<std::int64_t>(out.word.size()) > out.horizon) break;
  }
  if (static_cast<std::int64_t>(out.word.size()) > out.horizon)
    out.word = out.word.prefix(static_cast<std::size_t>(out.horizon));

  // Effective scan depth: positions l with l + rho(l) within the emitted word.
  std::int64_t avail = static_cast<std::int64_t>(out.word.size());
  std::int64_t k_eff = K;
  while (k_eff > 0 && k_eff + rho.rho(k_eff).value > avail) --k_eff;
  out.depth_k = k_eff;

  for (std::int64_t l = 0; l <= k_eff; ++l) {
    std::int64_t r = rho.rho(l).value;
    bool hit = true;
    for (std::int64_t j = 1; j <= r && hit; ++j)
      if (out.word.at1(static_cast<std::size_t>(l + j)) != x.at(j)) hit = false;
    if (hit) out.hits.push_back(l);
  }
  for (std::int64_t a : out.anchors)
    if (a <= k_eff) out.realized.push_back(a);
  out.hit_set_equal = out.hits == out.realized;
  return out;
}

// Exact mu_A mass of the sampled word's prefix of length k, from the factor
// structure (deterministic blocks contribute 1, avoidance blocks contribute
// restricted-and-normalized Bernoulli masses).
class MuMassEvaluator {
 public:
  MuMassEvaluator(const RhoTable& rho, const GibbsWeights& g) : rho_(&rho), g_(&g) {}

  double log_mass(const EtaSample& s, std::int64_t k) const {
    double acc = 0;
    for (const auto& blk : s.blocks) {
      if (blk.q == 0) break;
      std::int64_t start = blk.p + 2, stop = blk.q - 1;
      if (k < start) break;
      const OmegaAutomaton& automaton = cached(blk.p, blk.q);
      double full = g_->is_exact() ? to_double(automaton.measure_uniform())
                                   : automaton.measure_weighted(*g_);
      std::int64_t upto = std::min(k, stop);
      Word prefix = blk.omega_word.prefix(static_cast<std::size_t>(upto - start + 1));
      double part = g_->is_exact()
                        ? to_double(automaton.prefix_measure_uniform(prefix))
                        : automaton.prefix_measure_weighted(*g_, prefix);
      acc += std::log(part) - std::log(full);
      if (k <= stop) break;
    }
    return acc;
  }

  // Exact rational variant (uniform weights).
  Rational mass(const EtaSample& s, std::int64_t k) const {
    if (!g_->is_exact()) throw std::logic_error("exact masses need uniform weights");
    Rational acc = 1;
    for (const auto& blk : s.blocks) {
      if (blk.q == 0) break;
      std::int64_t start = blk.p + 2, stop = blk.q - 1;
      if (k < start) break;
      const OmegaAutomaton& automaton = cached(blk.p, blk.q);
      std::int64_t upto = std::min(k, stop);
      Word prefix = blk.omega_word.prefix(static_cast<std::size_t>(upto - start + 1));
      acc *= automaton.prefix_measure_uniform(prefix) / automaton.measure_uniform();
      if (k <= stop) break;
    }
    return acc;
  }

  const OmegaAutomaton& cached(std::int64_t p, std::int64_t q) const {
    auto key = std::make_pair(p, q);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, OmegaAutomaton(*rho_, p, q)).first;
    return it->second;
  }

 private:
  const RhoTable* rho_;
  const GibbsWeights* g_;
  mutable std::map<std::pair<std::int64_t, std::int64_t>, OmegaAutomaton> cache_;
};

struct MassRatioPoint {
  std::int64_t k = 0;
  std::size_t level = 0;  // l with A_l <= k < A_{l+1}
  double log_mu = 0;
  double log_rhs_inside = 0;   // case A_l <= k < A_l + rho(A_l)
  double log_rhs_between = 0;  // case A_l + rho(A_l) <= k < A_{l+1}
  bool inside_x_block = false;
  double ratio = 0;  // mu / rhs for the applicable case
};

struct EtaTrendPoint {
  std::int64_t k = 0;
  double log_eta_est = 0;   // nu-weighted factor mass along the realized anchors
  double log_diam_s = 0;    // s * log diam(X_{i|k})
  double ratio = 0;
  bool exact_branch = false;  // window fully determined at this k
};

struct MassBoundReport {
  std::vector<MassRatioPoint> points;
  double max_ratio = 0;
  // The two-case bounds hold up to a constant independent of k and of the
  // anchor choice; the chain that proves them gives the explicit value
  // (a_min^s e^{-alpha s})^{-m_1} / Q with Q the product of the avoidance
  // block measures. Stored in the log domain.
  double log_proof_constant = 0;
  double min_block_measure_product = 1;
  std::vector<double> per_level_max;  // indexed by level - 1
  bool per_level_nonincreasing = true;
  std::vector<EtaTrendPoint> eta_trend;
  double product_bound_lhs = 0, product_bound_rhs = 0;  // prod(1 - 2^-n) check
  bool product_bound_ok = false;
};

// Evaluates the two-case prefix-mass bounds and the eta mass trend on the
// sampled words. Similarity SSC only (comparability constants are 1).
inline MassBoundReport mass_bound_report(const std::vector<EtaSample>& samples,
                                         const Schedule& sched, const EpsilonEval& eps,
                                         const GibbsWeights& g, int k_stride = 1) {
  const RhoTable& rho = eps.rho();
  double s = eps.s(), alpha = eps.alpha();
  double log_amin = std::log(rho.ifs().a_min());
  MuMassEvaluator mu(rho, g);
  MassBoundReport rep;

  std::vector<WindowWeights> level_weights;
  for (std::size_t j = 1; j <= sched.size(); ++j)
    level_weights.push_back(window_weights(eps, sched, j));

  // Smallest encountered product of avoidance-block measures (the Q of the
  // construction) feeds the explicit bound constant.
  double min_q = 1.0;
  for (const auto& smp : samples) {
    double prod = 1.0;
    for (const auto& blk : smp.blocks) {
      if (blk.q == 0) break;
      const OmegaAutomaton& automaton = mu.cached(blk.p, blk.q);
      prod *= g.is_exact() ? to_double(automaton.measure_uniform())
                           : automaton.measure_weighted(g);
    }
    min_q = std::min(min_q, prod);
  }
  rep.min_block_measure_product = min_q;
  double m1 = to_double(Rational(sched.m(1)));
  rep.log_proof_constant = -m1 * (s * log_amin - alpha * s) - std::log(min_q);

  auto log_deriv_word = [&](const Word& w, std::int64_t k) {
    double acc = 0;
    for (std::int64_t j = 0; j < k; ++j)
      acc += rho.ifs().log_ratio(w[static_cast<std::size_t>(j)]);
    return acc;
  };

  for (const auto& smp : samples) {
    if (smp.anchors.empty()) continue;
    std::int64_t kmax = std::min<std::int64_t>(smp.depth_k,
                                               static_cast<std::int64_t>(smp.word.size()));
    double word_prefix_log = 0;
    std::int64_t word_pos = 0;
    for (std::int64_t k = smp.anchors[0]; k <= kmax; k += k_stride) {
      while (word_pos < k) {
        word_prefix_log += rho.ifs().log_ratio(smp.word[static_cast<std::size_t>(word_pos)]);
        ++word_pos;
      }
      std::size_t level = 0;
      while (level < smp.anchors.size() && smp.anchors[level] <= k) ++level;
      if (level == 0) continue;
      std::int64_t A_l = smp.anchors[level - 1];
      std::int64_t rho_A = rho.rho(A_l).value;
      double sum_rho_before = 0, sum_logD_before = 0;
      for (std::size_t j = 0; j + 1 < level; ++j) {
        std::int64_t rj = rho.rho(smp.anchors[j]).value;
        sum_rho_before += static_cast<double>(rj);
        sum_logD_before += rho.log_derivative_prefix(rj);
      }
      double logD_A = rho.log_derivative_prefix(rho_A);
      double l = static_cast<double>(level);

      MassRatioPoint pt;
      pt.k = k;
      pt.level = level;
      pt.log_mu = mu.log_mass(smp, k);
      pt.inside_x_block = k < A_l + rho_A;
      double head = -2 * l * s * log_amin;
      pt.log_rhs_inside = s * word_prefix_log + head -
                          s * alpha * (static_cast<double>(A_l) - sum_rho_before - 2 * l) -
                          s * rho.log_derivative_prefix(std::max<std::int64_t>(k - A_l, 0)) -
                          s * sum_logD_before;
      pt.log_rhs_between = s * word_prefix_log + head -
                           s * alpha * (static_cast<double>(k) - sum_rho_before -
                                        static_cast<double>(rho_A) - 2 * l) -
                           s * (sum_logD_before + logD_A);
      double rhs = pt.inside_x_block ? pt.log_rhs_inside : pt.log_rhs_between;
      pt.ratio = std::exp(pt.log_mu - rhs);
      rep.points.push_back(pt);
      rep.max_ratio = std::max(rep.max_ratio, pt.ratio);
      if (rep.per_level_max.size() < level) rep.per_level_max.resize(level, 0.0);
      rep.per_level_max[level - 1] = std::max(rep.per_level_max[level - 1], pt.ratio);

      // eta estimate: nu weight of the realized anchors times the factor
      // mass. Exact between windows (the prefix determines every anchor);
      // inside a window it is the dominant term of the anchor sum, a lower
      // bound.
      EtaTrendPoint et;
      et.k = k;
      double log_nu = 0;
      for (std::size_t j = 0; j < level; ++j) {
        const auto& ww = level_weights[j];
        std::int64_t off = smp.anchors[j] - sched.n(j + 1).convert_to<std::int64_t>();
        log_nu += std::log(ww.w[static_cast<std::size_t>(off)]);
      }
      bool past_window = k >= sched.m(level).convert_to<std::int64_t>();
      bool before_next = level >= sched.size() ||
                         k < sched.n(level + 1).convert_to<std::int64_t>();
      et.exact_branch = past_window && before_next;
      et.log_eta_est = log_nu + pt.log_mu;
      et.log_diam_s = s * (word_prefix_log + log_rational(rho.ifs().diam()));
      et.ratio = std::exp(et.log_eta_est - et.log_diam_s);
      rep.eta_trend.push_back(et);
    }
  }

  for (std::size_t l = 1; l < rep.per_level_max.size(); ++l)
    if (rep.per_level_max[l] > rep.per_level_max[l - 1] * (1 + 1e-9) &&
        rep.per_level_max[l - 1] > 0)
      rep.per_level_nonincreasing = false;

  // Infinite-product lower bound on the threshold sequence 2^-n.
  double sum_p = 1.0, max_p = 0.5;
  double lhs = 1.0;
  for (int n = 1; n <= 64; ++n) lhs *= 1.0 - std::pow(2.0, -n);
  rep.product_bound_lhs = lhs * (1.0 - std::pow(2.0, -64));
  rep.product_bound_rhs = std::exp(-(1.0 + 1.0 / (2.0 * (1.0 - max_p))) * sum_p);
  rep.product_bound_ok = rep.product_bound_lhs >= rep.product_bound_rhs;
  return rep;
}

// Empirical covering multiplicity for 1-D SSC systems: the maximum number of
// scale-r cylinders a sliding interval of diameter r can meet, found by an
// exact sweep over the cylinder boxes.
inline int covering_multiplicity(const IfsSpec& ifs, const Rational& r) {
  if (ifs.mode() != IfsMode::similarity || ifs.ambient_dim() != 1)
    throw std::logic_error("covering multiplicity scan requires a 1-D similarity system");
  auto theta = theta_r(ifs, r);
  std::vector<std::pair<Rational, Rational>> boxes;
  for (const auto& w : theta.words) {
    auto b = ifs.cylinder_box(w)[0];
    boxes.push_back(b);
  }
  std::sort(boxes.begin(), boxes.end());
  // Critical window positions: each box's left endpoint (window [lo, lo + r]).
  int best = 0;
  for (const auto& [lo, hi] : boxes) {
    for (const Rational& t : {Rational(lo - r), Rational(lo)}) {
      int count = 0;
      for (const auto& [blo, bhi] : boxes)
        if (blo <= t + r && bhi >= t) ++count;
      best = std::max(best, count);
    }
  }
  return best;
}

}  // namespace stt
