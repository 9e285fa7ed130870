#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stt/approx_fn.hpp"
#include "stt/exact.hpp"
#include "stt/symbolic.hpp"
#include "stt/thermo.hpp"

namespace stt {

// log epsilon(n) = alpha*s*n + s*log prod_{j<=rho(n)} a_{x_j}. The product of
// ratios is the derivative norm of the cylinder map along the target coding.
inline double log_epsilon(const RhoTable& rho, double alpha, double s, std::int64_t n) {
  std::int64_t r = rho.rho(n).value;
  return alpha * s * static_cast<double>(n) + s * rho.log_derivative_prefix(r);
}

// Evaluates epsilon over schedule windows. When the rho fast path applies,
// epsilon(n) = a^{s u(n) / Q} with u(n) = Q rho(n) - P n in [w*, w*+Q-1]; for
// Q = 1 the value is constant over n, which makes the window weights exact
// rationals (the constant cancels).
class EpsilonEval {
 public:
  EpsilonEval(const RhoTable& rho, double alpha, double s, BigFloat alpha_hp, BigFloat s_hp)
      : rho_(&rho), alpha_(alpha), s_(s), alpha_hp_(std::move(alpha_hp)), s_hp_(std::move(s_hp)) {
    if (rho.fast_path()) {
      log_a_hp_ = log_bigfloat(rho.fast_path()->a);
      constant_on_windows_ = rho.fast_path()->Q == 1;
    }
  }

  const RhoTable& rho() const { return *rho_; }
  double alpha() const { return alpha_; }
  double s() const { return s_; }
  bool constant_on_windows() const { return constant_on_windows_; }

  double log_value(std::int64_t n) const { return log_epsilon(*rho_, alpha_, s_, n); }

  BigFloat log_value_big(const BigInt& n) const {
    const auto& fp = rho_->fast_path();
    if (!fp) {
      if (n > std::numeric_limits<std::int64_t>::max() / 4)
        throw std::logic_error("epsilon beyond int64 requires the exact fast path");
      return BigFloat(log_value(n.convert_to<std::int64_t>()));
    }
    BigInt u = fp->Q * rho_->rho_big(n) - fp->P * n;
    return s_hp_ * to_bigfloat(u) / to_bigfloat(fp->Q) * log_a_hp_;
  }

  // Certified lower bound for log sum_{k=n}^{m} epsilon(k), valid for the
  // parametric psi with matching rate: epsilon(k) > (a_min C^-2 c)^s k^{-beta s}
  // follows from the rho sandwich, and the window minimum of k^{-beta s} sits
  // at k = m.
  BigFloat log_window_sum_lower(const BigInt& n, const BigInt& m) const {
    if (m < n) throw std::invalid_argument("empty epsilon window");
    const ApproxFn& psi = rho_->psi();
    if (psi.is_table()) throw std::logic_error("window bounds require parametric psi");
    BigFloat base = s_hp_ * (log_bigfloat(rho_->ifs().a_min_exact()) + log_bigfloat(psi.c()) -
                             BigFloat(2) * log(BigFloat(rho_->ifs().distortion_c())));
    BigFloat poly = psi.beta().value_bigfloat() * s_hp_ * log(to_bigfloat(m));
    BigInt count = m - n + 1;
    return base - poly + log(to_bigfloat(count));
  }

  // Exact direct sum over a desk-scale window, in the log domain.
  double log_window_sum(std::int64_t n, std::int64_t m) const {
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(m - n + 1));
    for (std::int64_t k = n; k <= m; ++k) {
      logs.push_back(log_value(k));
      max_log = std::max(max_log, logs.back());
    }
    double acc = 0;
    for (double lv : logs) acc += std::exp(lv - max_log);
    return max_log + std::log(acc);
  }

 private:
  const RhoTable* rho_;
  double alpha_, s_;
  BigFloat alpha_hp_, s_hp_, log_a_hp_;
  bool constant_on_windows_ = false;
};

struct ScheduleLevel {
  BigInt n, m;
  // Certified (strict) or reported (relaxed) log values of the two ratio
  // conditions at this level, against threshold log p_l = -l log 2.
  double cond3_log = 0, cond4_log = 0;
  bool cond3_ok = false, cond4_ok = false;
};

struct Schedule {
  bool strict = true;
  bool certifying = false;       // every produced level passed its checks
  std::string partial_reason;    // why strict extension stopped
  double alpha = 0, s = 0;
  std::vector<ScheduleLevel> levels;
  std::optional<BigInt> next_n;  // strict: n_{L+1} computed but m_{L+1} unrepresentable
  BigInt n1_floor;               // the structural floor used for n_1

  std::size_t size() const { return levels.size(); }
  const BigInt& n(std::size_t j) const { return levels.at(j - 1).n; }  // 1-based
  const BigInt& m(std::size_t j) const { return levels.at(j - 1).m; }
};

struct ScheduleOptions {
  int max_levels = 8;
  std::int64_t relaxed_cap = 1000000;  // relaxed mode: max index magnitude
  std::int64_t strict_bit_cap = 1 << 20;  // strict mode: max index bit size
  double relax_threshold = 1e9;  // relaxed: report-only threshold scale
};

namespace detail {

// Structural floors on n_1: the four opening conditions plus the
// rho-slope threshold derived from the parametric sandwich.
inline BigInt n1_structural_floor(const RhoTable& rho, double alpha, double s) {
  const IfsSpec& ifs = rho.ifs();
  double L = std::log(ifs.a_min());  // negative
  double C = ifs.distortion_c();
  double f1 = std::max(4.0, 4.0 / (alpha * alpha));
  double f2 = std::pow((-4.0 * L + alpha) / alpha, 2.0);
  double f3 = (-8.0 * L / alpha) * (-2.0 * L / alpha + 2.0);
  double floor_val = std::max({f1, f2, f3});
  // Opening ratio condition at level 1 (threshold 1/2):
  // C^{1+s} a_min^{-2s} e^{-s alpha (n1 - 2)} < 1/2.
  double f4 = 2.0 + (std::log(2.0) + (1 + s) * std::log(C) - 2 * s * L) / (s * alpha);
  floor_val = std::max(floor_val, f4);
  // Geometric-decay condition: C theta^{E sqrt(n1)} < 1 with
  // theta = a_max^s e^{-alpha s}.
  double theta = std::exp(s * std::log(ifs.a_max()) - alpha * s);
  double E = std::min(1.0, alpha / (-2.0 * L)) * std::sqrt(1.0 + alpha / (-2.0 * L));
  if (C > 1.0) {
    double need = std::log(C) / (-std::log(theta) * E);  // sqrt(n1) > need
    floor_val = std::max(floor_val, need * need);
  }
  BigInt n1 = BigInt(static_cast<std::int64_t>(std::floor(floor_val))) + 1;
  // rho-slope threshold: alpha n / 2 + beta log n >= log c for n >= n1 - sqrt(n1).
  const ApproxFn& psi = rho.psi();
  if (!psi.is_table()) {
    double logc = log_rational(psi.c());
    double beta = psi.beta().value();
    auto slope_ok = [&](double n) { return alpha * n / 2 + beta * std::log(n) >= logc; };
    std::int64_t nstar = 1;
    while (!slope_ok(static_cast<double>(nstar))) nstar *= 2;
    while (n1.convert_to<double>() - std::sqrt(n1.convert_to<double>()) < nstar) ++n1;
  }
  return n1;
}

}  // namespace detail

// Builds the two index sequences of the mass-distribution construction.
// Strict mode reproduces the greedy existence proof with thresholds
// p_l = 2^-l, certifying every produced level in high-precision log
// arithmetic with sound (lower-bounded) window sums; the sequences grow as
// iterated exponentials, so extension stops at a representability cap.
// Relaxed mode keeps every structural condition but scales the ratio
// thresholds, capping indices for downstream enumeration; its output is
// flagged non-certifying.
inline Schedule build_schedule(const EpsilonEval& eps, bool strict, ScheduleOptions opts = {}) {
  const RhoTable& rho = eps.rho();
  const IfsSpec& ifs = rho.ifs();
  const ApproxFn& psi = rho.psi();
  double alpha = eps.alpha(), s = eps.s();
  if (!(alpha > 0) || std::isinf(alpha))
    throw std::invalid_argument("schedules require a finite positive shrinking rate");
  if (!psi.is_table()) {
    // Divergence precondition: terms are ~ n^{-beta s}; need beta*s <= 1.
    if (psi.beta().value() * s > 1.0 + 1e-12)
      throw std::invalid_argument("epsilon series converges; no schedule exists");
  }

  Schedule sched;
  sched.strict = strict;
  sched.alpha = alpha;
  sched.s = s;

  BigFloat log2 = log(BigFloat(2));
  double Ld = std::log(ifs.a_min());
  BigFloat L = BigFloat(Ld);
  BigFloat logC = log(BigFloat(ifs.distortion_c()));
  BigFloat s_hp = BigFloat(s), alpha_hp = BigFloat(alpha);

  BigInt n1 = detail::n1_structural_floor(rho, alpha, s);
  sched.n1_floor = n1;

  auto rho_of = [&](const BigInt& v) -> BigInt {
    if (rho.has_exact_fast_path()) return rho.rho_big(v);
    if (v > (BigInt(1) << 62))
      throw std::logic_error("strict extension beyond int64 requires the exact rho fast path");
    return BigInt(rho.rho(v.convert_to<std::int64_t>()).value);
  };

  // Running sums over previous levels.
  BigInt sum_m_rho = 0;           // sum_j (m_j + rho(m_j))
  BigFloat sum_log_window = 0;    // sum_j log(window sum), lower bounds in strict mode
  bool all_ok = true;

  for (int level = 1; level <= opts.max_levels; ++level) {
    BigInt n_l, m_l;
    BigFloat lvl = BigFloat(level);
    BigFloat head = lvl * (1 + s_hp) * logC - 2 * s_hp * lvl * L;  // C^{(1+s)l} a_min^{-2sl}
    BigFloat log_p = -lvl * log2;
    try {

    if (level == 1) {
      n_l = n1;
      if (!strict && n_l > opts.relaxed_cap)
        throw std::invalid_argument("relaxed cap below the structural n_1 floor");
    } else {
      const BigInt& m_prev = sched.levels.back().m;
      BigInt rp = rho_of(m_prev);
      BigInt structural = m_prev + rp + 2;
      // Avoidance blocks between anchors need p + rho(p) + 2 < q even at the
      // worst-case anchor p = m_prev + rho(m_prev).
      BigInt worst_p = m_prev + rp;
      BigInt block = worst_p + rho_of(worst_p) + 2;
      if (block > structural) structural = block;
      if (strict) {
        BigInt sq = (2 * m_prev + rp) * (2 * m_prev + rp);
        if (sq > structural) structural = sq;
      }
      n_l = structural + 1;
      // Ratio condition: head + (-s alpha (n_l - sum_m_rho - 2l)) - sum_log_window < log p_l.
      BigFloat need = (head - log_p - sum_log_window) / (s_hp * alpha_hp) +
                      to_bigfloat(sum_m_rho) + 2 * lvl;
      if (strict && need > to_bigfloat(n_l)) {
        BigInt cand = ceil(need).convert_to<BigInt>() + 1;
        if (cand > n_l) n_l = cand;
      }
      if (strict && msb(n_l) >= static_cast<unsigned>(opts.strict_bit_cap)) {
        sched.partial_reason = "next n exceeds the bigint bit cap";
        sched.next_n.reset();
        break;
      }
      if (!strict && n_l > opts.relaxed_cap) {
        sched.partial_reason = "relaxed index cap reached";
        break;
      }
    }

    // Evaluate condition (4)-style ratio at this level with the produced n_l.
    BigFloat cond4 =
        head - s_hp * alpha_hp * (to_bigfloat(n_l) - to_bigfloat(sum_m_rho) - 2 * lvl) -
        sum_log_window;
    bool cond4_ok = cond4 < log_p;

    // Choose m_l: structural (1) plus the window-sum demand.
    BigInt structural_m = n_l + rho_of(n_l) + 1;
    BigFloat need_logsum = lvl * log2 + head +
                           s_hp * alpha_hp * (to_bigfloat(sum_m_rho) + 2 * lvl) -
                           sum_log_window;
    if (strict) {
      // Solve (m - n + 1) from the certified lower bound by fixpoint, then
      // verify and bump until it holds.
      BigFloat base = s_hp * (log_bigfloat(ifs.a_min_exact()) + log_bigfloat(psi.c()) -
                              2 * logC);
      BigFloat beta_s = psi.beta().value_bigfloat() * s_hp;
      BigFloat log_count = need_logsum - base;
      for (int it = 0; it < 4; ++it) {
        BigFloat log_m = log_count > log(to_bigfloat(structural_m))
                             ? log_count
                             : log(to_bigfloat(structural_m));
        log_count = need_logsum - base + beta_s * log_m;
      }
      if (log_count > BigFloat(0.693) * opts.strict_bit_cap) {
        sched.partial_reason = "next m exceeds the bigint bit cap";
        sched.next_n = n_l;
        break;
      }
      BigInt count = log_count <= 0 ? BigInt(1) : ceil(exp(log_count)).convert_to<BigInt>() + 1;
      m_l = n_l + count;
      if (m_l < structural_m) m_l = structural_m;
      while (eps.log_window_sum_lower(n_l, m_l) < need_logsum) m_l = n_l + 2 * (m_l - n_l);
    } else {
      std::int64_t n64 = n_l.convert_to<std::int64_t>();
      std::int64_t pad = std::max<std::int64_t>(
          8, std::min(opts.relaxed_cap / 8, n64));
      m_l = structural_m + pad;
      if (m_l > opts.relaxed_cap) {
        m_l = structural_m;
        if (m_l > opts.relaxed_cap) {
          sched.partial_reason = "relaxed index cap reached";
          break;
        }
      }
    }

    BigFloat log_window =
        strict ? eps.log_window_sum_lower(n_l, m_l)
               : BigFloat(eps.log_window_sum(n_l.convert_to<std::int64_t>(),
                                             m_l.convert_to<std::int64_t>()));
    BigFloat cond3 = head + s_hp * alpha_hp * (to_bigfloat(sum_m_rho) + 2 * lvl) -
                     (sum_log_window + log_window);
    bool cond3_ok = cond3 < log_p;

    ScheduleLevel rec;
    rec.n = n_l;
    rec.m = m_l;
    rec.cond3_log = cond3.convert_to<double>();
    rec.cond4_log = cond4.convert_to<double>();
    rec.cond3_ok = cond3_ok;
    rec.cond4_ok = cond4_ok;
    sched.levels.push_back(rec);
    if (strict && (!cond3_ok || !cond4_ok)) all_ok = false;

    sum_m_rho += m_l + rho_of(m_l);
    sum_log_window += log_window;

    } catch (const std::logic_error& e) {
      sched.partial_reason = e.what();
      break;
    }
  }

  if (sched.levels.empty()) throw std::runtime_error("no schedule level could be produced");
  sched.certifying = strict && all_ok;
  return sched;
}

// Window weights of the level-j coordinate measure: epsilon(A)/sum epsilon.
// Exact rationals when epsilon is constant on windows (then every weight is
// 1/(m - n + 1)); normalized doubles otherwise.
struct WindowWeights {
  std::vector<double> w;
  std::optional<Rational> exact_each;
};

inline WindowWeights window_weights(const EpsilonEval& eps, const Schedule& sched,
                                    std::size_t level) {
  const BigInt& n = sched.n(level);
  const BigInt& m = sched.m(level);
  std::int64_t n64 = n.convert_to<std::int64_t>(), m64 = m.convert_to<std::int64_t>();
  WindowWeights out;
  if (eps.constant_on_windows()) {
    out.exact_each = Rational(1, m64 - n64 + 1);
    out.w.assign(static_cast<std::size_t>(m64 - n64 + 1),
                 1.0 / static_cast<double>(m64 - n64 + 1));
    return out;
  }
  double total = 0;
  for (std::int64_t k = n64; k <= m64; ++k) {
    out.w.push_back(std::exp(eps.log_value(k)));
    total += out.w.back();
  }
  for (double& v : out.w) v /= total;
  return out;
}

}  // namespace stt
