#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stt/approx_fn.hpp"
#include "stt/exact.hpp"
#include "stt/ifs.hpp"
#include "stt/word.hpp"

namespace stt {

struct ThetaResult {
  std::vector<Word> words;
  bool whole_space = false;  // r >= diam(X): degenerate {empty word}
};

// The antichain of words whose cylinder diameter first drops to <= r.
// Exact rational comparisons; the cylinders partition the shift space.
inline ThetaResult theta_r(const IfsSpec& ifs, const Rational& r) {
  if (!(r > 0)) throw std::invalid_argument("theta_r needs r > 0");
  ThetaResult out;
  if (r >= ifs.diam()) {
    out.words.push_back(Word{});
    out.whole_space = true;
    return out;
  }
  // Depth-first in symbol order; emits an antichain in tree order.
  struct Frame {
    Word w;
    Rational diam;
  };
  std::vector<Frame> stack;
  for (int s = ifs.alphabet_size() - 1; s >= 0; --s) {
    Word w({s});
    stack.push_back({w, ifs.cylinder_diameter(w)});
  }
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.diam <= r) {
      out.words.push_back(std::move(f.w));
      continue;
    }
    for (int s = ifs.alphabet_size() - 1; s >= 0; --s) {
      Word w = f.w;
      w.push_back(s);
      stack.push_back({std::move(w), f.diam * ifs.maps()[s].ratio});
    }
  }
  return out;
}

struct RhoValue {
  std::int64_t value = 1;
  bool clamped = false;
};

// rho(n): the depth at which the cylinder along the target coding x first
// drops below C^{-2} diam(X) psi(n). Exact integer arithmetic when the decay
// of psi and of the cylinders along x are commensurable powers of a common
// rational; log-domain with high-precision tie escalation otherwise.
class RhoTable {
 public:
  RhoTable(const IfsSpec& ifs, SymbolStream x, ApproxFn psi)
      : ifs_(&ifs), x_(std::move(x)), psi_(std::move(psi)) {
    if (ifs.mode() != IfsMode::similarity)
      throw std::logic_error("rho tables require similarity mode");
    detect_fast_path();
    log_prefix_.push_back(log_rational(ifs.diam()));
  }

  const IfsSpec& ifs() const { return *ifs_; }
  const SymbolStream& coding() const { return x_; }
  const ApproxFn& psi() const { return psi_; }
  bool has_exact_fast_path() const { return fast_.has_value(); }

  RhoValue rho(std::int64_t n) const {
    if (n < 0) throw std::invalid_argument("rho needs n >= 0");
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    RhoValue v = fast_ ? rho_fast(BigInt(n)) : rho_general(n);
    cache_.emplace(n, v);
    return v;
  }

  // Fast-path-only evaluation for schedule indices beyond int64.
  BigInt rho_big(const BigInt& n) const {
    if (!fast_) throw std::logic_error("rho_big requires the exact fast path");
    return rho_fast_big(n).first;
  }

  // R(x) = max{m : x >= m + rho(m)}, with R = 1 below 1 + rho(1).
  std::int64_t R(double x_val) const {
    if (x_val < 0) throw std::invalid_argument("R needs x >= 0");
    double first = 1 + static_cast<double>(rho(1).value);
    if (x_val < first) return 1;
    // m + rho(m) is strictly increasing.
    std::int64_t lo = 1, hi = 2;
    auto reach = [&](std::int64_t m) { return static_cast<double>(m + rho(m).value); };
    while (reach(hi) <= x_val) {
      lo = hi;
      hi *= 2;
    }
    while (lo + 1 < hi) {
      std::int64_t mid = lo + (hi - lo) / 2;
      (reach(mid) <= x_val ? lo : hi) = mid;
    }
    return lo;
  }

  BigInt R_big(const BigInt& x_val) const {
    if (!fast_) {
      if (x_val > std::numeric_limits<std::int64_t>::max() / 4)
        throw std::logic_error("R beyond int64 requires the exact fast path");
      return BigInt(R(static_cast<double>(x_val.convert_to<std::int64_t>())));
    }
    BigInt first = 1 + rho_big(BigInt(1));
    if (x_val < first) return BigInt(1);
    BigInt lo = 1, hi = 2;
    auto reach = [&](const BigInt& m) { return m + rho_big(m); };
    while (reach(hi) <= x_val) {
      lo = hi;
      hi *= 2;
    }
    while (lo + 1 < hi) {
      BigInt mid = lo + (hi - lo) / 2;
      (reach(mid) <= x_val ? lo : hi) = mid;
    }
    return lo;
  }

  // Cumulative log of the contraction ratios along the coding:
  // sum_{j<=k} log a_{x_j}. Cached; O(1) amortized.
  double log_derivative_prefix(std::int64_t k) const {
    std::lock_guard<std::mutex> lock(mu_);
    return prefix(static_cast<std::size_t>(k)) - log_prefix_[0];
  }

  // Fast-path residue data: rho(n) = ceil((P n + w*) / Q) before clamping,
  // and u(n) = Q*rho(n) - P*n in [w*, w*+Q-1] drives exact epsilon values.
  struct FastPath {
    Rational a;      // common ratio along x
    BigInt P, Q;     // kappa = alpha / (-log a) = P/Q
    BigInt w_star;
  };
  const std::optional<FastPath>& fast_path() const { return fast_; }

 private:
  RhoValue rho_fast(const BigInt& n) const {
    auto [v, clamped] = rho_fast_big(n);
    return {v.convert_to<std::int64_t>(), clamped};
  }

  std::pair<BigInt, bool> rho_fast_big(const BigInt& n) const {
    BigInt raw = ceil_div(fast_->P * n + fast_->w_star, fast_->Q);
    if (raw < 1) return {BigInt(1), true};
    return {raw, false};
  }

  // Table psi is exact rational data: resolve the sandwich with exact
  // comparisons, no floating point at all.
  RhoValue rho_table_exact(std::int64_t n) const {
    const Rational& v = psi_.table_value(n);
    if (v == 0) throw std::domain_error("psi vanished: rho is unbounded");
    Rational target = ifs_->diam() * v;  // distortion constant is exactly 1 here
    if (diam_prefix_.empty()) diam_prefix_.push_back(ifs_->diam());
    if (diam_prefix_[0] <= target) return {1, true};
    std::size_t k = 1;
    while (true) {
      while (diam_prefix_.size() <= k) {
        std::size_t j = diam_prefix_.size();
        diam_prefix_.push_back(diam_prefix_[j - 1] * ifs_->maps()[x_.at(j)].ratio);
      }
      if (diam_prefix_[k] <= target) return {static_cast<std::int64_t>(k), false};
      ++k;
    }
  }

  RhoValue rho_general(std::int64_t n) const {
    if (psi_.is_table()) return rho_table_exact(n);
    double target = target_log(n);
    if (target == std::numeric_limits<double>::infinity() || log_prefix_[0] <= target)
      return {1, log_prefix_[0] <= target};
    if (target == -std::numeric_limits<double>::infinity())
      throw std::domain_error("psi vanished: rho is unbounded");
    // Find the smallest depth with cumulative log-diameter <= target.
    std::size_t hi = 1;
    while (prefix(hi) > target) hi *= 2;
    std::size_t lo = hi / 2;  // prefix(lo) > target or lo == 0
    while (lo + 1 < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      (prefix(mid) > target ? lo : hi) = mid;
    }
    double gap = std::min(std::abs(prefix(hi) - target), std::abs(prefix(hi - 1) - target));
    if (gap < 1e-9 * (1.0 + std::abs(target))) {
      auto refined = rho_escalated(n, hi);
      if (refined) return {static_cast<std::int64_t>(*refined), false};
    }
    return {static_cast<std::int64_t>(hi), false};
  }

  // Recompute near-tie comparisons at 100 decimal digits. Ties that survive
  // this precision resolve toward the non-strict (<=) side.
  std::optional<std::size_t> rho_escalated(std::int64_t n, std::size_t approx) const {
    BigFloat target = BigFloat(-2) * log(BigFloat(ifs_->distortion_c())) +
                      log_bigfloat(ifs_->diam()) + psi_.log_at_bigfloat(BigInt(n));
    std::size_t lo = approx > 4 ? approx - 4 : 0;
    BigFloat acc = log_bigfloat(ifs_->diam());
    for (std::size_t j = 1; j <= lo; ++j) acc += log_bigfloat(ifs_->maps()[x_.at(j)].ratio);
    for (std::size_t k = lo + 1; k <= approx + 4; ++k) {
      acc += log_bigfloat(ifs_->maps()[x_.at(k)].ratio);
      if (acc <= target) return k;
    }
    return std::nullopt;
  }

  double target_log(std::int64_t n) const {
    return -2.0 * std::log(ifs_->distortion_c()) + log_rational(ifs_->diam()) + psi_.log_at(n);
  }

  double prefix(std::size_t k) const {
    while (log_prefix_.size() <= k) {
      std::size_t j = log_prefix_.size();
      log_prefix_.push_back(log_prefix_[j - 1] + ifs_->log_ratio(x_.at(j)));
    }
    return log_prefix_[k];
  }

  void detect_fast_path() {
    if (psi_.is_table() || !psi_.beta().is_zero() || !psi_.alpha().is_exact()) return;
    if (psi_.alpha().coeff == 0) return;  // alpha = 0 has no exponential decay to match
    // All ratios appearing in the coding must coincide; a prefix plus one
    // full cycle covers every symbol the stream can produce.
    std::optional<Rational> a;
    std::size_t probe = x_.is_finite() ? x_.table_size() : x_.prefix_len() + x_.cycle_len();
    for (std::size_t j = 1; j <= probe; ++j) {
      const Rational& r = ifs_->maps().at(x_.at(j)).ratio;
      if (!a) a = r;
      if (*a != r) return;
    }
    if (!a) return;
    Rational inv_a = 1 / *a;
    auto kappa = psi_.alpha().ratio_to_log(inv_a);
    if (!kappa || !(*kappa > 0)) return;
    FastPath fp;
    fp.a = *a;
    fp.P = numerator(*kappa);
    fp.Q = denominator(*kappa);
    // ctilde = C^{-2} * c = c in similarity mode; threshold w* = min integer w
    // with a^w <= ctilde^Q.
    Rational t = rational_pow(psi_.c(), fp.Q.convert_to<std::uint64_t>());
    BigInt w = 0;
    Rational aw = 1;
    if (aw <= t) {
      while (aw / *a <= t) {  // a^{w-1} <= t: w not yet minimal
        aw /= *a;
        --w;
        if (w < -100000) throw std::logic_error("fast-path threshold runaway");
      }
    } else {
      while (aw > t) {
        aw *= *a;
        ++w;
        if (w > 100000) throw std::logic_error("fast-path threshold runaway");
      }
    }
    fp.w_star = w;
    fast_ = fp;
  }

  const IfsSpec* ifs_;
  SymbolStream x_;
  ApproxFn psi_;
  std::optional<FastPath> fast_;
  mutable std::mutex mu_;
  mutable std::map<std::int64_t, RhoValue> cache_;
  mutable std::vector<double> log_prefix_;      // log diam X_{x|k}, cumulative
  mutable std::vector<Rational> diam_prefix_;   // exact diam X_{x|k} (table psi)
};

}  // namespace stt
