#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stt/approx_fn.hpp"
#include "stt/dichotomy.hpp"
#include "stt/exact.hpp"
#include "stt/ifs.hpp"
#include "stt/interval.hpp"
#include "stt/rng.hpp"
#include "stt/word.hpp"

namespace stt {

// Continuant state after consuming a partial-quotient word: the map
// f_{a_1} ... f_{a_n} acts as x -> (p_prev x + p) / (q_prev x + q).
struct ContinuantPair {
  BigInt p = 0, q = 1;        // p_n, q_n
  BigInt p_prev = 1, q_prev = 0;
  std::size_t length = 0;

  void push(int a) {
    if (a < 1) throw std::invalid_argument("partial quotients must be >= 1");
    BigInt pn = a * p + p_prev, qn = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    ++length;
  }

  // p_n q_{n-1} - p_{n-1} q_n = (-1)^{n+1}.
  BigInt determinant() const { return p * q_prev - p_prev * q; }

  Rational value() const { return Rational(p, q); }  // f_w(0)
  Rational value_at_one() const { return Rational(p + p_prev, q + q_prev); }

  // |f_w'(x)| = 1 / (q_prev x + q)^2, exact at rational x.
  Rational derivative_magnitude(const Rational& x) const {
    Rational den = q_prev * x + q;
    return 1 / (den * den);
  }

  std::pair<Rational, Rational> image_interval(const Rational& lo, const Rational& hi) const {
    Rational a = (p_prev * lo + p) / (q_prev * lo + q);
    Rational b = (p_prev * hi + p) / (q_prev * hi + q);
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  }
};

inline ContinuantPair continuants(const std::vector<int>& quotients) {
  ContinuantPair c;
  for (int a : quotients) c.push(a);
  return c;
}

// q_n(a_1..a_n) / (q_k(a_1..a_k) q_{n-k}(a_{k+1}..a_n)), exact; always in [1, 2].
inline Rational compare_inequality(const std::vector<int>& word, std::size_t k) {
  if (k == 0 || k >= word.size())
    throw std::invalid_argument("split point must be interior");
  auto whole = continuants(word);
  auto head = continuants({word.begin(), word.begin() + static_cast<std::ptrdiff_t>(k)});
  auto tail = continuants({word.begin() + static_cast<std::ptrdiff_t>(k), word.end()});
  return Rational(whole.q) / Rational(head.q * tail.q);
}

// Certified enclosure of the trailing continuant ratio q_{n-1}/q_n over all
// words of length >= iterations+1 with digits in {1..Q}: iterate the interval
// self-map r -> 1/(a + r) from [0, 1] in exact rationals.
inline std::pair<Rational, Rational> continuant_ratio_bounds(int Q, int iterations) {
  Rational lo = 0, hi = 1;
  for (int i = 0; i < iterations; ++i) {
    Rational nlo = 1 / (Rational(Q) + hi);
    Rational nhi = 1 / (Rational(1) + lo);
    lo = nlo;
    hi = nhi;
  }
  return {lo, hi};
}

struct DimensionBracket {
  double lo = 0, hi = 0;
  int depth = 0;  // quotient depth of the level sum behind the bracket
  double width() const { return hi - lo; }
};

namespace detail {
// Collect log q_n over all Q^depth quotient words. int64 continuants suffice
// for the depths used here; overflow guards against deeper calls.
inline void collect_log_continuants(int Q, int depth, std::vector<double>& out) {
  out.clear();
  out.reserve(static_cast<std::size_t>(std::pow(Q, depth)));
  std::vector<std::int64_t> qs(static_cast<std::size_t>(depth) + 2);
  std::function<void(int, std::int64_t, std::int64_t)> rec =
      [&](int level, std::int64_t q, std::int64_t q_prev) {
        if (level == depth) {
          out.push_back(std::log(static_cast<double>(q)));
          return;
        }
        for (int a = 1; a <= Q; ++a) {
          if (q > (std::numeric_limits<std::int64_t>::max() - q_prev) / a)
            throw std::overflow_error("continuant overflow; lower the depth");
          rec(level + 1, a * q + q_prev, q);
        }
      };
  rec(0, 1, 0);
}

// log sum q^{-2 sigma} from precollected log q.
inline double level_log_sum(const std::vector<double>& log_qs, double sigma) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double lq : log_qs) mx = std::max(mx, -2 * sigma * lq);
  double acc = 0;
  for (double lq : log_qs) acc += std::exp(-2 * sigma * lq - mx);
  return mx + std::log(acc);
}
}  // namespace detail

// Growth-rate bracket of the level sums S_n(sigma) = sum q_n^{-2 sigma}:
// the exact splitting identity q_{uv} = q_u q_v (1 + r_u r~_v) with the
// certified ratio bounds makes log S_n almost-additive, so a single depth
// pins the limit between two explicit curves.
class BadQGrowth {
 public:
  BadQGrowth(int Q, int depth) : Q_(Q), depth_(depth) {
    if (Q < 1) throw std::invalid_argument("Q must be >= 1");
    if (Q == 1) return;
    detail::collect_log_continuants(Q, depth, log_qs_);
    auto [rlo, rhi] = continuant_ratio_bounds(Q, depth - 1);
    log_c_lo_ = std::log(1.0 + to_double(rlo * rlo));
    log_c_hi_ = Interval::step_up(std::log(1.0 + to_double(rhi * rhi)) + 1e-15);
  }

  int Q() const { return Q_; }
  int depth() const { return depth_; }

  // lim (1/n) log S_n(sigma) lies between these two.
  double lower(double sigma) const {
    if (Q_ == 1) return single_word(sigma);
    return (detail::level_log_sum(log_qs_, sigma) - 2 * sigma * log_c_hi_) / depth_;
  }
  double upper(double sigma) const {
    if (Q_ == 1) return single_word(sigma);
    return (detail::level_log_sum(log_qs_, sigma) - 2 * sigma * log_c_lo_) / depth_;
  }

 private:
  double single_word(double sigma) const {
    // One word (1,1,1,...): q_n are Fibonacci-like, growth log phi.
    double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    return -2 * sigma * std::log(phi);
  }

  int Q_, depth_;
  std::vector<double> log_qs_;
  double log_c_lo_ = 0, log_c_hi_ = 0;
};

// Dimension bracket of the bounded-quotient attractor: roots of the two
// growth curves. The pair-level system is the square of the single-step one,
// so the single-level growth root is used directly.
inline DimensionBracket badQ_dimension(int Q, int depth = 16) {
  DimensionBracket b;
  b.depth = depth;
  if (Q == 1) return b;  // a single point
  BadQGrowth growth(Q, depth);
  auto root = [&](const std::function<double(double)>& f) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
      double mid = 0.5 * (lo + hi);
      (f(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  b.lo = root([&](double s) { return growth.lower(s); });
  b.hi = root([&](double s) { return growth.upper(s); });
  return b;
}

struct BadSumLevel {
  int n = 0;
  Interval log_level_sum{0.0};  // log sum over words of length n of q^{-2s}
  bool exact = true;            // enumerated exactly (up to rounding)
};

struct BadSumResult {
  std::vector<BadSumLevel> levels;
  std::vector<double> series_partial_log;  // log of sum_{m<=n} psi(m)^s T_m
  std::vector<Interval> growth_log;        // log T_{n+1} - log T_n
  int exact_until = 0;
};

struct BadSumOptions {
  std::uint64_t enumeration_cap = 10000000;  // largest Q^n enumerated directly
  int bins = 1 << 12;
};

namespace detail {
// Exact level sum sum_{|w|=n} q_w^{-2s} by depth-first enumeration with
// incremental int64 continuants; log domain.
inline double dfs_level_log_sum(int Q, int n, double s) {
  double acc = 0;
  std::function<void(int, std::int64_t, std::int64_t)> rec =
      [&](int level, std::int64_t q, std::int64_t q_prev) {
        if (level == n) {
          acc += std::exp(-2 * s * std::log(static_cast<double>(q)));
          return;
        }
        for (int a = 1; a <= Q; ++a) {
          if (q > (std::numeric_limits<std::int64_t>::max() - q_prev) / a)
            throw std::overflow_error("continuant overflow; lower the depth");
          rec(level + 1, a * q + q_prev, q);
        }
      };
  rec(0, 1, 0);
  return std::log(acc);
}
}  // namespace detail

// Partial sums of the quotient-sum series with growth diagnostics. Levels
// within the enumeration cap are summed exactly; beyond that the exact
// continuant recursion advances ratio-binned particle populations with
// outward-rounded interval masses.
inline BadSumResult bad_sum(int Q, const ApproxFn& psi, double s, int N,
                            BadSumOptions opts = {}) {
  if (Q < 1) throw std::invalid_argument("Q must be >= 1");
  BadSumResult out;

  struct Particle {
    Interval r;     // q_{n-1} / q_n
    Interval mass;  // total q^{-2s} carried
  };
  std::vector<Particle> particles;
  for (int a = 1; a <= Q; ++a) {
    Interval qa(static_cast<double>(a));
    particles.push_back({Interval::outward(1.0 / a, 1.0 / a), pow(qa, -2 * s)});
  }
  auto merge_bins = [&](std::vector<Particle>& pts) {
    std::vector<std::optional<Particle>> bins(static_cast<std::size_t>(opts.bins));
    for (const auto& np : pts) {
      auto idx = static_cast<std::size_t>(std::min(
          static_cast<double>(opts.bins - 1), std::max(0.0, np.r.mid() * opts.bins)));
      if (!bins[idx]) {
        bins[idx] = np;
      } else {
        bins[idx]->r = hull(bins[idx]->r, np.r);
        bins[idx]->mass = bins[idx]->mass + np.mass;
      }
    }
    pts.clear();
    for (auto& b : bins)
      if (b) pts.push_back(*b);
  };

  double series_acc_hi = 0, series_acc_lo = 0;
  double words_log = 0;
  Interval prev_level_log{0.0};

  for (int n = 1; n <= N; ++n) {
    words_log += std::log(static_cast<double>(Q));
    bool exact = words_log <= std::log(static_cast<double>(opts.enumeration_cap));

    Interval level_log = [&] {
      if (exact) {
        double v = detail::dfs_level_log_sum(Q, n, s);
        return Interval::outward(v - 1e-11, v + 1e-11);
      }
      Interval total{0.0};
      for (const auto& pt : particles) total = total + pt.mass;
      return log(total);
    }();

    BadSumLevel lvl;
    lvl.n = n;
    lvl.log_level_sum = level_log;
    lvl.exact = exact;
    out.levels.push_back(lvl);
    if (exact) out.exact_until = n;
    if (n > 1) out.growth_log.push_back(level_log - prev_level_log);
    prev_level_log = level_log;

    double term_hi = psi.log_at(n) * s + level_log.hi;
    double term_lo = psi.log_at(n) * s + level_log.lo;
    series_acc_hi += std::exp(term_hi);
    series_acc_lo += std::exp(term_lo);
    out.series_partial_log.push_back(std::log(0.5 * (series_acc_lo + series_acc_hi)));

    if (n == N) break;

    std::vector<Particle> next;
    next.reserve(particles.size() * static_cast<std::size_t>(Q));
    for (const auto& pt : particles) {
      for (int a = 1; a <= Q; ++a) {
        Interval shifted = Interval(static_cast<double>(a)) + pt.r;
        Particle np;
        np.r = Interval::outward(1.0 / shifted.hi, 1.0 / shifted.lo);
        np.mass = pt.mass * pow(shifted, -2 * s);
        next.push_back(np);
      }
    }
    if (next.size() > static_cast<std::size_t>(4 * opts.bins)) merge_bins(next);
    particles.swap(next);
  }
  return out;
}

enum class SeriesVerdict { zero, infinite, inconclusive };

struct BadDichotomyReport {
  int Q = 0;
  double s = 0, alpha = 0;
  double growth_lo = 0, growth_hi = 0;  // bracket for lim (1/n) log S_n(s)
  SeriesVerdict verdict = SeriesVerdict::inconclusive;
  bool heuristic = false;  // table-mode rate estimate
  // Even/odd split bookkeeping: the second-level system sees psi(2n) and
  // psi(2n+1), whose rates double, and the odd sums differ from the even
  // ones by a factor bracketed through the level-1 quotient sum.
  double alpha_even_odd = 0;          // shrinking rate of psi(2n)
  double q1_factor = 0;               // sum_{a<=Q} a^{-2s}
  double odd_over_even_lo = 0, odd_over_even_hi = 0;
  std::string required_precision;     // set when inconclusive
};

// Convergence of sum_n psi(n)^s sum_{quotients <= Q} q_n^{-2s}: the root test
// against the certified growth bracket decides whenever s*alpha avoids the
// bracket; a boundary inside the bracket is reported as inconclusive along
// with the precision that would be required.
inline BadDichotomyReport bad_dichotomy(int Q, const ApproxFn& psi, double s, int depth = 14) {
  BadDichotomyReport rep;
  rep.Q = Q;
  rep.s = s;
  auto rate = psi.shrinking_rate();
  rep.heuristic = rate.heuristic;
  rep.alpha = rate.value;
  rep.alpha_even_odd = 2 * rate.value;
  for (int a = 1; a <= Q; ++a) rep.q1_factor += std::pow(a, -2 * s);
  rep.odd_over_even_lo = rep.q1_factor / 2.0;  // splitting constants in [1, 2]
  rep.odd_over_even_hi = 2.0 * rep.q1_factor;

  if (rate.unbounded) {
    rep.verdict = SeriesVerdict::zero;
    rep.growth_lo = rep.growth_hi = 0;
    return rep;
  }
  BadQGrowth growth(Q, depth);
  rep.growth_lo = growth.lower(s);
  rep.growth_hi = growth.upper(s);
  double decay = s * rate.value;
  if (decay > rep.growth_hi) {
    rep.verdict = SeriesVerdict::zero;
  } else if (decay < rep.growth_lo) {
    rep.verdict = SeriesVerdict::infinite;
  } else {
    rep.verdict = SeriesVerdict::inconclusive;
    rep.required_precision =
        "growth bracket width " + std::to_string(rep.growth_hi - rep.growth_lo) +
        " exceeds the margin |s*alpha - growth|";
  }
  return rep;
}

struct GaussOrbitPoint {
  int quotient = 0;                 // a_k
  Rational enclosure_lo, enclosure_hi;  // T^{k-1}(x) between consecutive convergents
};

struct GaussOrbit {
  std::vector<GaussOrbitPoint> points;
  bool terminated = false;  // rational input: expansion ended inside the horizon
};

// Orbit of the quotient-shift map on an eventually periodic (or finite)
// expansion: shifting the expansion is the map itself, and consecutive
// convergents at a fixed working depth enclose each point exactly.
inline GaussOrbit gauss_orbit(const SymbolStream& quotients, int steps, int work_depth = 40) {
  GaussOrbit orbit;
  for (int k = 0; k < steps; ++k) {
    GaussOrbitPoint pt;
    ContinuantPair c;
    int got = 0;
    for (int j = 1; j <= work_depth; ++j) {
      int a;
      try {
        a = quotients.at(static_cast<std::uint64_t>(k + j));
      } catch (const std::out_of_range&) {
        break;
      }
      if (a < 1) throw std::invalid_argument("partial quotients must be >= 1");
      c.push(a);
      ++got;
    }
    if (got == 0) {
      orbit.terminated = true;
      break;
    }
    pt.quotient = quotients.at(static_cast<std::uint64_t>(k + 1));
    Rational v0 = c.value(), v1 = c.value_at_one();
    pt.enclosure_lo = std::min(v0, v1);
    pt.enclosure_hi = std::max(v0, v1);
    orbit.points.push_back(pt);
    if (got < work_depth) orbit.terminated = true;
  }
  return orbit;
}

// The bounded-quotient attractor as a conformal system over pair branches
// (a, b) -> f_a o f_b, with exact continuant-based derivative enclosures.
struct BadQSystem {
  int Q = 1;

  int pair_alphabet() const { return Q * Q; }

  std::vector<int> pair_word_to_quotients(const Word& w) const {
    std::vector<int> qs;
    for (int sym : w.sym) {
      qs.push_back(sym / Q + 1);
      qs.push_back(sym % Q + 1);
    }
    return qs;
  }

  IfsSpec to_conformal_ifs() const {
    ConformalSystem sys;
    int Qc = Q;
    double amax = 1.0 / 4.0;                       // pair (1,1) at x = 0
    double amin_den = static_cast<double>(Qc) * Qc + Qc + 1;
    sys.a_min = Interval::step_down(1.0 / (amin_den * amin_den));
    sys.a_max = Interval::step_up(amax);
    auto self = *this;
    sys.word_derivative = [self](const Word& w) {
      auto qs = self.pair_word_to_quotients(w);
      auto c = continuants(qs);
      // |f'| over [0, 1] lies between 1/(q + q_prev)^2 and 1/q^2.
      Interval den_hi = Interval::from_rational(Rational(c.q + c.q_prev));
      Interval den_lo = Interval::from_rational(Rational(c.q));
      return Interval::outward(1.0 / (den_hi.hi * den_hi.hi), 1.0 / (den_lo.lo * den_lo.lo));
    };
    sys.branch_derivative = [self, sysword = sys.word_derivative](int branch, const Word&) {
      Word w({branch});
      return sysword(w);
    };
    sys.apply = [self](const Word& w, const Interval& point) {
      auto qs = self.pair_word_to_quotients(w);
      auto c = continuants(qs);
      auto [lo, hi] = c.image_interval(rational_from_double(std::max(0.0, point.lo)),
                                       rational_from_double(std::min(1.0, point.hi)));
      return Interval::outward(to_double(lo), Interval::step_up(to_double(hi)));
    };
    return IfsSpec::conformal(pair_alphabet(), sys, Rational(1), 4.0);
  }

  // Empirical distortion constant: max of q^2 diam(f_w([0,1])) and its
  // reciprocal over sampled quotient words.
  double empirical_distortion(int samples, int max_len, std::uint64_t seed) const {
    Rng rng(seed);
    double worst = 1.0;
    for (int i = 0; i < samples; ++i) {
      int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len)));
      std::vector<int> qs;
      for (int j = 0; j < len; ++j) qs.push_back(1 + static_cast<int>(rng.below(Q)));
      auto c = continuants(qs);
      auto [lo, hi] = c.image_interval(Rational(0), Rational(1));
      Rational diam = hi - lo;
      double scaled = to_double(Rational(c.q * c.q) * diam);
      worst = std::max({worst, scaled, 1.0 / scaled});
    }
    return worst;
  }
};

}  // namespace stt
