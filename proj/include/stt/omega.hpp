#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "stt/exact.hpp"
#include "stt/rng.hpp"
#include "stt/schedule.hpp"
#include "stt/symbolic.hpp"
#include "stt/thermo.hpp"
#include "stt/word.hpp"

namespace stt {

// One forbidden alignment: the block word must NOT equal `pattern` at
// 1-based offset `pos`.
struct OmegaClause {
  std::int64_t pos = 1;
  Word pattern;
  int family = 0;  // 1: head overlap with x-interior, 2: interior x-prefix hit, 3: tail x-prefix
};

struct OmegaClauses {
  std::int64_t p = 0, q = 0, len = 0;
  std::vector<OmegaClause> clauses;
  bool degenerate_skips = false;  // out-of-hypothesis clauses of non-positive length skipped
  std::int64_t max_prefix_pattern = 0;  // longest x-prefix pattern (families 2 and 3)
};

// Materializes the three clause families for the avoidance block between
// positions p+2 and q-1 of the ambient word.
inline OmegaClauses build_omega_clauses(const RhoTable& rho, std::int64_t p, std::int64_t q) {
  OmegaClauses oc;
  oc.p = p;
  oc.q = q;
  if (p < 0) throw std::invalid_argument("p must be >= 0");
  std::int64_t rho_p = rho.rho(p).value;
  if (q <= p + rho_p + 2)
    throw std::invalid_argument("need p + rho(p) + 2 < q for a well-formed block");
  oc.len = q - p - 2;
  const SymbolStream& x = rho.coding();

  // Family 1: w|_1^{l+rho(l)-p-1} != x|_{p-l+2}^{rho(l)}.
  std::int64_t lo1 = rho.R(static_cast<double>(p + isqrt_i64(p) + 1)) + 1;
  for (std::int64_t l = lo1; l <= p; ++l) {
    std::int64_t rl = rho.rho(l).value;
    std::int64_t plen = l + rl - p - 1;
    if (plen <= 0) {
      oc.degenerate_skips = true;
      continue;
    }
    Word pat;
    for (std::int64_t j = p - l + 2; j <= rl; ++j) pat.push_back(x.at(j));
    oc.clauses.push_back({1, std::move(pat), 1});
  }

  // Family 2: w|_{l+1}^{l+rho(l+p+1)} != x|_1^{rho(l+p+1)}.
  std::int64_t R_q1 = rho.R(static_cast<double>(q - 1));
  for (std::int64_t l = 0; l <= R_q1 - p - 1; ++l) {
    std::int64_t plen = rho.rho(l + p + 1).value;
    if (plen <= 0 || l + plen > oc.len) {
      oc.degenerate_skips = true;
      continue;
    }
    oc.clauses.push_back({l + 1, x.prefix_word(static_cast<std::size_t>(plen)), 2});
    oc.max_prefix_pattern = std::max(oc.max_prefix_pattern, plen);
  }

  // Family 3: w|_{l+1}^{q-p-2} != x|_1^{q-p-l-2}.
  std::int64_t hi3 = q - ceil_sqrt_i64(q);
  for (std::int64_t l = std::max<std::int64_t>(R_q1 - p, 0); l <= hi3; ++l) {
    std::int64_t plen = oc.len - l;
    if (plen <= 0) {
      oc.degenerate_skips = true;
      continue;
    }
    oc.clauses.push_back({l + 1, x.prefix_word(static_cast<std::size_t>(plen)), 3});
    oc.max_prefix_pattern = std::max(oc.max_prefix_pattern, plen);
  }
  return oc;
}

inline bool omega_membership(const OmegaClauses& oc, const Word& w) {
  if (static_cast<std::int64_t>(w.size()) != oc.len)
    throw std::invalid_argument("block word has the wrong length");
  for (const auto& c : oc.clauses) {
    std::int64_t L = static_cast<std::int64_t>(c.pattern.size());
    bool eq = true;
    for (std::int64_t j = 0; j < L && eq; ++j)
      if (w[static_cast<std::size_t>(c.pos - 1 + j)] != c.pattern[static_cast<std::size_t>(j)])
        eq = false;
    if (eq) return false;
  }
  return true;
}

inline bool omega_membership(const RhoTable& rho, std::int64_t p, std::int64_t q, const Word& w) {
  return omega_membership(build_omega_clauses(rho, p, q), w);
}

// ---------------------------------------------------------------------------
// Exact measure by position DP over a border automaton.
//
// Families 2 and 3 forbid x-prefixes at fixed offsets; the set of x-prefix
// matches ending at any position is exactly the border chain of a KMP state,
// so a (position, state) DP decides them. Family 1 patterns are x-interior
// segments anchored at offset 1; they live only in the first rho(p) positions
// and are tracked by an alive-bitmask alongside the automaton state.
// ---------------------------------------------------------------------------
class OmegaAutomaton {
 public:
  OmegaAutomaton(const RhoTable& rho, std::int64_t p, std::int64_t q)
      : clauses_(build_omega_clauses(rho, p, q)), alphabet_(rho.ifs().alphabet_size()) {
    lmax_ = clauses_.max_prefix_pattern;
    pattern_ = rho.coding().prefix_word(static_cast<std::size_t>(lmax_));
    build_kmp();
    build_triggers(rho);
    build_head_events();
  }

  const OmegaClauses& clauses() const { return clauses_; }
  std::int64_t len() const { return clauses_.len; }
  int alphabet() const { return alphabet_; }

  // Exact Bernoulli measure with uniform weights 1/m per symbol: the running
  // masses are integer counts of an implicit denominator m^z.
  Rational measure_uniform() const {
    return Rational(run_dp<BigInt>(BigInt(1), nullptr)) /
           rational_pow(Rational(alphabet_), static_cast<std::uint64_t>(clauses_.len));
  }

  double measure_weighted(const GibbsWeights& g) const {
    std::vector<double> w;
    for (int i = 0; i < alphabet_; ++i) w.push_back(g.weight(i) / g.sum());
    return run_dp<double>(1.0, &w);
  }

  // Measure of {v in Omega : v starts with prefix}, including the weight of
  // the prefix itself. Uniform-weight exact variant.
  Rational prefix_measure_uniform(const Word& prefix) const {
    auto seeded = advance_prefix(prefix);
    if (!seeded) return Rational(0);
    BigInt num = run_dp_from<BigInt>(BigInt(1), nullptr, *seeded,
                                     static_cast<std::int64_t>(prefix.size()));
    return Rational(num) / rational_pow(Rational(alphabet_),
                                        static_cast<std::uint64_t>(clauses_.len));
  }

  double prefix_measure_weighted(const GibbsWeights& g, const Word& prefix) const {
    auto seeded = advance_prefix(prefix);
    if (!seeded) return 0.0;
    std::vector<double> w;
    for (int i = 0; i < alphabet_; ++i) w.push_back(g.weight(i) / g.sum());
    double prefix_mass = 1.0;
    for (int s : prefix.sym) prefix_mass *= w[static_cast<std::size_t>(s)];
    return prefix_mass *
           run_dp_from<double>(1.0, &w, *seeded, static_cast<std::int64_t>(prefix.size()));
  }

 private:
  struct Mask {
    std::array<std::uint64_t, 4> bits{};
    bool test(std::size_t i) const { return bits[i >> 6] >> (i & 63) & 1; }
    void set(std::size_t i) { bits[i >> 6] |= std::uint64_t{1} << (i & 63); }
    auto operator<=>(const Mask&) const = default;
    static Mask all(std::size_t n) {
      Mask m;
      for (std::size_t i = 0; i < n; ++i) m.set(i);
      return m;
    }
  };

  struct DpState {
    int kmp = 0;
    Mask mask;  // alive head events
    bool operator<(const DpState& o) const {
      return kmp != o.kmp ? kmp < o.kmp : mask < o.mask;
    }
  };

  void build_kmp() {
    fail_.assign(static_cast<std::size_t>(lmax_) + 1, 0);
    for (std::int64_t i = 2; i <= lmax_; ++i) {
      int k = fail_[static_cast<std::size_t>(i - 1)];
      while (k > 0 && pattern_[static_cast<std::size_t>(i - 1)] != pattern_[static_cast<std::size_t>(k)])
        k = fail_[static_cast<std::size_t>(k)];
      if (pattern_[static_cast<std::size_t>(i - 1)] == pattern_[static_cast<std::size_t>(k)]) ++k;
      fail_[static_cast<std::size_t>(i)] = k;
    }
    delta_.assign(static_cast<std::size_t>(lmax_ + 1) * alphabet_, 0);
    for (std::int64_t st = 0; st <= lmax_; ++st) {
      for (int c = 0; c < alphabet_; ++c) {
        if (st < lmax_ && pattern_[static_cast<std::size_t>(st)] == c) {
          delta_at(st, c) = static_cast<int>(st + 1);
        } else if (st == 0) {
          delta_at(st, c) = 0;
        } else {
          delta_at(st, c) = delta_at(fail_[static_cast<std::size_t>(st)], c);
        }
      }
    }
    // Border membership: is_border_[L0][L] for 1 <= L <= L0.
    is_border_.assign(static_cast<std::size_t>(lmax_) + 1,
                      std::vector<char>(static_cast<std::size_t>(lmax_) + 1, 0));
    for (std::int64_t L0 = 1; L0 <= lmax_; ++L0) {
      int b = static_cast<int>(L0);
      while (b > 0) {
        is_border_[static_cast<std::size_t>(L0)][static_cast<std::size_t>(b)] = 1;
        b = fail_[static_cast<std::size_t>(b)];
      }
    }
  }

  void build_triggers(const RhoTable& rho) {
    trigger2_.assign(static_cast<std::size_t>(clauses_.len) + 1, 0);
    std::int64_t R_q1 = rho.R(static_cast<double>(clauses_.q - 1));
    for (std::int64_t l = 0; l <= R_q1 - clauses_.p - 1; ++l) {
      std::int64_t L = rho.rho(l + clauses_.p + 1).value;
      std::int64_t z = l + L;
      if (L > 0 && z >= 1 && z <= clauses_.len && L <= lmax_)
        trigger2_[static_cast<std::size_t>(z)] = L;
    }
    // Family 3: at z = len, forbidden border lengths are len - l for l in
    // [max(R(q-1)-p, 0), q - ceil_sqrt(q)].
    std::int64_t lo_l = std::max<std::int64_t>(R_q1 - clauses_.p, 0);
    std::int64_t hi_l = clauses_.q - ceil_sqrt_i64(clauses_.q);
    tail_lo_ = clauses_.len - hi_l;  // smallest forbidden border length
    tail_hi_ = clauses_.len - lo_l;  // largest
    if (tail_lo_ < 1) tail_lo_ = 1;
  }

  void build_head_events() {
    for (const auto& c : clauses_.clauses)
      if (c.family == 1) head_events_.push_back(c.pattern);
    if (head_events_.size() > 256)
      throw std::logic_error("head-event mask supports at most 256 clauses");
    head_max_len_ = 0;
    for (const auto& e : head_events_)
      head_max_len_ = std::max(head_max_len_, static_cast<std::int64_t>(e.size()));
  }

  int& delta_at(std::int64_t st, int c) {
    return delta_[static_cast<std::size_t>(st) * alphabet_ + c];
  }
  int delta_at(std::int64_t st, int c) const {
    return delta_[static_cast<std::size_t>(st) * alphabet_ + c];
  }

  // Alive-mask update for position z (1-based) and symbol c. Returns false if
  // some head event fully matched (word excluded).
  bool step_mask(std::int64_t z, int c, Mask& mask) const {
    if (z > head_max_len_) return true;
    Mask next;
    for (std::size_t e = 0; e < head_events_.size(); ++e) {
      if (!mask.test(e)) continue;
      const Word& pat = head_events_[e];
      std::int64_t L = static_cast<std::int64_t>(pat.size());
      if (z > L) continue;
      if (pat[static_cast<std::size_t>(z - 1)] != c) continue;  // mismatched: drop
      if (z == L) return false;  // full match: excluded
      next.set(e);
    }
    mask = next;
    return true;
  }

  bool dead_after(std::int64_t z, int st) const {
    std::int64_t L = trigger2_[static_cast<std::size_t>(z)];
    return L > 0 && L <= st && is_border_[static_cast<std::size_t>(st)][static_cast<std::size_t>(L)];
  }

  bool dead_at_tail(int st) const {
    for (std::int64_t L = tail_lo_; L <= std::min<std::int64_t>(tail_hi_, st); ++L)
      if (is_border_[static_cast<std::size_t>(st)][static_cast<std::size_t>(L)]) return true;
    return false;
  }

  // Run the automaton over a fixed prefix. Returns the reached state, or
  // nullopt if the prefix is already excluded.
  std::optional<DpState> advance_prefix(const Word& prefix) const {
    DpState st;
    st.mask = Mask::all(head_events_.size());
    for (std::int64_t z = 1; z <= static_cast<std::int64_t>(prefix.size()); ++z) {
      int c = prefix[static_cast<std::size_t>(z - 1)];
      if (!step_mask(z, c, st.mask)) return std::nullopt;
      st.kmp = delta_at(st.kmp, c);
      if (dead_after(z, st.kmp)) return std::nullopt;
      if (z == clauses_.len && dead_at_tail(st.kmp)) return std::nullopt;
    }
    return st;
  }

  template <typename Mass>
  Mass run_dp(Mass unit, const std::vector<double>* weights) const {
    DpState init;
    init.mask = Mask::all(head_events_.size());
    return run_dp_from<Mass>(unit, weights, init, 0);
  }

  template <typename Mass>
  Mass run_dp_from(Mass unit, const std::vector<double>* weights, DpState start,
                   std::int64_t from_z) const {
    std::map<DpState, Mass> cur;
    cur[start] = unit;
    std::int64_t z = from_z + 1;
    // Head-event masks only matter over the first head_max_len_ positions.
    for (; z <= clauses_.len && z <= head_max_len_ + 1; ++z) {
      std::map<DpState, Mass> next;
      for (const auto& [st, mass] : cur) {
        for (int c = 0; c < alphabet_; ++c) {
          DpState ns = st;
          if (!step_mask(z, c, ns.mask)) continue;
          ns.kmp = delta_at(ns.kmp, c);
          if (dead_after(z, ns.kmp)) continue;
          if (z == clauses_.len && dead_at_tail(ns.kmp)) continue;
          Mass add = mass;
          if constexpr (std::is_same_v<Mass, double>) add *= (*weights)[static_cast<std::size_t>(c)];
          auto it = next.find(ns);
          if (it == next.end())
            next.emplace(ns, std::move(add));
          else
            it->second += add;
        }
      }
      cur.swap(next);
    }
    // Mask-free phase: a plain vector indexed by automaton state.
    std::vector<Mass> vec(static_cast<std::size_t>(lmax_) + 1, Mass{});
    for (const auto& [st, mass] : cur) vec[static_cast<std::size_t>(st.kmp)] += mass;
    std::vector<Mass> nxt(vec.size());
    for (; z <= clauses_.len; ++z) {
      for (auto& m : nxt) m = Mass{};
      for (std::size_t st = 0; st < vec.size(); ++st) {
        if (vec[st] == Mass{}) continue;
        for (int c = 0; c < alphabet_; ++c) {
          int ns = delta_at(static_cast<std::int64_t>(st), c);
          if (dead_after(z, ns)) continue;
          if (z == clauses_.len && dead_at_tail(ns)) continue;
          if constexpr (std::is_same_v<Mass, double>) {
            nxt[static_cast<std::size_t>(ns)] += vec[st] * (*weights)[static_cast<std::size_t>(c)];
          } else {
            nxt[static_cast<std::size_t>(ns)] += vec[st];
          }
        }
      }
      vec.swap(nxt);
    }
    Mass total{};
    for (const auto& m : vec) total += m;
    return total;
  }

  OmegaClauses clauses_;
  int alphabet_;
  std::int64_t lmax_ = 0;
  Word pattern_;
  std::vector<int> fail_;
  std::vector<int> delta_;
  std::vector<std::vector<char>> is_border_;
  std::vector<std::int64_t> trigger2_;
  std::int64_t tail_lo_ = 1, tail_hi_ = 0;
  std::vector<Word> head_events_;
  std::int64_t head_max_len_ = 0;
};

enum class OmegaMethod { exact_enumeration, automaton_dp, monte_carlo };

struct OmegaMeasure {
  double value = 0;
  double half_width = 0;  // 3 sigma for Monte Carlo, 0 for exact methods
  std::optional<Rational> exact;
  std::uint64_t member_count = 0, total_count = 0;  // enumeration only
  OmegaMethod method = OmegaMethod::exact_enumeration;
};

struct OmegaMeasureOptions {
  OmegaMethod method = OmegaMethod::automaton_dp;
  std::uint64_t mc_samples = 100000;
  std::uint64_t mc_seed = 1;
  int workers = 1;
  std::uint64_t enumeration_cap = std::uint64_t{1} << 24;
};

inline OmegaMeasure omega_measure(const RhoTable& rho, std::int64_t p, std::int64_t q,
                                  const GibbsWeights& g, OmegaMeasureOptions opts = {}) {
  OmegaMeasure out;
  out.method = opts.method;
  int m = rho.ifs().alphabet_size();

  if (opts.method == OmegaMethod::exact_enumeration) {
    OmegaClauses oc = build_omega_clauses(rho, p, q);
    double total_words = std::pow(static_cast<double>(m), static_cast<double>(oc.len));
    if (total_words > static_cast<double>(opts.enumeration_cap))
      throw std::invalid_argument("block too large for exhaustive enumeration");
    auto worker = [&](std::uint64_t begin, std::uint64_t end, double& acc, std::uint64_t& cnt) {
      Word w(std::vector<int>(static_cast<std::size_t>(oc.len), 0));
      for (std::uint64_t idx = begin; idx < end; ++idx) {
        std::uint64_t v = idx;
        for (std::int64_t j = oc.len - 1; j >= 0; --j) {
          w.sym[static_cast<std::size_t>(j)] = static_cast<int>(v % m);
          v /= m;
        }
        if (omega_membership(oc, w)) {
          acc += gibbs_mass(g, w);
          ++cnt;
        }
      }
    };
    std::uint64_t total = static_cast<std::uint64_t>(total_words + 0.5);
    int workers = std::max(1, opts.workers);
    std::vector<double> acc(workers, 0.0);
    std::vector<std::uint64_t> cnt(workers, 0);
    std::vector<std::thread> threads;
    for (int t = 0; t < workers; ++t) {
      std::uint64_t begin = total * t / workers, end = total * (t + 1) / workers;
      threads.emplace_back(worker, begin, end, std::ref(acc[t]), std::ref(cnt[t]));
    }
    for (auto& th : threads) th.join();
    double sum = 0;
    for (double a : acc) sum += a;
    out.total_count = total;
    for (auto c : cnt) out.member_count += c;
    double norm = g.sum();
    out.value = sum / std::pow(norm, static_cast<double>(oc.len));
    if (g.is_exact())
      out.exact = Rational(out.member_count) /
                  rational_pow(Rational(m), static_cast<std::uint64_t>(oc.len));
    return out;
  }

  if (opts.method == OmegaMethod::automaton_dp) {
    OmegaAutomaton automaton(rho, p, q);
    if (g.is_exact()) {
      out.exact = automaton.measure_uniform();
      out.value = to_double(*out.exact);
    } else {
      out.value = automaton.measure_weighted(g);
    }
    return out;
  }

  // Monte Carlo: i.i.d. Bernoulli words against the membership test.
  OmegaClauses oc = build_omega_clauses(rho, p, q);
  Rng rng(opts.mc_seed);
  std::vector<double> w;
  for (int i = 0; i < m; ++i) w.push_back(g.weight(i) / g.sum());
  std::uint64_t hits = 0;
  Word word(std::vector<int>(static_cast<std::size_t>(oc.len), 0));
  for (std::uint64_t k = 0; k < opts.mc_samples; ++k) {
    for (auto& sym : word.sym) sym = static_cast<int>(rng.discrete(w));
    if (omega_membership(oc, word)) ++hits;
  }
  double phat = static_cast<double>(hits) / static_cast<double>(opts.mc_samples);
  out.value = phat;
  out.half_width = 3.0 * std::sqrt(std::max(phat * (1 - phat), 1e-12) /
                                   static_cast<double>(opts.mc_samples));
  out.member_count = hits;
  out.total_count = opts.mc_samples;
  return out;
}

// Geometric-tail lower bound on the Bernoulli measure of the avoidance set,
// with the constructive constant from the three tail sums (similarity SSC,
// comparability constant 1):
//   measure >= 1 - C' theta^{min(sqrt p, sqrt q - p, alpha p / (-2 log a_min))}
struct OmegaBound {
  double lower_bound = 0;
  double theta = 0, cprime = 0, exponent = 0;
  bool in_hypothesis = false;  // p > n_1 and q > max(p + rho(p) + 2, (p+2)^2)
};

inline OmegaBound omega_mass_lower_bound(const RhoTable& rho, const BigInt& n1, std::int64_t p,
                                         std::int64_t q, double alpha, double s) {
  OmegaBound b;
  double L = std::log(rho.ifs().a_min());
  b.theta = std::exp(s * std::log(rho.ifs().a_max()) - alpha * s);
  double slope = alpha / (-2.0 * L);
  b.cprime = rho.ifs().distortion_c() *
             (2.0 / (1.0 - b.theta) + 1.0 / (1.0 - std::pow(b.theta, slope)));
  b.exponent = std::min({std::sqrt(static_cast<double>(p)),
                         std::sqrt(static_cast<double>(q)) - static_cast<double>(p),
                         slope * static_cast<double>(p)});
  b.lower_bound = 1.0 - b.cprime * std::pow(b.theta, b.exponent);
  std::int64_t rho_p = rho.rho(p).value;
  b.in_hypothesis = BigInt(p) > n1 && q > std::max(p + rho_p + 2, (p + 2) * (p + 2));
  return b;
}

}  // namespace stt
