#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "stt/exact.hpp"

namespace stt {

// mt19937_64 produces a standard-specified stream, but the std distribution
// adaptors do not; sampling is done by hand so fixed-seed runs are
// byte-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("rng bound must be positive");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Index sampled proportionally to non-negative weights.
  std::size_t discrete(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    if (!(total > 0)) throw std::invalid_argument("discrete: weights sum to zero");
    double u = unit() * total, acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  // Exact-rational weights; the uniform draw uses a 64-bit numerator so the
  // selection is deterministic and unbiased to 2^-64.
  std::size_t discrete(const std::vector<Rational>& weights) {
    Rational total = 0;
    for (const auto& w : weights) total += w;
    if (!(total > 0)) throw std::invalid_argument("discrete: weights sum to zero");
    Rational u = Rational(BigInt(engine_()), BigInt(1) << 64) * total;
    Rational acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stt
