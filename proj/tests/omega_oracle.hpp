// Test-only reference implementations for the avoidance-set checks: a
// literal scan of the three clause families, and an inclusion-exclusion
// count of the complement of the forbidden-alignment union.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "stt/omega.hpp"

namespace stt::testing {

inline bool oracle_membership(const RhoTable& rho, std::int64_t p, std::int64_t q,
                              const Word& w) {
  const SymbolStream& x = rho.coding();
  std::int64_t len = q - p - 2;
  auto rho_at = [&](std::int64_t n) { return rho.rho(n).value; };
  auto R_at = [&](double v) { return rho.R(v); };

  for (std::int64_t l = R_at(p + std::floor(std::sqrt(static_cast<double>(p))) + 1) + 1;
       l <= p; ++l) {
    std::int64_t top = l + rho_at(l) - p - 1;
    if (top <= 0) continue;
    bool eq = true;
    for (std::int64_t j = 1; j <= top && eq; ++j)
      if (w.at1(static_cast<std::size_t>(j)) != x.at(static_cast<std::uint64_t>(p - l + 1 + j)))
        eq = false;
    if (eq) return false;
  }
  for (std::int64_t l = 0; l <= R_at(static_cast<double>(q - 1)) - p - 1; ++l) {
    std::int64_t L = rho_at(l + p + 1);
    if (L <= 0 || l + L > len) continue;
    bool eq = true;
    for (std::int64_t j = 1; j <= L && eq; ++j)
      if (w.at1(static_cast<std::size_t>(l + j)) != x.at(static_cast<std::uint64_t>(j)))
        eq = false;
    if (eq) return false;
  }
  for (std::int64_t l = R_at(static_cast<double>(q - 1)) - p;
       l <= q - static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(q)))); ++l) {
    if (l < 0) continue;
    std::int64_t L = len - l;
    if (L <= 0) continue;
    bool eq = true;
    for (std::int64_t j = 1; j <= L && eq; ++j)
      if (w.at1(static_cast<std::size_t>(l + j)) != x.at(static_cast<std::uint64_t>(j)))
        eq = false;
    if (eq) return false;
  }
  return true;
}

inline std::uint64_t inclusion_exclusion_count(const OmegaClauses& oc, int alphabet) {
  std::size_t n = oc.clauses.size();
  if (n > 24) throw std::runtime_error("too many clauses for inclusion-exclusion");
  std::uint64_t total = 1;
  for (std::int64_t i = 0; i < oc.len; ++i) total *= static_cast<std::uint64_t>(alphabet);
  std::int64_t union_count = 0;
  std::vector<int> buf(static_cast<std::size_t>(oc.len), -1);
  for (std::uint64_t sub = 1; sub < (std::uint64_t{1} << n); ++sub) {
    std::fill(buf.begin(), buf.end(), -1);
    bool consistent = true;
    std::int64_t fixed = 0;
    for (std::size_t e = 0; e < n && consistent; ++e) {
      if (!(sub >> e & 1)) continue;
      const auto& c = oc.clauses[e];
      for (std::size_t j = 0; j < c.pattern.size() && consistent; ++j) {
        auto pos = static_cast<std::size_t>(c.pos - 1) + j;
        int want = c.pattern[j];
        if (buf[pos] == -1) {
          buf[pos] = want;
          ++fixed;
        } else if (buf[pos] != want) {
          consistent = false;
        }
      }
    }
    if (!consistent) continue;
    std::int64_t count = 1;
    for (std::int64_t i = 0; i < oc.len - fixed; ++i) count *= alphabet;
    union_count += (__builtin_popcountll(sub) % 2 ? 1 : -1) * count;
  }
  return total - static_cast<std::uint64_t>(union_count);
}

inline void for_each_word(int alphabet, std::int64_t len,
                          const std::function<void(const Word&)>& f) {
  Word w(std::vector<int>(static_cast<std::size_t>(len), 0));
  std::uint64_t total = 1;
  for (std::int64_t i = 0; i < len; ++i) total *= static_cast<std::uint64_t>(alphabet);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    std::uint64_t v = idx;
    for (std::int64_t j = len - 1; j >= 0; --j) {
      w.sym[static_cast<std::size_t>(j)] = static_cast<int>(v % static_cast<std::uint64_t>(alphabet));
      v /= static_cast<std::uint64_t>(alphabet);
    }
    f(w);
  }
}

}  // namespace stt::testing
