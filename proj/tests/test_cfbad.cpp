#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stt/cf_bad.hpp"
#include "stt/rng.hpp"
#include "stt/thermo.hpp"

using namespace stt;

TEST_CASE("continuants on the named words") {
  auto c = continuants({1, 1, 1, 1});
  CHECK(c.q == 5);  // Fibonacci denominators 1, 2, 3, 5
  CHECK(c.q_prev == 3);
  auto one = continuants({2});
  CHECK(one.q == 2);
  CHECK(one.p == 1);
  // Image of [0,1] under the single branch sits inside [1/3, 1/2].
  auto [lo, hi] = one.image_interval(Rational(0), Rational(1));
  CHECK(lo == Rational(1, 3));
  CHECK(hi == Rational(1, 2));
  CHECK_THROWS(continuants({0}));
}

TEST_CASE("determinant identity and coprimality on random words") {
  Rng rng(17);
  for (int trial = 0; trial < 10000; ++trial) {
    std::size_t n = 1 + rng.below(30);
    std::vector<int> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(1 + static_cast<int>(rng.below(5)));
    auto c = continuants(w);
    BigInt expect = (n % 2 == 0) ? -1 : 1;
    CHECK(c.determinant() == expect);
    CHECK(gcd(c.p, c.q) == 1);
  }
}

TEST_CASE("splitting ratio lies in [1, 2]") {
  SECTION("fibonacci split") {
    CHECK(compare_inequality({1, 1, 1, 1}, 2) == Rational(5, 4));
  }
  SECTION("q2 over q1 squared") {
    CHECK(compare_inequality({2, 2}, 1) == Rational(5, 4));
  }
  SECTION("exhaustive over Q = 4, n <= 10, every split") {
    std::vector<int> w;
    std::function<void()> rec = [&] {
      if (w.size() >= 2) {
        for (std::size_t k = 1; k < w.size(); ++k) {
          Rational r = compare_inequality(w, k);
          REQUIRE(r >= 1);
          REQUIRE(r <= 2);
        }
      }
      if (w.size() == 10) return;
      for (int a = 1; a <= 4; ++a) {
        w.push_back(a);
        rec();
        w.pop_back();
      }
    };
    rec();
  }
}

TEST_CASE("derivative sandwich at rational points") {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    int Q = 1 + static_cast<int>(rng.below(5));
    std::size_t n = 1 + rng.below(20);
    std::vector<int> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(1 + static_cast<int>(rng.below(Q)));
    auto c = continuants(w);
    for (Rational x : {Rational(0), Rational(1, 2), Rational(1)}) {
      Rational d = c.derivative_magnitude(x);
      CHECK(d >= Rational(1) / (4 * c.q * c.q));
      CHECK(d <= Rational(1) / (c.q * c.q));
    }
  }
}

TEST_CASE("trailing ratio bounds tighten with length") {
  auto [lo1, hi1] = continuant_ratio_bounds(2, 3);
  auto [lo2, hi2] = continuant_ratio_bounds(2, 13);
  CHECK(lo1 <= lo2);
  CHECK(hi2 <= hi1);
  // The limits of the interval map: x^2 + Qx - Q = 0.
  double xmax = (-2.0 + std::sqrt(12.0)) / 2.0;
  CHECK(to_double(hi2) == Catch::Approx(xmax).margin(1e-4));
  // Every sampled word of length >= 14 lands inside.
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> w;
    for (int i = 0; i < 14 + static_cast<int>(rng.below(6)); ++i)
      w.push_back(1 + static_cast<int>(rng.below(2)));
    auto c = continuants(w);
    Rational r = Rational(c.q_prev) / Rational(c.q);
    CHECK(r >= lo2);
    CHECK(r <= hi2);
  }
}

TEST_CASE("dimension brackets of the bounded-quotient sets") {
  SECTION("single quotient collapses to a point") {
    auto b = badQ_dimension(1);
    CHECK(b.lo == 0.0);
    CHECK(b.hi == 0.0);
  }
  SECTION("depth 14 and 16 brackets overlap tightly for Q = 2") {
    auto b14 = badQ_dimension(2, 14);
    auto b16 = badQ_dimension(2, 16);
    CHECK(b14.lo <= b16.hi);
    CHECK(b16.lo <= b14.hi);
    double common_lo = std::max(b14.lo, b16.lo);
    double common_hi = std::min(b14.hi, b16.hi);
    CHECK(common_hi - common_lo < 0.02);
    CHECK(common_lo < common_hi);
  }
  SECTION("brackets grow with the quotient bound") {
    auto b2 = badQ_dimension(2, 12);
    auto b3 = badQ_dimension(3, 10);
    CHECK(b2.hi < b3.lo);
  }
}

TEST_CASE("level sums and growth diagnostics") {
  SECTION("single word: Fibonacci closed recursion") {
    double s = 0.4;
    auto res = bad_sum(1, ApproxFn::pure_exponential(AlphaForm::from_real(0)), s, 12);
    // q_n along (1,1,...) are 1, 2, 3, 5, 8, ...
    std::int64_t q_prev = 1, q = 1;  // q_0, q_1
    for (const auto& lvl : res.levels) {
      double expect = -2 * s * std::log(static_cast<double>(q));
      CHECK(lvl.log_level_sum.contains(expect));
      std::int64_t next = q + q_prev;
      q_prev = q;
      q = next;
    }
  }
  SECTION("s = 0 counts words") {
    auto res = bad_sum(3, ApproxFn::pure_exponential(AlphaForm::from_real(0)), 0.0, 8);
    for (int n = 1; n <= 8; ++n)
      CHECK(res.levels[static_cast<std::size_t>(n - 1)].log_level_sum.contains(
          n * std::log(3.0)));
  }
  SECTION("binned continuation stays consistent with the exact phase") {
    BadSumOptions opts;
    opts.enumeration_cap = 4096;  // force early binning
    auto binned = bad_sum(2, ApproxFn::pure_exponential(AlphaForm::from_real(0)), 0.3, 18, opts);
    auto exact = bad_sum(2, ApproxFn::pure_exponential(AlphaForm::from_real(0)), 0.3, 18);
    REQUIRE(exact.exact_until == 18);
    for (int n = 13; n <= 18; ++n) {
      const auto& b = binned.levels[static_cast<std::size_t>(n - 1)];
      const auto& e = exact.levels[static_cast<std::size_t>(n - 1)];
      CHECK_FALSE(b.exact);
      CHECK(b.log_level_sum.lo <= e.log_level_sum.hi);
      CHECK(e.log_level_sum.lo <= b.log_level_sum.hi);
    }
  }
  SECTION("growth factor stabilizes for Q = 2 at s = 0.3") {
    auto res = bad_sum(2, ApproxFn::pure_exponential(AlphaForm::from_real(0)), 0.3, 28);
    REQUIRE(res.growth_log.size() >= 26);
    double g25 = res.growth_log[24].mid();
    double g26 = res.growth_log[25].mid();
    CHECK(std::abs(g26 - g25) / std::abs(g25) < 1e-6);
    // Cross-depth drift of the growth shrinks monotonically through the
    // exactly enumerated levels, and stays small across the binned seam.
    std::size_t exact_g = static_cast<std::size_t>(res.exact_until) - 2;
    double prev_gap = std::abs(res.growth_log[10].mid() - res.growth_log[12].mid());
    for (std::size_t i = 12; i + 2 <= exact_g; i += 2) {
      double gap = std::abs(res.growth_log[i].mid() - res.growth_log[i + 2].mid());
      CHECK(gap <= prev_gap + 1e-12);
      prev_gap = gap;
    }
    for (std::size_t i = exact_g; i + 2 < 26; ++i)
      CHECK(std::abs(res.growth_log[i].mid() - res.growth_log[i + 2].mid()) < 1e-5);
  }
}

TEST_CASE("series verdicts from the growth bracket") {
  double s = 0.5;
  BadQGrowth growth(2, 12);
  double mid = 0.5 * (growth.lower(s) + growth.upper(s));
  SECTION("fast decay converges") {
    auto rep = bad_dichotomy(2, ApproxFn::pure_exponential(AlphaForm::from_real(2 * mid / s)),
                             s, 12);
    CHECK(rep.verdict == SeriesVerdict::zero);
  }
  SECTION("slow decay diverges") {
    auto rep = bad_dichotomy(2, ApproxFn::pure_exponential(AlphaForm::from_real(mid / (4 * s))),
                             s, 12);
    CHECK(rep.verdict == SeriesVerdict::infinite);
  }
  SECTION("boundary rates are inconclusive") {
    auto rep = bad_dichotomy(2, ApproxFn::pure_exponential(AlphaForm::from_real(mid / s)), s, 12);
    CHECK(rep.verdict == SeriesVerdict::inconclusive);
    CHECK_FALSE(rep.required_precision.empty());
  }
  SECTION("even/odd bookkeeping fields") {
    auto rep = bad_dichotomy(2, ApproxFn::pure_exponential(AlphaForm::from_real(1.0)), s, 12);
    CHECK(rep.alpha_even_odd == Catch::Approx(2.0));
    CHECK(rep.q1_factor == Catch::Approx(1.0 + std::pow(2.0, -2 * s)));
    CHECK(rep.odd_over_even_lo < rep.odd_over_even_hi);
  }
}

TEST_CASE("quotient-shift orbits") {
  SECTION("golden tail is a fixed point") {
    auto orbit = gauss_orbit(SymbolStream::constant(1), 5);
    REQUIRE(orbit.points.size() == 5);
    for (const auto& pt : orbit.points) {
      CHECK(pt.quotient == 1);
      double golden = (std::sqrt(5.0) - 1.0) / 2.0;
      CHECK(to_double(pt.enclosure_lo) <= golden);
      CHECK(golden <= to_double(pt.enclosure_hi));
    }
  }
  SECTION("period-two expansion alternates") {
    auto orbit = gauss_orbit(SymbolStream::periodic(Word({1, 2})), 6);
    // symbols are written 1-based: quotients 1,2,1,2,...
    for (std::size_t k = 0; k < orbit.points.size(); ++k)
      CHECK(orbit.points[k].quotient == (k % 2 == 0 ? 1 : 2));
    // The two orbit points alternate as well.
    CHECK(orbit.points[0].enclosure_lo == orbit.points[2].enclosure_lo);
    CHECK(orbit.points[1].enclosure_lo == orbit.points[3].enclosure_lo);
    CHECK(orbit.points[0].enclosure_lo != orbit.points[1].enclosure_lo);
  }
  SECTION("rational input terminates") {
    auto orbit = gauss_orbit(SymbolStream::finite(Word({2, 3, 1})), 10);
    CHECK(orbit.terminated);
    CHECK(orbit.points.size() <= 3);
  }
}

TEST_CASE("pair-branch conformal system") {
  BadQSystem sys{2};
  auto ifs = sys.to_conformal_ifs();
  CHECK(ifs.alphabet_size() == 4);
  // Derivative enclosure for one pair branch contains the exact values.
  Word w({0});  // pair (1,1)
  auto d = ifs.word_derivative_enclosure(w);
  // q_2 = 2, q_1 = 1: |f'| over [0,1] in [1/9, 1/4].
  CHECK(d.lo <= 1.0 / 9.0 + 1e-12);
  CHECK(d.hi >= 0.25 - 1e-12);
  // Generic estimate-mode dimension bracket contains the specialized one.
  PressureProfile prof(ifs, 4);  // depth 4 pairs = 8 quotients
  auto [glo, ghi] = dimension_bracket(prof);
  auto tight = badQ_dimension(2, 12);
  CHECK(glo <= tight.lo + 1e-9);
  CHECK(tight.hi <= ghi + 1e-9);
  // Empirical distortion stays modest and at least 1.
  double K = sys.empirical_distortion(200, 12, 9);
  CHECK(K >= 1.0);
  CHECK(K <= 4.0 + 1e-9);
}
