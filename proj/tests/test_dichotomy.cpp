#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stt/dichotomy.hpp"
#include "stt/rng.hpp"

using namespace stt;

namespace {
const double kLog2 = std::log(2.0);
const double kLog3 = std::log(3.0);

ApproxFn cantor_critical_family(const Rational& beta) {
  // psi(n) = 3^-n * n^{-beta * 2 log3/log2}; at s = d/2 the series term is
  // n^{-beta}.
  return ApproxFn::exp_poly(Rational(1), BetaForm::log_ratio(2 * beta, Rational(3), Rational(2)),
                            AlphaForm::exact(1, 3));
}
}  // namespace

TEST_CASE("critical sum terms") {
  auto cantor = make_cantor_ifs();
  double s = kLog2 / (2 * kLog3);

  SECTION("exponent cancellation gives constant terms") {
    auto psi = ApproxFn::pure_exponential(AlphaForm::exact(1, 3));
    for (std::int64_t n : {1, 5, 40})
      CHECK(critical_sum_term(cantor, psi, s, n) == Catch::Approx(1.0).epsilon(1e-12));
  }
  SECTION("polynomial correction gives n^-2") {
    auto psi = cantor_critical_family(Rational(2));
    for (std::int64_t n : {1, 3, 10})
      CHECK(critical_sum_term(cantor, psi, s, n) ==
            Catch::Approx(std::pow(n, -2.0)).epsilon(1e-10));
  }
  SECTION("vanishing psi gives zero terms") {
    auto psi = ApproxFn::from_table({Rational(1, 2), Rational(0)});
    CHECK(critical_sum_term(cantor, psi, s, 2) == 0.0);
  }
}

TEST_CASE("classifier on the Cantor family") {
  auto cantor = make_cantor_ifs();
  auto zeros = SymbolStream::constant(0);
  double d = kLog2 / kLog3;

  SECTION("critical pure-exponential target diverges to full measure") {
    auto v = classify(cantor, zeros, ApproxFn::pure_exponential(AlphaForm::exact(1, 3)));
    CHECK(v.convergence == Convergence::diverges);
    CHECK(v.measure == MeasureStatement::full);
    CHECK(v.s == Catch::Approx(d / 2).epsilon(1e-12));
    CHECK(v.dim_w == Catch::Approx(d / 2).epsilon(1e-12));
    CHECK_FALSE(v.heuristic);
  }
  SECTION("n^-2-corrected family converges to zero measure") {
    auto v = classify(cantor, zeros, cantor_critical_family(Rational(2)));
    CHECK(v.convergence == Convergence::converges);
    CHECK(v.measure == MeasureStatement::zero);
  }
  SECTION("super-exponential table yields dimension zero") {
    std::vector<Rational> tbl;
    for (int n = 1; n <= 24; ++n) tbl.push_back(rational_pow(Rational(1, 2), n * n));
    ClassifyOptions opts;
    opts.s = 0.25;
    auto v = classify(cantor, zeros, ApproxFn::from_table(tbl), opts);
    CHECK(v.alpha_infinite);
    CHECK(v.dim_w == 0.0);
    CHECK(v.measure == MeasureStatement::zero);
    CHECK(v.heuristic);
  }
  SECTION("verdict flips exactly at beta = 1") {
    for (int num = 1; num <= 8; ++num) {
      Rational beta(num, 4);
      auto v = classify(cantor, zeros, cantor_critical_family(beta));
      if (beta <= 1) {
        CHECK(v.convergence == Convergence::diverges);
        CHECK(v.measure == MeasureStatement::full);
      } else {
        CHECK(v.convergence == Convergence::converges);
        CHECK(v.measure == MeasureStatement::zero);
      }
    }
  }
  SECTION("off-critical s lands on the dimension branches") {
    auto psi = ApproxFn::pure_exponential(AlphaForm::exact(1, 3));
    ClassifyOptions low, high;
    low.s = d / 4;     // P(s) > s alpha
    high.s = d * 0.9;  // P(s) < s alpha
    auto vl = classify(cantor, zeros, psi, low);
    CHECK(vl.convergence == Convergence::diverges);
    CHECK(vl.measure == MeasureStatement::dimension_above_s);
    auto vh = classify(cantor, zeros, psi, high);
    CHECK(vh.convergence == Convergence::converges);
    CHECK(vh.measure == MeasureStatement::zero);
  }
}

TEST_CASE("table-mode verdicts carry the heuristic marker") {
  auto cantor = make_cantor_ifs();
  auto zeros = SymbolStream::constant(0);
  std::vector<Rational> tbl;
  for (int n = 1; n <= 40; ++n) tbl.push_back(rational_pow(Rational(1, 9), n));
  ClassifyOptions opts;
  opts.s = kLog2 / (2 * kLog3);
  auto v = classify(cantor, zeros, ApproxFn::from_table(tbl), opts);
  CHECK(v.heuristic);
  CHECK((v.convergence == Convergence::heuristic_converges ||
         v.convergence == Convergence::converges));
  CHECK_FALSE(v.partial_sums.empty());
}

TEST_CASE("scale invariance of the verdict") {
  auto cantor = make_cantor_ifs();
  auto zeros = SymbolStream::constant(0);
  for (Rational c : {Rational(1, 7), Rational(1), Rational(50)}) {
    for (Rational beta : {Rational(1, 2), Rational(1), Rational(2)}) {
      auto base = classify(cantor, zeros, cantor_critical_family(beta));
      auto scaled = classify(
          cantor, zeros,
          ApproxFn::exp_poly(c, BetaForm::log_ratio(2 * beta, Rational(3), Rational(2)),
                             AlphaForm::exact(1, 3)));
      CHECK(base.convergence == scaled.convergence);
      CHECK(base.measure == scaled.measure);
    }
  }
}

TEST_CASE("verdict consistency") {
  // full measure only ever appears with s equal to the shrinking-target
  // dimension (or on the dimension_above_s branch).
  auto two = make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 4), Rational(3, 4)}});
  auto zeros = SymbolStream::constant(0);
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    double alpha = 0.05 + rng.unit();
    auto psi = ApproxFn::pure_exponential(AlphaForm::from_real(alpha));
    ClassifyOptions opts;
    if (trial % 2) opts.s = 0.05 + 0.9 * rng.unit();
    auto v = classify(two, zeros, psi, opts);
    if (v.measure == MeasureStatement::full) {
      CHECK(std::abs(v.s - v.dim_w) < 1e-10);
    }
    if (v.s > v.dim_w + 1e-9) CHECK(v.measure != MeasureStatement::full);
  }
}

TEST_CASE("missing-digit crosscheck") {
  SECTION("quadratic phi converges at the dimension") {
    LsvInstance inst;
    inst.base = 3;
    inst.digits = {0, 2};
    inst.phi = ApproxFn::exp_poly(Rational(1), BetaForm::rational(2), AlphaForm::from_real(0));
    inst.s = kLog2 / kLog3;
    auto rep = lsv_crosscheck(inst);
    CHECK(rep.direct == Convergence::converges);
    CHECK(rep.agree);
  }
  SECTION("identity-threshold phi diverges at the dimension") {
    LsvInstance inst;
    inst.base = 3;
    inst.digits = {0, 2};
    inst.phi = ApproxFn::exp_poly(Rational(1), BetaForm::rational(1), AlphaForm::from_real(0));
    inst.s = kLog2 / kLog3;
    auto rep = lsv_crosscheck(inst);
    CHECK(rep.direct == Convergence::diverges);
    CHECK(rep.translated.measure == MeasureStatement::full);
    CHECK(rep.agree);
  }
  SECTION("improper digit sets are rejected") {
    CHECK_THROWS(make_missing_digit_ifs(3, {0, 1, 2}));
    CHECK_THROWS(make_missing_digit_ifs(3, {0}));
  }
  SECTION("randomized agreement") {
    Rng rng(2024);
    int done = 0;
    while (done < 20) {
      int b = 3 + static_cast<int>(rng.below(4));
      std::vector<int> digits;
      for (int d = 0; d < b; ++d)
        if (rng.unit() < 0.6) digits.push_back(d);
      if (static_cast<int>(digits.size()) < 2 || static_cast<int>(digits.size()) == b) continue;
      double gamma = std::log(static_cast<double>(digits.size())) / std::log(b);
      Rational kappa(2 + static_cast<int>(rng.below(4)), 2);  // 1 .. 5/2
      double s = 0.1 + 0.9 * gamma * rng.unit();
      // keep clear of the critical manifold so float sign checks are stable
      if (std::abs(gamma - s * to_double(kappa)) < 0.02) continue;
      LsvInstance inst;
      inst.base = b;
      inst.digits = digits;
      inst.phi =
          ApproxFn::exp_poly(Rational(1), BetaForm::rational(kappa), AlphaForm::from_real(0));
      inst.s = s;
      auto rep = lsv_crosscheck(inst);
      INFO("b=" << b << " #J=" << digits.size() << " kappa=" << kappa << " s=" << s);
      CHECK(rep.agree);
      ++done;
    }
  }
  SECTION("super-exponential phi converges") {
    LsvInstance inst;
    inst.base = 3;
    inst.digits = {0, 2};
    inst.phi = ApproxFn::exp_poly(Rational(1), BetaForm::rational(0), AlphaForm::from_real(0.5));
    inst.s = 0.4;
    auto rep = lsv_crosscheck(inst);
    CHECK(rep.direct == Convergence::converges);
    CHECK(rep.agree);
  }
}

TEST_CASE("ball restriction is recorded and verdict-invariant") {
  auto cantor = make_cantor_ifs();
  auto zeros = SymbolStream::constant(0);
  auto psi = ApproxFn::pure_exponential(AlphaForm::exact(1, 3));
  ClassifyOptions opts;
  opts.ball_cylinder = Word::parse("01", 2);
  auto v = classify(cantor, zeros, psi, opts);
  auto plain = classify(cantor, zeros, psi);
  REQUIRE(v.ball_restriction.has_value());
  CHECK(*v.ball_restriction == "01");
  CHECK(v.convergence == plain.convergence);
  CHECK(v.measure == plain.measure);
}
