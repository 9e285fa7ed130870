#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "stt/counterexample.hpp"

using namespace stt;

namespace {
IfsSpec two_ratio() {
  return make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 4), Rational(3, 4)}});
}
}  // namespace

TEST_CASE("transfer obstruction certificate") {
  SECTION("positive relative entropy with the identity to 1e-10") {
    CounterexampleConfig cfg{two_ratio(), 0.2, std::nullopt, std::nullopt};
    auto rep = prop31_certificate(cfg);
    CHECK(rep.positivity);
    CHECK(rep.d_kl > 0);
    CHECK(rep.identity_residual < 1e-10);
    CHECK(rep.tail_series_value ==
          Catch::Approx(1.0 / std::expm1(rep.d_kl / 2)).epsilon(1e-12));
    CHECK(rep.tail_series_value > 0);
  }
  SECTION("geometric tail closed form") {
    // A divergence of exactly 2 log 2 sums to 1.
    CHECK(1.0 / std::expm1(std::log(2.0)) == Catch::Approx(1.0).epsilon(1e-14));
  }
  SECTION("uniform ratios are refused") {
    CounterexampleConfig cfg{make_cantor_ifs(), 0.2, std::nullopt, std::nullopt};
    CHECK_THROWS_AS(prop31_certificate(cfg), std::invalid_argument);
  }
  SECTION("overlapping systems are refused") {
    CounterexampleConfig cfg{
        make_line_ifs({{Rational(3, 5), Rational(0)}, {Rational(1, 2), Rational(1, 2)}}), 0.2,
        std::nullopt, std::nullopt};
    CHECK_THROWS_AS(prop31_certificate(cfg), std::invalid_argument);
  }
}

TEST_CASE("witness sequence on the standard configuration") {
  auto cfg = CounterexampleConfig::standard();
  auto rep = prop32_witness(cfg);
  CHECK(rep.all_verified);
  CHECK(rep.growth_ok);
  REQUIRE(rep.levels.size() == 3);
  for (const auto& lvl : rep.levels) {
    CHECK(lvl.ell_positive);
    CHECK(lvl.structure_ok);
    CHECK(lvl.membership_ok);
    CHECK(lvl.exclusion_ok);
    CHECK(lvl.exact_distance_used);
  }
  // The anchor gaps swallow the block lengths.
  for (std::size_t i = 1; i < rep.ell_over_n.size(); ++i)
    CHECK(rep.ell_over_n[i] < rep.ell_over_n[i - 1]);
  CHECK(rep.slope_strictly_below);
  CHECK(rep.pressure_slope < rep.log_a1);
  CHECK(rep.convexity_residual >= -1e-10);
}

TEST_CASE("witness refuses degenerate inputs") {
  auto cfg = CounterexampleConfig::standard();
  SECTION("uniform ratios") {
    cfg.ifs = make_cantor_ifs();
    CHECK_THROWS_AS(prop32_witness(cfg), std::invalid_argument);
  }
  SECTION("rate at or above the dimension") {
    cfg.alpha = 0.95;
    CHECK_THROWS_AS(prop32_witness(cfg), std::invalid_argument);
  }
  SECTION("anchor list shorter than the level count") {
    WitnessOptions opts;
    opts.n_seq = {200};
    opts.k_max = 3;
    CHECK_THROWS_AS(prop32_witness(cfg, opts), std::invalid_argument);
  }
}

TEST_CASE("convexity of the pressure across configurations") {
  std::vector<IfsSpec> systems;
  systems.push_back(two_ratio());
  systems.push_back(
      make_line_ifs({{Rational(1, 3), Rational(0)}, {Rational(1, 5), Rational(4, 5)}}));
  for (const auto& ifs : systems) {
    PressureProfile p(ifs);
    double d = dimension(p);
    double slope = 0;
    for (int i = 0; i < ifs.alphabet_size(); ++i)
      slope += std::exp(d * ifs.log_ratio(i)) * ifs.log_ratio(i);
    for (double alpha : {0.1, 0.3, 0.5}) {
      if (alpha >= d) continue;
      double s = hv_exponent(p, alpha);
      CHECK(p.pressure(s) >= p.pressure(d) + (s - d) * slope - 1e-10);
    }
  }
}

TEST_CASE("witness handles larger anchors in the log domain") {
  auto cfg = CounterexampleConfig::standard();
  WitnessOptions opts;
  opts.n_seq = {200, 2000, 300000};
  opts.k_max = 3;
  auto rep = prop32_witness(cfg, opts);
  CHECK(rep.all_verified);
  CHECK(rep.levels[2].exact_distance_used == false);
}
