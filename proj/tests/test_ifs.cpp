#include <catch2/catch_amalgamated.hpp>

#include "stt/exact.hpp"
#include "stt/ifs.hpp"
#include "stt/rng.hpp"

using namespace stt;

TEST_CASE("exact rational parsing") {
  CHECK(parse_rational("1/3") == Rational(1, 3));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-2.5e-3") == Rational(-1, 400));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(format_rational(Rational(1, 3)) == "1/3");
  CHECK(format_rational(Rational(4)) == "4");
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK(rational_from_double(0.375) == Rational(3, 8));
}

TEST_CASE("cylinder diameters multiply exactly") {
  auto cantor = make_cantor_ifs();
  CHECK(cantor.diam() == 1);
  CHECK(cantor.cylinder_diameter(Word::parse("00", 2)) == Rational(1, 9));
  CHECK(cantor.cylinder_diameter(Word{}) == 1);

  auto two = make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 4), Rational(3, 4)}});
  CHECK(two.cylinder_diameter(Word::parse("01", 2)) == Rational(1, 8));

  // Multiplicativity: diam(uv) = diam(u) diam(v) / diam(X), exactly.
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Word u, v;
    for (int i = 0; i < 6; ++i) {
      u.push_back(static_cast<int>(rng.below(2)));
      v.push_back(static_cast<int>(rng.below(2)));
    }
    CHECK(two.cylinder_diameter(u.concat(v)) * two.diam() ==
          two.cylinder_diameter(u) * two.cylinder_diameter(v));
  }
  CHECK_THROWS_AS(cantor.cylinder_diameter(Word({2})), std::out_of_range);
}

TEST_CASE("appending a symbol scales the diameter within the ratio bounds") {
  auto two = make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 3), Rational(2, 3)}});
  Word w;
  Rational prev = two.diam();
  for (int s : {0, 1, 1, 0, 1}) {
    w.push_back(s);
    Rational cur = two.cylinder_diameter(w);
    CHECK(cur >= prev * two.a_min_exact());
    CHECK(cur <= prev * two.a_max_exact());
    prev = cur;
  }
}

TEST_CASE("separation classification") {
  auto cantor = make_cantor_ifs();
  auto rep = cantor.check_separation();
  CHECK(rep.kind == Separation::ssc);
  REQUIRE(rep.gap.has_value());
  CHECK(*rep.gap == Rational(1, 3));

  auto touching = make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 2), Rational(1, 2)}});
  CHECK(touching.check_separation().kind == Separation::osc_only);

  auto overlapping =
      make_line_ifs({{Rational(3, 5), Rational(0)}, {Rational(3, 5), Rational(2, 5)}});
  CHECK(overlapping.check_separation().kind == Separation::overlapping);
}

TEST_CASE("hull endpoints are exact, including reflections") {
  auto cantor = make_cantor_ifs();
  CHECK(cantor.hull()[0] == std::make_pair(Rational(0), Rational(1)));

  // f0(x) = -x/3 + 1/3, f1(x) = x/3 + 2/3: hull still solvable exactly.
  IfsSpec refl = IfsSpec::similarity(
      {{Rational(1, 3), {Rational(1, 3)}, -1}, {Rational(1, 3), {Rational(2, 3)}, +1}}, 1);
  auto [lo, hi] = refl.hull()[0];
  CHECK(lo >= 0);
  CHECK(hi <= 1);
  CHECK(lo < hi);
  // Fixed point of the reflecting branch lies inside.
  CHECK(lo <= Rational(1, 4));
  CHECK(hi >= Rational(1, 4));
}

TEST_CASE("projection encloses the named points") {
  auto cantor = make_cantor_ifs();
  Rational tol(1, 1000000);

  auto near = [&](const SymbolStream& coding, const Rational& target) {
    auto box = cantor.project(coding, tol);
    REQUIRE(box.size() == 1);
    CHECK(box[0].second - box[0].first <= tol);
    CHECK(box[0].first <= target);
    CHECK(target <= box[0].second);
  };
  near(SymbolStream::constant(0), Rational(0));
  near(SymbolStream::constant(1), Rational(1));
  near(SymbolStream::periodic(Word::parse("01", 2)), Rational(1, 4));
}

TEST_CASE("projection respects the shift") {
  auto two = make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 4), Rational(3, 4)}});
  Rational tol(1, 100000);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Word cyc;
    for (int i = 0; i < 5; ++i) cyc.push_back(static_cast<int>(rng.below(2)));
    auto stream = SymbolStream::periodic(cyc);
    auto full = two.project(stream, tol);
    // shifted coding: drop the first symbol
    Word shifted_cycle = cyc.slice1(2, cyc.size()).concat(cyc.prefix(1));
    auto shifted = two.project(SymbolStream::periodic(shifted_cycle), tol);
    const auto& m = two.maps()[cyc.at1(1)];
    Rational lo = m.ratio * shifted[0].first + m.translation[0];
    Rational hi = m.ratio * shifted[0].second + m.translation[0];
    // ||pi(i) - f_{i_1}(pi(sigma i))|| <= 2 tol
    CHECK(full[0].first <= hi + 2 * tol);
    CHECK(lo <= full[0].second + 2 * tol);
  }
}

TEST_CASE("conformal enclosures carry the distortion constant") {
  ConformalSystem sys;
  sys.a_min = 0.2;
  sys.a_max = 0.5;
  sys.branch_derivative = [](int branch, const Word&) {
    return branch == 0 ? Interval(0.2, 0.25) : Interval(0.4, 0.5);
  };
  auto ifs = IfsSpec::conformal(2, sys, Rational(1), 1.5);
  Word w = Word::parse("01", 2);
  Interval d = ifs.word_derivative_enclosure(w);
  CHECK(d.lo <= 0.2 * 0.4);
  CHECK(d.hi >= 0.25 * 0.5);
  Interval diam = ifs.cylinder_diameter_enclosure(w);
  CHECK(diam.lo <= 0.08 / 1.5);
  CHECK(diam.hi >= 0.125 * 1.5);
}

TEST_CASE("declared diameter must match the attractor") {
  CHECK_THROWS(IfsSpec::similarity({{Rational(1, 3), {Rational(0)}, +1},
                                    {Rational(1, 3), {Rational(2, 3)}, +1}},
                                   1, Rational(2)));
  CHECK_THROWS(make_line_ifs({{Rational(3, 2), Rational(0)}}));  // ratio out of (0,1)
}
