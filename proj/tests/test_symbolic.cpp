#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "stt/rng.hpp"
#include "stt/symbolic.hpp"
#include "stt/word.hpp"

using namespace stt;

namespace {

// Independent quadratic-time period finder, straight from the definition.
std::size_t brute_minimal_period(const Word& w, std::size_t n) {
  for (std::size_t k = 1; k < n; ++k) {
    bool eq = true;
    for (std::size_t j = 1; j + k <= n && eq; ++j)
      if (w.at1(j) != w.at1(j + k)) eq = false;
    if (eq) return k;
  }
  return n;
}

void enumerate_words(int alphabet, std::size_t len, const std::function<void(const Word&)>& f) {
  Word w;
  std::function<void()> rec = [&] {
    if (w.size() == len) {
      f(w);
      return;
    }
    for (int s = 0; s < alphabet; ++s) {
      w.push_back(s);
      rec();
      w.sym.pop_back();
    }
  };
  rec();
}

}  // namespace

TEST_CASE("word slicing and serialization") {
  Word w = Word::parse("01021", 3);
  CHECK(w.size() == 5);
  CHECK(w.at1(1) == 0);
  CHECK(w.at1(5) == 1);
  CHECK(w.slice1(2, 4) == Word::parse("102", 3));
  CHECK(w.slice1(4, 2).empty());
  CHECK(w.str(3) == "01021");
  Word big({0, 11, 3});
  CHECK(big.str(12) == "0,11,3");
  CHECK(Word::parse("0,11,3", 12) == big);
  CHECK_THROWS(Word::parse("05", 3));
}

TEST_CASE("symbol streams are deterministic and 1-based") {
  auto s = SymbolStream::eventually_periodic(Word::parse("01", 2), Word::parse("10", 2));
  // 0 1 | 1 0 1 0 ...
  CHECK(s.at(1) == 0);
  CHECK(s.at(2) == 1);
  CHECK(s.at(3) == 1);
  CHECK(s.at(4) == 0);
  CHECK(s.at(6) == 0);
  CHECK(s.at(6) == 0);  // repeated query agrees
  auto t = SymbolStream::finite(Word::parse("010", 2));
  CHECK(t.at(3) == 0);
  CHECK_THROWS_AS(t.at(4), std::out_of_range);
  CHECK_THROWS_AS(s.at(0), std::out_of_range);
}

TEST_CASE("common part length") {
  CHECK(common_part_length(Word::parse("0101", 2), Word::parse("0101", 2)) == 4);
  CHECK(common_part_length(Word::parse("01", 2), Word::parse("11", 2)) == 0);
  CHECK(common_part_length(Word::parse("00110", 2), Word::parse("00101", 2)) == 3);
  CHECK(common_part_length(Word{}, Word::parse("0", 2)) == 0);
}

TEST_CASE("minimal period on the named words") {
  auto ab = SymbolStream::periodic(Word::parse("01", 2));
  CHECK(minimal_period(ab, 6) == 2);
  auto aab = SymbolStream::periodic(Word::parse("001", 2));
  CHECK(minimal_period(aab, 6) == 3);
  auto abc = SymbolStream::periodic(Word::parse("012", 3));
  CHECK(minimal_period(abc, 6) == 3);
  // No shorter shift works: whole-length fallback.
  auto distinct = SymbolStream::finite(Word::parse("012", 3));
  CHECK(minimal_period(distinct, 3) == 3);
}

TEST_CASE("minimal period agrees with brute force exhaustively") {
  for (int alphabet : {2, 3}) {
    std::size_t max_len = alphabet == 2 ? 14 : 12;
    for (std::size_t len = 1; len <= max_len; ++len) {
      enumerate_words(alphabet, len, [&](const Word& w) {
        auto stream = SymbolStream::finite(w);
        REQUIRE(minimal_period(stream, len) == brute_minimal_period(w, len));
      });
    }
  }
  // Alphabet 3 at the largest lengths, via prefixes of length-14 words.
  enumerate_words(3, 14, [&](const Word& w) {
    auto stream = SymbolStream::finite(w);
    for (std::size_t n : {13, 14})
      REQUIRE(minimal_period(stream, n) == brute_minimal_period(w, n));
  });
}

TEST_CASE("period multiples characterization") {
  auto ab = SymbolStream::periodic(Word::parse("01", 2));
  CHECK(period_multiples_check(ab, 8) == TriState::holds);
  auto aab = SymbolStream::periodic(Word::parse("001", 2));
  CHECK(period_multiples_check(aab, 7) == TriState::holds);  // m = 3 < 3.5
  auto distinct = SymbolStream::finite(Word::parse("0120", 3));
  CHECK(period_multiples_check(distinct, 4) == TriState::precondition_violated);
}

TEST_CASE("theta_r on the named systems") {
  auto cantor = make_cantor_ifs();
  auto t = theta_r(cantor, Rational(1, 5));
  REQUIRE(t.words.size() == 4);
  for (const auto& w : t.words) CHECK(w.size() == 2);

  auto two = make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 4), Rational(3, 4)}});
  auto t2 = theta_r(two, Rational(1, 4));
  std::vector<std::string> got;
  for (const auto& w : t2.words) got.push_back(w.str(2));
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<std::string>{"00", "01", "1"});

  auto t3 = theta_r(cantor, Rational(9, 10));
  REQUIRE(t3.words.size() == 2);
  CHECK(t3.words[0].size() == 1);

  auto t4 = theta_r(cantor, Rational(2));
  CHECK(t4.whole_space);
  REQUIRE(t4.words.size() == 1);
  CHECK(t4.words[0].empty());
}

TEST_CASE("theta_r is an antichain that captures every coding") {
  auto two = make_line_ifs({{Rational(1, 2), Rational(0)}, {Rational(1, 3), Rational(2, 3)}});
  auto t = theta_r(two, Rational(1, 7));
  for (std::size_t i = 0; i < t.words.size(); ++i)
    for (std::size_t j = 0; j < t.words.size(); ++j)
      if (i != j) CHECK_FALSE(t.words[i].is_prefix_of(t.words[j]));
  // Every infinite coding has exactly one prefix in the antichain.
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Word coding;
    for (int k = 0; k < 64; ++k) coding.push_back(static_cast<int>(rng.below(2)));
    int matches = 0;
    for (const auto& w : t.words)
      if (w.is_prefix_of(coding)) ++matches;
    REQUIRE(matches == 1);
  }
}

TEST_CASE("rho on the Cantor system") {
  auto cantor = make_cantor_ifs();
  auto zeros = SymbolStream::constant(0);

  SECTION("psi = 3^-n gives rho = n exactly") {
    RhoTable rt(cantor, zeros, ApproxFn::pure_exponential(AlphaForm::exact(1, 3)));
    REQUIRE(rt.has_exact_fast_path());
    for (std::int64_t n : {1, 2, 5, 17, 1000}) {
      auto r = rt.rho(n);
      CHECK_FALSE(r.clamped);
      CHECK(r.value == n);
    }
    CHECK(rt.rho_big(BigInt("123456789012345678901234567890")) ==
          BigInt("123456789012345678901234567890"));
  }

  SECTION("psi = 9^-n gives rho = 2n") {
    RhoTable rt(cantor, zeros, ApproxFn::pure_exponential(AlphaForm::exact(1, 9)));
    REQUIRE(rt.has_exact_fast_path());
    for (std::int64_t n : {1, 3, 10}) CHECK(rt.rho(n).value == 2 * n);
  }

  SECTION("psi(0) = 1 clamps to 1 with a flag") {
    RhoTable rt(cantor, zeros, ApproxFn::pure_exponential(AlphaForm::exact(1, 3)));
    auto r = rt.rho(0);
    CHECK(r.value == 1);
    CHECK(r.clamped);
  }

  SECTION("vanishing psi signals unbounded rho") {
    auto tbl = ApproxFn::from_table({Rational(1, 2), Rational(0)});
    RhoTable rt(cantor, zeros, tbl);
    CHECK_THROWS_AS(rt.rho(2), std::domain_error);
  }

  SECTION("general path tracks the fast path up to tie perturbation") {
    // A double-precision rate is a slightly different psi; at the exact ties
    // of this system the sandwich may legitimately land one step over.
    RhoTable fast(cantor, zeros, ApproxFn::pure_exponential(AlphaForm::exact(1, 3)));
    double a = std::log(3.0);
    RhoTable slow(cantor, zeros, ApproxFn::pure_exponential(AlphaForm::from_real(a)));
    REQUIRE_FALSE(slow.has_exact_fast_path());
    for (std::int64_t n = 1; n <= 200; ++n) {
      std::int64_t diff = slow.rho(n).value - fast.rho(n).value;
      CHECK((diff == 0 || diff == 1));
    }
    // Off the tie, the general path is exact.
    RhoTable offtie(cantor, zeros, ApproxFn::pure_exponential(AlphaForm::from_real(1.0)));
    for (std::int64_t n = 1; n <= 200; ++n) {
      // rho(n) = ceil(n / log 3) against direct evaluation.
      auto expect = static_cast<std::int64_t>(std::ceil(n / std::log(3.0) - 1e-12));
      CHECK(offtie.rho(n).value == expect);
    }
  }

  SECTION("exact table path matches a rational oracle") {
    std::vector<Rational> tbl;
    for (int n = 1; n <= 30; ++n) tbl.push_back(Rational(1, 1 + n * n * n));
    auto psi = ApproxFn::from_table(tbl);
    RhoTable rt(cantor, zeros, psi);
    for (std::int64_t n = 1; n <= 30; ++n) {
      auto r = rt.rho(n);
      // oracle: smallest rho with 3^-rho <= psi(n), exact rationals
      Rational target = tbl[n - 1];
      Rational diam = 1;
      std::int64_t rho = 0;
      while (diam > target) {
        diam /= 3;
        ++rho;
      }
      CHECK(r.value == std::max<std::int64_t>(rho, 1));
      CHECK_FALSE(r.clamped);
    }
  }
}

TEST_CASE("rho is monotone and R inverts it") {
  auto cantor = make_cantor_ifs();
  auto x = SymbolStream::periodic(Word::parse("01", 2));
  RhoTable rt(cantor, x, ApproxFn::pure_exponential(AlphaForm::exact(1, 3)));
  std::int64_t prev = 0;
  for (std::int64_t n = 1; n <= 300; ++n) {
    auto r = rt.rho(n);
    CHECK(r.value >= prev);
    prev = r.value;
  }
  // R(x) = max{m : x >= m + rho(m)}; here rho(m) = m so R(10) = 5.
  CHECK(rt.R(10) == 5);
  CHECK(rt.R(0) == 1);
  // R(n + rho(n)) >= n and R monotone.
  std::int64_t prev_r = 0;
  for (std::int64_t n = 1; n <= 120; ++n) {
    std::int64_t rn = rt.R(static_cast<double>(n));
    CHECK(rn >= prev_r);
    prev_r = rn;
    CHECK(rt.R(static_cast<double>(n + rt.rho(n).value)) >= n);
  }
}

TEST_CASE("R with doubled rho") {
  auto cantor = make_cantor_ifs();
  auto zeros = SymbolStream::constant(0);
  RhoTable rt(cantor, zeros, ApproxFn::pure_exponential(AlphaForm::exact(1, 9)));
  // rho(m) = 2m: R(9) = max{m : 9 >= 3m} = 3.
  CHECK(rt.R(9) == 3);
}
