#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "aperiodix/cut_project.hpp"
#include "aperiodix/substitution.hpp"

using namespace aperiodix;

namespace {

// Direct evaluation of sgn[cos(2 pi n s + phi) - cos(pi s)] in long double.
int chi_reference(long n, long double s, long double phi) {
  const long double pi = std::numbers::pi_v<long double>;
  long double d = std::cos(2 * pi * n * s + phi) - std::cos(pi * s);
  return d >= 0 ? 1 : -1;
}

}  // namespace

TEST(Chi, HalfSlope) {
  CPParams p(Slope::rational(1, 2), 0);
  for (int n = -6; n <= 6; ++n) EXPECT_EQ(chi(n, p), n % 2 == 0 ? 1 : -1) << n;
}

TEST(Chi, InverseGoldenFirstTerms) {
  CPParams p(Slope::inverse_golden(), 0);
  std::vector<int> got;
  for (int n = 0; n <= 4; ++n) got.push_back(chi(n, p));
  EXPECT_EQ(got, (std::vector<int>{1, -1, 1, 1, -1}));
  EXPECT_EQ(cp_word(p, 0, 5), "abaab");
}

TEST(Chi, InverseGoldenHasTheFibonacciLanguage) {
  CPParams p(Slope::inverse_golden(), 0);
  std::string fib = expand_word(make_rule("f", "ab", {"ab", "a"}), 'a', 18);
  std::string cp = cp_word(p, 0, 4000);
  for (std::size_t n = 1; n <= 12; ++n) {
    std::set<std::string> a, b;
    for (std::size_t i = 0; i + n <= 4000; ++i) {
      a.insert(cp.substr(i, n));
      b.insert(fib.substr(i, n));
    }
    EXPECT_EQ(a, b) << n;
    EXPECT_EQ(a.size(), n + 1);  // Sturmian complexity
  }
}

TEST(Chi, AgreesWithDirectFormulaAwayFromTies) {
  for (double phi : {0.0, 0.3, 1.7, 4.0}) {
    CPParams p(Slope::decimal(0.3819660113), phi);
    int checked = 0;
    for (long n = -200; n <= 200; ++n) {
      const long double s = 0.3819660113L;
      const long double pi = std::numbers::pi_v<long double>;
      long double gap = std::cos(2 * pi * n * s + phi) - std::cos(pi * s);
      if (std::abs(gap) < 1e-9) continue;
      EXPECT_EQ(chi(n, p), chi_reference(n, s, phi)) << n << " " << phi;
      ++checked;
    }
    EXPECT_GT(checked, 390);
  }
}

TEST(CpWord, Examples) {
  EXPECT_EQ(cp_word(CPParams(Slope::rational(1, 2), 0), 0, 4), "abab");
  CPParams two_fifths(Slope::rational(2, 5), 0);
  for (long n0 : {-7L, 0L, 3L, 1000000007L}) {
    std::string w = cp_word(two_fifths, n0, 40);
    for (std::size_t i = 0; i + 5 < w.size(); ++i) EXPECT_EQ(w[i], w[i + 5]);
  }
  EXPECT_THROW(cp_word(two_fifths, 0, 0), Error);
}

TEST(CpWord, GoldenFrequencies) {
  const double inv = 2 / (1 + std::sqrt(5.0));
  CPParams p(Slope::inverse_golden(), 0);
  auto small = letter_statistics(cp_word(p, 0, 8));
  EXPECT_LT(std::abs(small.frequency('a') - inv), 0.15);
  auto big = letter_statistics(cp_word(p, 0, 10000));
  EXPECT_LT(std::abs(big.frequency('a') - inv), 1e-3);
  EXPECT_LT(std::abs(big.frequency('b') - (1 - inv)), 1e-3);
}

TEST(CpWord, PhasonKeepsStatistics) {
  const double inv = 2 / (1 + std::sqrt(5.0));
  for (double phi : {0.5, 2.0, 5.5}) {
    auto st = letter_statistics(cp_word(CPParams(Slope::inverse_golden(), phi), -5000, 10000));
    EXPECT_LT(std::abs(st.frequency('a') - inv), 1e-3);
  }
}

TEST(Periodicity, Examples) {
  auto a = check_periodicity(CPParams(Slope::rational(2, 5), 0), 200);
  EXPECT_TRUE(a.periodic);
  EXPECT_EQ(a.period.value(), 5u);
  auto b = check_periodicity(CPParams(Slope::rational(1, 2), 0), 200);
  EXPECT_EQ(b.period.value(), 2u);
  auto c = check_periodicity(CPParams(Slope::inverse_golden(), 0), 10000);
  EXPECT_FALSE(c.periodic);
  EXPECT_FALSE(c.period.has_value());
}

TEST(Slope, Parsing) {
  EXPECT_EQ(Slope::parse("2/5").kind(), Slope::Kind::Rational);
  EXPECT_EQ(Slope::parse("4/10").q(), 5);
  EXPECT_NEAR(Slope::parse("1/golden").value(), 2 / (1 + std::sqrt(5.0)), 1e-15);
  EXPECT_NEAR(Slope::parse("0.25").value(), 0.25, 1e-15);
  EXPECT_THROW(Slope::parse("abc"), Error);
  EXPECT_THROW(Slope::parse("3/2"), Error);
  EXPECT_THROW(Slope::parse("1/0"), Error);
}

TEST(Phason, ReducedModTwoPi) {
  EXPECT_NEAR(CPParams::reduce(-0.5), 2 * std::numbers::pi - 0.5, 1e-12);
  EXPECT_NEAR(CPParams::reduce(7.0), 7.0 - 2 * std::numbers::pi, 1e-12);
  EXPECT_THROW(CPParams::reduce(INFINITY), Error);
}
