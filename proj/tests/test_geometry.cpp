#include <gtest/gtest.h>

#include "aperiodix/families.hpp"
#include "aperiodix/geometry.hpp"

using namespace aperiodix;

TEST(Positions, Examples) {
  auto c = positions_from_word("ab", {{'a', 1}, {'b', 1}});
  EXPECT_EQ(c.positions, (std::vector<double>{0, 1}));
  EXPECT_EQ(c.total_length, 2);
  EXPECT_EQ(positions_from_word("aaa", {{'a', 2}}).positions, (std::vector<double>{0, 2, 4}));

  const double t = (1 + std::sqrt(5.0)) / 2;
  auto f = positions_from_word("abaab", {{'a', t}, {'b', 1}});
  std::vector<double> want{0, t, t + 1, 2 * t + 1, 3 * t + 1};
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(f.positions[i], want[i], 1e-12);
  EXPECT_NEAR(f.mean_spacing, (3 * t + 2) / 5, 1e-12);
}

TEST(Positions, Errors) {
  EXPECT_THROW(positions_from_word("", {{'a', 1}}), Error);
  EXPECT_THROW(positions_from_word("ab", {{'a', 1}}), Error);
  EXPECT_THROW(positions_from_word("ab", {{'a', 1}, {'b', -1}}), Error);
}

TEST(Positions, ExactOnLongWords) {
  // Positions come from letter counts, so there is no drift from summing a million lengths.
  Family f = builtin_family("thue-morse");
  std::string w = family_word(f, 20);
  auto c = positions_from_word(w, {{'a', 0.1}, {'b', std::sqrt(2.0)}});
  std::size_t na = 0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) na += w[i] == 'a';
  const std::size_t last = w.size() - 1;
  EXPECT_NEAR(c.positions[last], 0.1 * na + std::sqrt(2.0) * (last - na), 1e-9);
}

TEST(Fluctuations, PeriodicIsFlat) {
  std::string w;
  for (int i = 0; i < 64; ++i) w += "ab";
  auto st = fluctuation_stats(positions_from_word(w, {{'a', 1}, {'b', 1}}), 1.0);
  EXPECT_EQ(st.delta_u, 0);
  for (double u : st.u) EXPECT_EQ(u, 0);
}

TEST(Fluctuations, FibonacciWidthIsOne) {
  Family f = builtin_family("fibonacci");
  TileLengths len = perron_tile_lengths(f);
  auto chain = family_chain(f, 16, len);
  auto st = fluctuation_stats(chain, mean_spacing(f, len));
  EXPECT_NEAR(st.delta_u, 1.0, 0.05);
  // Perron lengths differ by 1/tau, so the raw width is 1/tau as well.
  EXPECT_NEAR(st.delta_u_raw, 2 / (1 + std::sqrt(5.0)), 0.05);
}

TEST(Fluctuations, RudinShapiroExponent) {
  Family f = builtin_family("rudin-shapiro");
  TileLengths len{{'a', 1}, {'b', 2}};
  auto st = fluctuation_stats(family_chain(f, 12, len), mean_spacing(f, len));
  EXPECT_NEAR(st.beta_fit, 0.5, 0.1);
  EXPECT_GE(st.beta_points, 5u);
}

TEST(Fluctuations, TooShort) {
  try {
    fluctuation_stats(positions_from_word("abab", {{'a', 1}, {'b', 2}}), 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooShort);
  }
}
