#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "aperiodix/error.hpp"

namespace aperiodix {

using TileLengths = std::map<char, double>;

// Atoms sit at the left endpoint of each tile, so N tiles give N atoms and x_0 = 0.
struct AtomChain {
  std::vector<double> positions;
  std::string tile_letters;
  TileLengths lengths;
  double total_length = 0;
  double mean_spacing = 0;  // total_length / N

  std::size_t size() const noexcept { return positions.size(); }
};

inline AtomChain positions_from_word(const std::string& word, const TileLengths& lengths) {
  if (word.empty()) fail(ErrorCode::EmptyWord, "no atoms in an empty word");
  std::array<double, 256> len{};
  std::array<bool, 256> known{};
  for (const auto& [c, d] : lengths) {
    if (!(d > 0)) fail(ErrorCode::InvalidArgument, std::string("tile length must be positive for ") + c);
    len[static_cast<unsigned char>(c)] = d;
    known[static_cast<unsigned char>(c)] = true;
  }
  AtomChain chain;
  chain.tile_letters = word;
  chain.positions.reserve(word.size());
  // Positions are rebuilt from letter counts so every x_n carries only a few roundings.
  std::array<std::size_t, 256> count{};
  for (unsigned char c : word) {
    if (!known[c]) fail(ErrorCode::InvalidArgument, std::string("no tile length for letter ") + char(c));
    double x = 0;
    for (const auto& [l, d] : lengths) x += static_cast<double>(count[static_cast<unsigned char>(l)]) * d;
    chain.positions.push_back(x);
    ++count[c];
  }
  double total = 0;
  for (const auto& [l, d] : lengths) {
    if (count[static_cast<unsigned char>(l)]) chain.lengths[l] = d;
    total += static_cast<double>(count[static_cast<unsigned char>(l)]) * d;
  }
  chain.total_length = total;
  chain.mean_spacing = word.empty() ? 0 : total / static_cast<double>(word.size());
  return chain;
}

// Divides every coordinate by `unit`, e.g. the mean spacing so that k is measured in inverse spacings.
inline AtomChain rescaled(AtomChain chain, double unit) {
  for (auto& x : chain.positions) x /= unit;
  for (auto& [c, d] : chain.lengths) d /= unit;
  chain.total_length /= unit;
  chain.mean_spacing /= unit;
  return chain;
}

struct FluctuationStats {
  std::vector<double> u;
  double delta_u_raw = 0;
  double delta_u = 0;  // raw width divided by the spread of tile lengths
  double beta_fit = 0;
  double beta_residual = 0;
  std::size_t beta_points = 0;
};

inline constexpr std::size_t kMinFluctuationAtoms = 16;

inline FluctuationStats fluctuation_stats(const AtomChain& chain, double dbar) {
  const std::size_t n = chain.size();
  if (n < kMinFluctuationAtoms) fail(ErrorCode::TooShort, "fluctuation statistics need at least 16 atoms");
  FluctuationStats st;
  st.u.resize(n);
  const double x0 = chain.positions.front();
  for (std::size_t i = 0; i < n; ++i) st.u[i] = (chain.positions[i] - x0) - dbar * static_cast<double>(i);
  auto [lo, hi] = std::minmax_element(st.u.begin(), st.u.end());
  st.delta_u_raw = *hi - *lo;

  double dmin = 0, dmax = 0;
  bool first = true;
  for (const auto& [c, d] : chain.lengths) {
    dmin = first ? d : std::min(dmin, d);
    dmax = first ? d : std::max(dmax, d);
    first = false;
  }
  st.delta_u = dmax > dmin ? st.delta_u_raw / (dmax - dmin) : 0.0;

  // Least squares of log sup_{n<m}|u_n| against log m over dyadic m.
  std::vector<double> xs, ys;
  double sup = 0;
  std::size_t next = 16;
  for (std::size_t i = 0; i < n; ++i) {
    sup = std::max(sup, std::abs(st.u[i]));
    if (i + 1 == next) {
      if (sup > 1e-12) {
        xs.push_back(std::log(static_cast<double>(next)));
        ys.push_back(std::log(sup));
      }
      next *= 2;
    }
  }
  st.beta_points = xs.size();
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    st.beta_fit = sxy / sxx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r = ys[i] - (my + st.beta_fit * (xs[i] - mx));
      ss += r * r;
    }
    st.beta_residual = std::sqrt(ss / static_cast<double>(xs.size()));
  }
  return st;
}

}  // namespace aperiodix
