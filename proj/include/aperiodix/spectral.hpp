#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aperiodix/error.hpp"
#include "aperiodix/parallel.hpp"

namespace aperiodix {

struct TightBindingChain {
  std::vector<double> onsite;   // N diagonal entries
  std::vector<double> hopping;  // N-1 off-diagonal entries, all > 0
  double wrap_hopping = 1;      // coupling between the last and first site when closed into a ring

  std::size_t size() const noexcept { return onsite.size(); }
};

struct SpectralModel {
  enum class Kind { Onsite, Hopping };
  Kind kind = Kind::Onsite;
  std::map<char, double> v;  // per-letter value
  double eps = 1;

  static SpectralModel onsite_model(double va, double vb) { return {Kind::Onsite, {{'a', va}, {'b', vb}}, 1}; }
  static SpectralModel hopping_model(double va, double vb, double eps) {
    return {Kind::Hopping, {{'a', va}, {'b', vb}}, eps};
  }
};

inline const char* to_string(SpectralModel::Kind k) {
  return k == SpectralModel::Kind::Onsite ? "onsite" : "hopping";
}

// Onsite: diagonal v_n, unit hopping. Hopping: zero diagonal, t = exp(-eps^2 (v_n + v_{n+1}) / 2).
inline TightBindingChain build_chain(const std::string& word, const SpectralModel& model) {
  if (word.size() < 2) fail(ErrorCode::TooShort, "a tight-binding chain needs at least two sites");
  std::vector<double> v(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    auto it = model.v.find(word[i]);
    if (it == model.v.end()) fail(ErrorCode::InvalidArgument, std::string("no potential for letter ") + word[i]);
    v[i] = it->second;
  }
  TightBindingChain c;
  if (model.kind == SpectralModel::Kind::Onsite) {
    c.onsite = v;
    c.hopping.assign(word.size() - 1, 1.0);
    c.wrap_hopping = 1;
  } else {
    const double h = model.eps * model.eps / 2;
    c.onsite.assign(word.size(), 0.0);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) c.hopping.push_back(std::exp(-h * (v[i] + v[i + 1])));
    c.wrap_hopping = std::exp(-h * (v.back() + v.front()));
  }
  return c;
}

enum class Boundary { Open, Periodic };

// Energies e with H phi = 2 e phi, i.e. halved matrix eigenvalues, ascending.
struct EnergySpectrum {
  std::vector<double> eigenvalues;
  Boundary boundary = Boundary::Open;

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

namespace detail {

inline void gershgorin(const TightBindingChain& c, bool ring, double& lo, double& hi) {
  const std::size_t n = c.size();
  lo = INFINITY;
  hi = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    double r = (i > 0 ? c.hopping[i - 1] : 0) + (i + 1 < n ? c.hopping[i] : 0);
    if (ring && n > 1 && (i == 0 || i + 1 == n)) r += std::abs(c.wrap_hopping);
    lo = std::min(lo, c.onsite[i] - r);
    hi = std::max(hi, c.onsite[i] + r);
  }
}

inline double pivot_floor(const TightBindingChain& c) {
  double m = 1;
  for (double b : c.hopping) m = std::max(m, b * b);
  return DBL_MIN * m;
}

// Number of matrix eigenvalues below x for the open chain (negative LDL^T pivots).
inline std::size_t open_count(const TightBindingChain& c, double x, double pivmin) {
  std::size_t cnt = 0;
  double d = c.onsite[0] - x;
  if (std::abs(d) < pivmin) d = -pivmin;
  if (d < 0) ++cnt;
  for (std::size_t i = 1; i < c.size(); ++i) {
    d = (c.onsite[i] - x) - c.hopping[i - 1] * c.hopping[i - 1] / d;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0) ++cnt;
  }
  return cnt;
}

// Same count for the ring: eliminate sites 0..N-2 carrying the border column of site N-1.
inline std::size_t ring_count(const TightBindingChain& c, double x, double pivmin) {
  const std::size_t n = c.size();
  if (n < 3) {
    if (n == 1) return c.onsite[0] < x ? 1 : 0;
    const double b = c.hopping[0] + c.wrap_hopping;
    double d0 = c.onsite[0] - x;
    if (std::abs(d0) < pivmin) d0 = -pivmin;
    double d1 = (c.onsite[1] - x) - b * b / d0;
    return (d0 < 0) + (d1 < 0);
  }
  std::size_t cnt = 0;
  double scale = 1;
  double d = c.onsite[0] - x;
  double f = c.wrap_hopping;
  double g = c.onsite[n - 1] - x;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0) ++cnt;
    g -= f * f / d;
    if (k + 2 == n) break;
    const double b = c.hopping[k];
    const double border = (k + 2 == n - 1) ? c.hopping[n - 2] * scale : 0.0;
    const double dn = (c.onsite[k + 1] - x) - b * b / d;
    f = border - b * f / d;
    d = dn;
    if (std::abs(f) > 1e100) {
      f *= 1e-100;
      g *= 1e-200;
      scale *= 1e-100;
    }
  }
  if (std::abs(g) < pivmin * scale * scale) g = -pivmin;
  if (g < 0) ++cnt;
  return cnt;
}

inline std::vector<double> bisect_all(const TightBindingChain& c, bool ring, unsigned threads) {
  const std::size_t n = c.size();
  double lo, hi;
  gershgorin(c, ring, lo, hi);
  const double pivmin = pivot_floor(c);
  const double tol = 4 * DBL_EPSILON * std::max(std::abs(lo), std::abs(hi)) + pivmin;
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      double a = lo, z = hi;
      while (z - a > tol) {
        const double mid = a + (z - a) / 2;
        if (mid <= a || mid >= z) break;
        const std::size_t cnt = ring ? ring_count(c, mid, pivmin) : open_count(c, mid, pivmin);
        if (cnt > k)
          z = mid;
        else
          a = mid;
      }
      out[k] = (a + z) / 2 / 2;
    }
  });
  return out;
}

}  // namespace detail

// Sturm-sequence bisection for every eigenvalue index; independent of the thread partition.
inline EnergySpectrum eigenvalues_tridiag(const TightBindingChain& c, unsigned threads = 1) {
  if (c.size() == 0) fail(ErrorCode::InvalidArgument, "empty chain");
  return {detail::bisect_all(c, false, threads), Boundary::Open};
}

// Spectrum of the same chain closed into a ring.
inline EnergySpectrum eigenvalues_ring(const TightBindingChain& c, unsigned threads = 1) {
  if (c.size() == 0) fail(ErrorCode::InvalidArgument, "empty chain");
  return {detail::bisect_all(c, true, threads), Boundary::Periodic};
}

// Number of energies strictly below e (open chain).
inline std::size_t sturm_count(const TightBindingChain& c, double e) {
  return detail::open_count(c, 2 * e, detail::pivot_floor(c));
}

// Number of energies strictly below e for the ring.
inline std::size_t ring_sturm_count(const TightBindingChain& c, double e) {
  return detail::ring_count(c, 2 * e, detail::pivot_floor(c));
}

inline constexpr std::size_t kOracleMaxSize = 12;

// Roots of det(H - x) by bisection on the sign changes of the leading principal minors
// p_0 = 1, p_1(x), ..., p_N(x), evaluated with the three-term recurrence in long double.
inline EnergySpectrum brute_force_eigs(const TightBindingChain& c) {
  const std::size_t n = c.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "empty chain");
  if (n > kOracleMaxSize) fail(ErrorCode::SizeLimit, "oracle limited to 12 sites");
  double glo, ghi;
  detail::gershgorin(c, false, glo, ghi);
  const long double lo0 = glo - 1, hi0 = ghi + 1;
  auto changes = [&](long double x) {
    std::size_t cnt = 0;
    long double pm2 = 1, pm1 = static_cast<long double>(c.onsite[0]) - x;
    auto sign_change = [](long double prev, long double cur) { return cur == 0 || (cur < 0) != (prev < 0); };
    if (sign_change(pm2, pm1)) ++cnt;
    for (std::size_t i = 1; i < n; ++i) {
      const long double b = c.hopping[i - 1];
      long double v = (static_cast<long double>(c.onsite[i]) - x) * pm1 - b * b * pm2;
      // A vanishing minor takes the sign opposite to its predecessor.
      long double prev = pm1 == 0 ? -pm2 : pm1;
      if (sign_change(prev, v)) ++cnt;
      pm2 = pm1;
      pm1 = v;
    }
    return cnt;
  };
  std::vector<double> roots(n);
  for (std::size_t k = 0; k < n; ++k) {
    long double a = lo0, z = hi0;
    for (int it = 0; it < 200; ++it) {
      const long double m = a + (z - a) / 2;
      if (m <= a || m >= z) break;
      if (changes(m) > k)
        z = m;
      else
        a = m;
    }
    roots[k] = static_cast<double>((a + z) / 4);
  }
  return {roots, Boundary::Open};
}

// Fraction of energies <= e.
inline double counting_function(const EnergySpectrum& s, double e) {
  if (s.size() == 0) return 0;
  auto it = std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), e);
  return static_cast<double>(it - s.eigenvalues.begin()) / static_cast<double>(s.size());
}

struct Gap {
  double lower = 0, upper = 0, width = 0;
  std::size_t index = 0;   // number of energies below the gap
  double ids_value = 0;    // index / N
  std::optional<double> bulk_ids;  // ring count at the gap centre / N
};

inline constexpr std::size_t kMinGapChain = 16;
inline constexpr double kDefaultRelThreshold = 10;

inline std::vector<Gap> detect_gaps(const EnergySpectrum& s, double rel_threshold = kDefaultRelThreshold) {
  const std::size_t n = s.size();
  if (n < kMinGapChain) fail(ErrorCode::TooShort, "gap detection needs at least 16 energies");
  std::vector<Gap> gaps;
  if (std::isinf(rel_threshold)) return gaps;
  std::vector<double> sp(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) sp[i] = s.eigenvalues[i + 1] - s.eigenvalues[i];
  std::vector<double> sorted = sp;
  const std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  double median = sorted[mid];
  if (sorted.size() % 2 == 0) {
    double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    median = (median + lower) / 2;
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (sp[i] > rel_threshold * median && sp[i] > 0) {
      Gap g;
      g.lower = s.eigenvalues[i];
      g.upper = s.eigenvalues[i + 1];
      g.width = sp[i];
      g.index = i + 1;
      g.ids_value = static_cast<double>(i + 1) / static_cast<double>(n);
      gaps.push_back(g);
    }
  return gaps;
}

// Attaches the ring-boundary counting value at each gap centre; edge states of the open chain
// can sit inside a gap and shift ids_value by 1/N, the ring count has no edges.
inline void assign_bulk_ids(std::vector<Gap>& gaps, const TightBindingChain& c) {
  const double n = static_cast<double>(c.size());
  for (auto& g : gaps)
    g.bulk_ids = static_cast<double>(ring_sturm_count(c, (g.lower + g.upper) / 2)) / n;
}

}  // namespace aperiodix
