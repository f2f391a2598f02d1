#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "aperiodix/error.hpp"
#include "aperiodix/geometry.hpp"
#include "aperiodix/parallel.hpp"

namespace aperiodix {

namespace detail {

inline constexpr std::size_t kAtomChunk = 256;
inline constexpr std::size_t kGridBlock = 64;

struct Cplx {
  double re = 0, im = 0;
};

// Pairwise combination of partial sums with a tree fixed by the number of chunks.
inline Cplx pairwise(const std::vector<Cplx>& v, std::size_t b, std::size_t e) {
  if (e - b == 1) return v[b];
  std::size_t m = b + (e - b) / 2;
  Cplx l = pairwise(v, b, m), r = pairwise(v, m, e);
  return {l.re + r.re, l.im + r.im};
}

// G(k0 + j*dk) for j < count. Phases advance by a fixed rotation inside one call, so callers
// keep count small (one grid block) to bound the drift.
inline std::vector<Cplx> amplitude_block(const std::vector<double>& x, double k0, double dk,
                                         std::size_t count) {
  const std::size_t n = x.size();
  const std::size_t chunks = (n + kAtomChunk - 1) / kAtomChunk;
  std::vector<std::vector<Cplx>> partial(count, std::vector<Cplx>(chunks));
  std::vector<double> re(count), im(count);
  for (std::size_t c = 0; c < chunks; ++c) {
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    const std::size_t end = std::min(n, (c + 1) * kAtomChunk);
    for (std::size_t a = c * kAtomChunk; a < end; ++a) {
      double zr = std::cos(k0 * x[a]), zi = -std::sin(k0 * x[a]);
      const double wr = std::cos(dk * x[a]), wi = -std::sin(dk * x[a]);
      for (std::size_t j = 0; j < count; ++j) {
        re[j] += zr;
        im[j] += zi;
        const double t = zr * wr - zi * wi;
        zi = zr * wi + zi * wr;
        zr = t;
      }
    }
    for (std::size_t j = 0; j < count; ++j) partial[j][c] = {re[j], im[j]};
  }
  std::vector<Cplx> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = chunks ? pairwise(partial[j], 0, chunks) : Cplx{};
  return out;
}

}  // namespace detail

inline std::complex<double> fourier_sum(const AtomChain& chain, double k) {
  auto v = detail::amplitude_block(chain.positions, k, 0.0, 1);
  return {v[0].re, v[0].im};
}

// |sum_n exp(-i k x_n)|
inline double fourier_amplitude(const AtomChain& chain, double k) {
  if (chain.size() == 0) fail(ErrorCode::InvalidArgument, "empty chain");
  return std::abs(fourier_sum(chain, k));
}

struct DiffractionSpectrum {
  std::vector<double> k_values;
  std::vector<double> S;  // |G|^2 / N
  std::size_t N = 0;
  double L = 0;

  double spacing() const { return k_values.size() > 1 ? k_values[1] - k_values[0] : 0.0; }
};

inline DiffractionSpectrum structure_factor_grid(const AtomChain& chain, double k_min, double k_max,
                                                 std::size_t samples, unsigned threads = 1) {
  if (samples < 2) fail(ErrorCode::InvalidArgument, "structure factor grid needs at least 2 samples");
  if (!(k_min < k_max)) fail(ErrorCode::InvalidArgument, "structure factor grid needs k_min < k_max");
  if (chain.size() == 0) fail(ErrorCode::InvalidArgument, "empty chain");
  DiffractionSpectrum sp;
  sp.N = chain.size();
  sp.L = chain.total_length;
  sp.k_values.resize(samples);
  sp.S.resize(samples);
  const double dk = (k_max - k_min) / static_cast<double>(samples - 1);
  for (std::size_t j = 0; j < samples; ++j) sp.k_values[j] = k_min + dk * static_cast<double>(j);
  sp.k_values.back() = k_max;

  const std::size_t blocks = (samples + detail::kGridBlock - 1) / detail::kGridBlock;
  const double n = static_cast<double>(sp.N);
  parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t j0 = b * detail::kGridBlock;
      const std::size_t cnt = std::min(detail::kGridBlock, samples - j0);
      auto g = detail::amplitude_block(chain.positions, sp.k_values[j0], dk, cnt);
      for (std::size_t j = 0; j < cnt; ++j) sp.S[j0 + j] = (g[j].re * g[j].re + g[j].im * g[j].im) / n;
    }
  });
  return sp;
}

// Golden-section search for the maximum of |G| on [a, b].
inline double refine_peak(const AtomChain& chain, double a, double b, int iterations = 60) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fourier_amplitude(chain, c), fd = fourier_amplitude(chain, d);
  for (int i = 0; i < iterations && b - a > 1e-13 * (1 + std::abs(a)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fourier_amplitude(chain, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fourier_amplitude(chain, d);
    }
  }
  return fc >= fd ? c : d;
}

enum class PeakClass { Bragg, SingularContinuous, Flat };

inline const char* to_string(PeakClass c) {
  switch (c) {
    case PeakClass::Bragg: return "Bragg";
    case PeakClass::SingularContinuous: return "SingularContinuous";
    case PeakClass::Flat: return "Flat";
  }
  return "Flat";
}

struct ScalingThresholds {
  double bragg = 0.95;
  double singular = 0.2;
};

struct PeakScaling {
  double k_star = 0;
  std::vector<unsigned> orders;
  std::vector<double> lengths;     // L_N per order
  std::vector<double> k_refined;   // local maximum used per order
  std::vector<double> amplitudes;  // |G_N(k)|
  std::vector<double> structure;   // S_N(k) = |G_N|^2 / N
  double gamma_raw = 0;            // slope of log S_N against log L_N
  double gamma = 0;                // gamma_raw clamped to [0, 1.05]
  double residual = 0;
  PeakClass classification = PeakClass::Flat;
};

inline PeakClass classify_gamma(double g, const ScalingThresholds& th = {}) {
  if (g >= th.bragg) return PeakClass::Bragg;
  if (g >= th.singular) return PeakClass::SingularContinuous;
  return PeakClass::Flat;
}

// `build(order)` returns the chain of that order already scaled to unit mean spacing.
template <class ChainBuilder>
PeakScaling peak_scaling(const ChainBuilder& build, double k_star, const std::vector<unsigned>& orders,
                         const ScalingThresholds& th = {}) {
  if (orders.size() < 4) fail(ErrorCode::InvalidArgument, "peak scaling needs at least 4 orders");
  PeakScaling ps;
  ps.k_star = k_star;
  ps.orders = orders;
  std::vector<double> lx, ly;
  for (unsigned o : orders) {
    AtomChain chain = build(o);
    const double half = std::numbers::pi / chain.total_length;
    double k = k_star == 0 ? 0.0 : refine_peak(chain, k_star - half, k_star + half);
    double g = fourier_amplitude(chain, k);
    double s = g * g / static_cast<double>(chain.size());
    ps.lengths.push_back(chain.total_length);
    ps.k_refined.push_back(k);
    ps.amplitudes.push_back(g);
    ps.structure.push_back(s);
    lx.push_back(std::log(chain.total_length));
    ly.push_back(std::log(std::max(s, 1e-300)));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  ps.gamma_raw = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double r = ly[i] - (my + ps.gamma_raw * (lx[i] - mx));
    ss += r * r;
  }
  ps.residual = std::sqrt(ss / n);
  ps.gamma = std::clamp(ps.gamma_raw, 0.0, 1.05);
  ps.classification = classify_gamma(ps.gamma_raw, th);
  return ps;
}

enum class SpectrumTag { PP, SC, AC };

inline const char* to_string(SpectrumTag t) {
  switch (t) {
    case SpectrumTag::PP: return "PP";
    case SpectrumTag::SC: return "SC";
    case SpectrumTag::AC: return "AC";
  }
  return "AC";
}

struct ClassifyOptions {
  std::vector<unsigned> fit_orders;  // orders used for the scaling fits
  unsigned selection_order = 0;      // order whose grid selects candidate peaks
  double k_min = 0.25;
  double k_max = 4 * std::numbers::pi + 0.5;
  double samples_per_lobe = 4;       // grid points per 2*pi/L
  std::size_t max_peaks = 8;
  double separation_lobes = 8;       // minimum distance between chosen peaks, in units of 2*pi/L
  double flat_threshold = 0.05;      // max S/N below this means no coherent peaks at all
  ScalingThresholds thresholds;
  unsigned threads = 1;
};

struct ClassifiedSpectrum {
  DiffractionSpectrum grid;  // at the selection order
  double max_s_over_n = 0;   // over the grid, which excludes k = 0
  std::vector<PeakScaling> peaks;
  std::set<SpectrumTag> tags;
};

template <class ChainBuilder>
ClassifiedSpectrum classify_spectrum(const ChainBuilder& build, const ClassifyOptions& opt) {
  if (opt.fit_orders.size() < 4) fail(ErrorCode::InvalidArgument, "classification needs at least 4 fit orders");
  ClassifiedSpectrum out;
  AtomChain chain = build(opt.selection_order);
  const double lobe = 2 * std::numbers::pi / chain.total_length;
  const auto samples = static_cast<std::size_t>(
      std::ceil(opt.samples_per_lobe * (opt.k_max - opt.k_min) / lobe)) + 1;
  out.grid = structure_factor_grid(chain, opt.k_min, opt.k_max, samples, opt.threads);
  const auto& S = out.grid.S;
  const double n = static_cast<double>(out.grid.N);
  out.max_s_over_n = *std::max_element(S.begin(), S.end()) / n;

  // Candidate maxima, strongest first, keeping a few lobes clear of the grid ends and of each other.
  const double dk = out.grid.spacing();
  std::vector<std::size_t> cand;
  for (std::size_t j = 1; j + 1 < S.size(); ++j)
    if (S[j] > S[j - 1] && S[j] >= S[j + 1] && out.grid.k_values[j] - opt.k_min > lobe &&
        opt.k_max - out.grid.k_values[j] > lobe)
      cand.push_back(j);
  std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) { return S[a] > S[b]; });
  std::vector<double> chosen;
  for (std::size_t j : cand) {
    if (chosen.size() >= opt.max_peaks) break;
    const double k = out.grid.k_values[j];
    bool clear = std::all_of(chosen.begin(), chosen.end(), [&](double c) {
      return std::abs(c - k) > opt.separation_lobes * lobe;
    });
    if (!clear) continue;
    chosen.push_back(refine_peak(chain, k - dk, k + dk));
  }

  for (double k : chosen) out.peaks.push_back(peak_scaling(build, k, opt.fit_orders, opt.thresholds));

  if (out.max_s_over_n < opt.flat_threshold) {
    // The fitted exponents of noise maxima carry no information.
    for (auto& p : out.peaks) p.classification = PeakClass::Flat;
    out.tags.insert(SpectrumTag::AC);
    return out;
  }
  for (const auto& p : out.peaks) {
    if (p.classification == PeakClass::Bragg) out.tags.insert(SpectrumTag::PP);
    if (p.classification == PeakClass::SingularContinuous) out.tags.insert(SpectrumTag::SC);
  }
  if (out.tags.empty()) out.tags.insert(SpectrumTag::AC);
  return out;
}

// Supports of Bragg peaks, with k = 2*pi*x.
struct FourierModule {
  enum class Kind { TwoGenerator, Dyadic, Cyclic, Continuous };
  Kind kind = Kind::Continuous;
  double rho = 0;       // TwoGenerator: x = p + q*rho
  int base = 2;         // Dyadic: x = m / ((2n+1) base^N)
  int odd_max = 0;      // Dyadic: largest n
  std::int64_t q = 1;   // Cyclic: x = m / q
  std::string description;

  static FourierModule two_generator(double rho) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "2pi*(Z+rho*Z)(rho=%.10f)", rho);
    return {Kind::TwoGenerator, rho, 2, 0, 1, buf};
  }
  static FourierModule dyadic(int base, int odd_max) {
    std::string d = odd_max > 0 ? "2pi*(1/(2n+1))*Z[1/" + std::to_string(base) + "](n<=" +
                                      std::to_string(odd_max) + ")"
                                : "2pi*Z[1/" + std::to_string(base) + "]";
    return {Kind::Dyadic, 0, base, odd_max, 1, d};
  }
  static FourierModule cyclic(std::int64_t q) {
    return {Kind::Cyclic, 0, 2, 0, q, q == 1 ? "2pi*Z" : "2pi*(1/" + std::to_string(q) + ")Z"};
  }
  static FourierModule continuous() { return {Kind::Continuous, 0, 2, 0, 1, "continuous"}; }
};

struct ModuleBounds {
  int pq_max = 10;  // TwoGenerator |p|, |q|
  int n_max = 10;   // Dyadic exponent N
};

struct BraggLabel {
  double k = 0;
  double x = 0;  // k / (2 pi)
  std::vector<std::int64_t> label;  // (p,q), (n,m,N) or (m)
};

inline std::vector<BraggLabel> predicted_bragg(const FourierModule& mod, const ModuleBounds& b,
                                               double k_min, double k_max) {
  const double two_pi = 2 * std::numbers::pi;
  const double x_min = k_min / two_pi, x_max = k_max / two_pi;
  const double eps = 1e-12;
  std::vector<BraggLabel> out;
  switch (mod.kind) {
    case FourierModule::Kind::Continuous: return out;
    case FourierModule::Kind::TwoGenerator:
      for (int q = -b.pq_max; q <= b.pq_max; ++q)
        for (int p = -b.pq_max; p <= b.pq_max; ++p) {
          double x = p + q * mod.rho;
          if (x >= x_min - eps && x <= x_max + eps) out.push_back({two_pi * x, x, {p, q}});
        }
      break;
    case FourierModule::Kind::Cyclic: {
      auto lo = static_cast<std::int64_t>(std::ceil(x_min * mod.q - eps));
      auto hi = static_cast<std::int64_t>(std::floor(x_max * mod.q + eps));
      for (std::int64_t m = lo; m <= hi; ++m) {
        double x = static_cast<double>(m) / static_cast<double>(mod.q);
        out.push_back({two_pi * x, x, {m}});
      }
      break;
    }
    case FourierModule::Kind::Dyadic: {
      // Keep each value once, under its reduced fraction.
      std::map<std::pair<std::int64_t, std::int64_t>, BraggLabel> seen;
      for (int n = 0; n <= mod.odd_max; ++n) {
        std::int64_t pw = 1;
        for (int e = 0; e <= b.n_max; ++e, pw *= mod.base) {
          const std::int64_t den = (2 * n + 1) * pw;
          auto lo = static_cast<std::int64_t>(std::ceil(x_min * den - eps));
          auto hi = static_cast<std::int64_t>(std::floor(x_max * den + eps));
          for (std::int64_t m = lo; m <= hi; ++m) {
            std::int64_t g = std::gcd(m, den);
            auto key = std::make_pair(m / g, den / g);
            if (seen.count(key)) continue;
            double x = static_cast<double>(m) / static_cast<double>(den);
            seen[key] = {two_pi * x, x, {n, m, e}};
          }
        }
      }
      for (auto& [key, lab] : seen) out.push_back(lab);
      break;
    }
  }
  std::sort(out.begin(), out.end(), [](const BraggLabel& a, const BraggLabel& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.label < b.label;
  });
  // Drop numerically coincident values, keeping the first (smallest label).
  std::vector<BraggLabel> dedup;
  for (auto& l : out)
    if (dedup.empty() || std::abs(l.x - dedup.back().x) > 1e-12) dedup.push_back(l);
  return dedup;
}

// Nearest predicted peak to k; residual is |k - k_pred|. Returns false when the module is empty.
inline bool nearest_bragg(const std::vector<BraggLabel>& predicted, double k, BraggLabel& best,
                          double& residual) {
  if (predicted.empty()) return false;
  auto it = std::lower_bound(predicted.begin(), predicted.end(), k,
                             [](const BraggLabel& l, double v) { return l.k < v; });
  residual = INFINITY;
  for (auto cur : {it, it == predicted.begin() ? it : std::prev(it)}) {
    if (cur == predicted.end()) continue;
    double r = std::abs(cur->k - k);
    if (r < residual) {
      residual = r;
      best = *cur;
    }
  }
  return true;
}

}  // namespace aperiodix
