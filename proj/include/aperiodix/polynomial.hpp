#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "aperiodix/matrix.hpp"

namespace aperiodix {

// Coefficients are stored lowest degree first.
using IntPoly = std::vector<BigInt>;
using RatPoly = std::vector<Rational>;
using Complex = std::complex<long double>;

template <class T>
void poly_trim(std::vector<T>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

template <class T>
int poly_degree(const std::vector<T>& p) {
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] != 0) return static_cast<int>(i);
  return -1;
}

template <class T>
std::vector<T> poly_mul(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<T> c(a.size() + b.size() - 1, T(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  poly_trim(c);
  return c;
}

template <class T>
std::vector<T> poly_sub(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() < b.size()) a.resize(b.size(), T(0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  poly_trim(a);
  return a;
}

template <class T>
std::vector<T> poly_derivative(const std::vector<T>& p) {
  std::vector<T> d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * T(static_cast<long long>(i)));
  poly_trim(d);
  return d;
}

// Quotient and remainder over a field.
inline std::pair<RatPoly, RatPoly> poly_divmod(RatPoly a, RatPoly b) {
  poly_trim(a);
  poly_trim(b);
  if (b.empty()) fail(ErrorCode::InvalidArgument, "polynomial division by zero");
  if (a.size() < b.size()) return {{}, a};
  RatPoly q(a.size() - b.size() + 1, Rational(0));
  const Rational lead = b.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    Rational c = a[k + b.size() - 1] / lead;
    q[k] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
  }
  a.resize(b.size() - 1);
  poly_trim(a);
  poly_trim(q);
  return {q, a};
}

inline RatPoly poly_monic(RatPoly p) {
  poly_trim(p);
  if (p.empty()) return p;
  Rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

inline RatPoly poly_gcd(RatPoly a, RatPoly b) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    RatPoly r = poly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(a);
}

inline RatPoly to_rational(const IntPoly& p) { return RatPoly(p.begin(), p.end()); }

// Exact division of integer polynomials; returns false when b does not divide a over Z.
inline bool int_poly_divides(const IntPoly& a, const IntPoly& b, IntPoly* quotient = nullptr) {
  auto [q, r] = poly_divmod(to_rational(a), to_rational(b));
  if (!r.empty()) return false;
  for (const auto& c : q)
    if (denominator(c) != 1) return false;
  if (quotient) {
    quotient->clear();
    for (const auto& c : q) quotient->push_back(numerator(c));
  }
  return true;
}

// det(xI - A), monic, by the Faddeev-LeVerrier recursion (all divisions are exact).
inline IntPoly characteristic_polynomial(const IntMatrix& a) {
  const std::size_t n = a.rows();
  IntPoly c(n + 1, BigInt(0));
  c[n] = 1;
  IntMatrix mk(n, n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    mk = a * mk;
    for (std::size_t i = 0; i < n; ++i) mk(i, i) += c[n - k + 1];
    IntMatrix am = a * mk;
    BigInt tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += am(i, i);
    c[n - k] = -tr / static_cast<long long>(k);
  }
  return c;
}

// Yun's square-free decomposition over Q: p = lead * prod f_i^i with f_i monic, square-free, coprime.
inline std::vector<std::pair<RatPoly, int>> square_free_decomposition(const RatPoly& p) {
  std::vector<std::pair<RatPoly, int>> out;
  RatPoly f = poly_monic(p);
  if (poly_degree(f) < 1) return out;
  RatPoly fp = poly_derivative(f);
  RatPoly a = poly_gcd(f, fp);
  RatPoly b = poly_divmod(f, a).first;
  RatPoly c = poly_divmod(fp, a).first;
  RatPoly d = poly_sub(c, poly_derivative(b));
  int i = 1;
  while (poly_degree(b) >= 1) {
    RatPoly g = poly_gcd(b, d);
    if (poly_degree(g) >= 1) out.emplace_back(g, i);
    b = poly_divmod(b, g).first;
    c = poly_divmod(d, g).first;
    d = poly_sub(c, poly_derivative(b));
    ++i;
  }
  return out;
}

// Simultaneous Aberth-Ehrlich iteration for a square-free polynomial.
inline std::vector<Complex> aberth_roots(const RatPoly& p_in) {
  RatPoly p = poly_monic(p_in);
  const int n = poly_degree(p);
  if (n < 1) return {};
  std::vector<Complex> c(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) c[i] = Complex(static_cast<long double>(p[i]), 0);
  if (n == 1) return {-c[0]};

  long double radius = 0;
  for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[i]));
  radius = std::min<long double>(1 + radius, std::pow(std::abs(c[0]) + 1e-3L, 1.0L / n) + 1);

  auto eval = [&](Complex z, Complex& dp) {
    Complex v = c[n];
    dp = 0;
    for (int i = n - 1; i >= 0; --i) {
      dp = dp * z + v;
      v = v * z + c[i];
    }
    return v;
  };

  std::vector<Complex> z(n);
  const long double pi = std::acos(-1.0L);
  for (int k = 0; k < n; ++k) z[k] = std::polar(radius, 2 * pi * k / n + 0.4L);

  for (int iter = 0; iter < 2000; ++iter) {
    long double worst = 0;
    for (int i = 0; i < n; ++i) {
      Complex dp;
      Complex v = eval(z[i], dp);
      if (v == Complex(0)) continue;
      Complex ratio = v / dp;
      Complex sum = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0L / (z[i] - z[j]);
      Complex step = ratio / (1.0L - ratio * sum);
      z[i] -= step;
      worst = std::max(worst, std::abs(step) / (1 + std::abs(z[i])));
    }
    if (worst < 1e-18L) break;
  }
  for (auto& r : z)
    if (std::abs(r.imag()) <= 1e-14L * (1 + std::abs(r.real()))) r = Complex(r.real(), 0);
  return z;
}

struct PolyRoot {
  Complex value;
  int multiplicity;
};

inline std::vector<PolyRoot> polynomial_roots(const IntPoly& p) {
  std::vector<PolyRoot> out;
  for (const auto& [f, mult] : square_free_decomposition(to_rational(p)))
    for (const auto& z : aberth_roots(f)) out.push_back({z, mult});
  std::sort(out.begin(), out.end(), [](const PolyRoot& a, const PolyRoot& b) {
    if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) > std::abs(b.value);
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return out;
}

// The monic integer factor of p of least degree that vanishes at the simple root x.
inline IntPoly minimal_polynomial_of_root(const IntPoly& p, long double x) {
  std::vector<Complex> distinct;
  for (const auto& r : polynomial_roots(p)) distinct.push_back(r.value);
  std::size_t at = 0;
  for (std::size_t i = 1; i < distinct.size(); ++i)
    if (std::abs(distinct[i] - x) < std::abs(distinct[at] - x)) at = i;
  std::swap(distinct[0], distinct[at]);
  const std::size_t others = distinct.size() - 1;
  if (others > 20) fail(ErrorCode::SizeLimit, "too many distinct roots for factor search");

  for (std::size_t size = 0; size <= others; ++size) {
    for (unsigned long mask = 0; mask < (1ul << others); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountl(mask)) != size) continue;
      std::vector<Complex> prod{-distinct[0], Complex(1)};
      for (std::size_t j = 0; j < others; ++j) {
        if (!(mask & (1ul << j))) continue;
        std::vector<Complex> next(prod.size() + 1, Complex(0));
        for (std::size_t k = 0; k < prod.size(); ++k) {
          next[k + 1] += prod[k];
          next[k] -= prod[k] * distinct[j + 1];
        }
        prod = std::move(next);
      }
      IntPoly cand;
      bool integral = true;
      for (const auto& v : prod) {
        long double r = std::round(v.real());
        if (std::abs(v.imag()) > 1e-6L || std::abs(v.real() - r) > 1e-6L * (1 + std::abs(r))) {
          integral = false;
          break;
        }
        cand.push_back(BigInt(static_cast<long long>(r)));
      }
      if (integral && int_poly_divides(p, cand)) return cand;
    }
  }
  return p;
}

}  // namespace aperiodix
