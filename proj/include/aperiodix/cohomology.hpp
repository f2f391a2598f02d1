#pragma once

#include <boost/multiprecision/miller_rabin.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aperiodix/error.hpp"
#include "aperiodix/label_group.hpp"
#include "aperiodix/matrix.hpp"
#include "aperiodix/polynomial.hpp"
#include "aperiodix/quadratic.hpp"
#include "aperiodix/smith.hpp"
#include "aperiodix/substitution.hpp"

namespace aperiodix {

// All words of length `len` in the language of a primitive substitution, sorted.
// Seeds are the length-len factors of the shortest sigma^k(x) long enough, then the set is
// closed under "factors of sigma(w)"; every legal word arises that way by desubstitution.
inline std::vector<std::string> legal_words(const SubstitutionRule& rule, std::size_t len) {
  std::set<std::string> seen;
  std::vector<std::string> todo;
  auto add_factors = [&](const std::string& w) {
    for (std::size_t i = 0; i + len <= w.size(); ++i) {
      std::string f = w.substr(i, len);
      if (seen.insert(f).second) todo.push_back(std::move(f));
    }
  };
  for (char x : rule.alphabet) {
    std::string w(1, x);
    while (w.size() < len) {
      std::string next;
      for (char c : w) next += rule.image(c);
      if (next.size() == w.size() && next == w) break;
      w.swap(next);
    }
    add_factors(w);
  }
  while (!todo.empty()) {
    std::string w = std::move(todo.back());
    todo.pop_back();
    std::string img;
    for (char c : w) img += rule.image(c);
    add_factors(img);
  }
  return {seen.begin(), seen.end()};
}

// Morse-Hedlund: the language is periodic iff some length n has at most n legal words.
inline bool has_periodic_language(const SubstitutionRule& rule, std::size_t max_len = 32) {
  for (std::size_t n = 1; n <= max_len; ++n)
    if (legal_words(rule, n).size() <= n) return true;
  return false;
}

struct CollaredAlphabet {
  int radius = 1;
  std::vector<std::string> symbols;   // legal words of length 2r+1; the centre letter is the tile
  std::vector<std::string> vertices;  // legal words of length 2r
  IntMatrix matrix;                   // row e: counts of each collared symbol in the image of e
  IntMatrix coboundary;               // E x V, (delta psi)(w) = psi(right end) - psi(left end)

  char base_letter(std::size_t i) const { return symbols[i][static_cast<std::size_t>(radius)]; }
};

inline CollaredAlphabet collar(const SubstitutionRule& rule, int radius = 1) {
  if (radius < 1) fail(ErrorCode::InvalidArgument, "collar radius must be positive");
  if (!is_primitive(occurrence_matrix(rule))) fail(ErrorCode::NotPrimitive, "collaring needs a primitive rule");
  const auto r = static_cast<std::size_t>(radius);
  CollaredAlphabet ca;
  ca.radius = radius;
  ca.symbols = legal_words(rule, 2 * r + 1);
  std::set<std::string> verts;
  for (const auto& s : ca.symbols) {
    verts.insert(s.substr(0, 2 * r));
    verts.insert(s.substr(1, 2 * r));
  }
  ca.vertices.assign(verts.begin(), verts.end());

  std::map<std::string, std::size_t> eidx, vidx;
  for (std::size_t i = 0; i < ca.symbols.size(); ++i) eidx[ca.symbols[i]] = i;
  for (std::size_t i = 0; i < ca.vertices.size(); ++i) vidx[ca.vertices[i]] = i;

  const std::size_t ne = ca.symbols.size();
  ca.matrix = IntMatrix(ne, ne);
  ca.coboundary = IntMatrix(ne, ca.vertices.size());
  for (std::size_t e = 0; e < ne; ++e) {
    const std::string& w = ca.symbols[e];
    std::string img;
    std::size_t start = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i == r) start = img.size();
      img += rule.image(w[i]);
    }
    const std::size_t centre_len = rule.image(w[r]).size();
    for (std::size_t j = 0; j < centre_len; ++j) {
      auto it = eidx.find(img.substr(start + j - r, 2 * r + 1));
      if (it == eidx.end()) fail(ErrorCode::NoFixedPoint, "collared image leaves the language");
      ca.matrix(e, it->second) += 1;
    }
    ca.coboundary(e, vidx.at(w.substr(1, 2 * r))) += 1;
    ca.coboundary(e, vidx.at(w.substr(0, 2 * r))) -= 1;
  }
  return ca;
}

struct DirectLimitGroup {
  int free_rank = 0;
  std::vector<std::pair<BigInt, int>> localized;  // (prime, multiplicity), ascending primes
  IntMatrix presentation;                          // the matrix whose limit was taken
  IntMatrix restricted;                            // its restriction to the eventual image
  std::size_t eventual_rank = 0;
  bool recognized = true;
  int radius = 1;                                  // collar radius when computed from a rule

  std::string name() const {
    if (!recognized) return "unrecognized";
    std::vector<std::string> parts;
    if (free_rank == 1) parts.push_back("Z");
    if (free_rank > 1) parts.push_back("Z^" + std::to_string(free_rank));
    for (const auto& [p, m] : localized)
      parts.push_back("Z[1/" + p.str() + "]" + (m > 1 ? "^" + std::to_string(m) : ""));
    if (parts.empty()) return "0";
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += " ⊕ " + parts[i];
    return s;
  }

  bool same_invariants(const DirectLimitGroup& o) const {
    return recognized == o.recognized && free_rank == o.free_rank && localized == o.localized;
  }
};

namespace detail {

inline BigInt mod_pos(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

inline IntPoly poly_mod(IntPoly p, const BigInt& m) {
  for (auto& c : p) c = mod_pos(c, m);
  poly_trim(p);
  return p;
}

inline BigInt inv_mod(const BigInt& a, const BigInt& p) {
  BigInt t = 0, nt = 1, r = p, nr = mod_pos(a, p);
  while (nr != 0) {
    BigInt q = r / nr;
    BigInt tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) fail(ErrorCode::InvalidArgument, "not invertible modulo p");
  return mod_pos(t, p);
}

// Polynomial long division over F_p.
inline std::pair<IntPoly, IntPoly> divmod_p(IntPoly a, IntPoly b, const BigInt& p) {
  a = poly_mod(a, p);
  b = poly_mod(b, p);
  if (b.empty()) fail(ErrorCode::InvalidArgument, "division by zero polynomial");
  if (a.size() < b.size()) return {{}, a};
  BigInt inv = inv_mod(b.back(), p);
  IntPoly q(a.size() - b.size() + 1, BigInt(0));
  for (std::size_t k = q.size(); k-- > 0;) {
    BigInt c = mod_pos(a[k + b.size() - 1] * inv, p);
    q[k] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) a[k + j] = mod_pos(a[k + j] - c * b[j], p);
  }
  a.resize(b.size() - 1);
  poly_trim(a);
  poly_trim(q);
  return {q, a};
}

// s*a + t*b = 1 over F_p for coprime a, b.
inline void ext_gcd_p(const IntPoly& a, const IntPoly& b, const BigInt& p, IntPoly& s, IntPoly& t) {
  IntPoly r0 = poly_mod(a, p), r1 = poly_mod(b, p);
  IntPoly s0{1}, s1{}, t0{}, t1{1};
  while (!r1.empty()) {
    auto [q, r] = divmod_p(r0, r1, p);
    IntPoly s2 = poly_mod(poly_sub(s0, poly_mul(q, s1)), p);
    IntPoly t2 = poly_mod(poly_sub(t0, poly_mul(q, t1)), p);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.size() != 1) fail(ErrorCode::InvalidArgument, "factors are not coprime modulo p");
  BigInt inv = inv_mod(r0[0], p);
  s = poly_mod(poly_mul(s0, IntPoly{inv}), p);
  t = poly_mod(poly_mul(t0, IntPoly{inv}), p);
}

inline IntPoly symmetric(IntPoly p, const BigInt& m) {
  for (auto& c : p) {
    c = mod_pos(c, m);
    if (2 * c > m) c -= m;
  }
  poly_trim(p);
  return p;
}

// Splits the monic chi = g * h over Z, where g collects the roots of positive p-adic valuation
// (g = x^b mod p) and h the p-adic units. Returns nothing when no such split exists over Z.
inline std::optional<std::pair<IntPoly, IntPoly>> split_at_prime(const IntPoly& chi, const BigInt& p) {
  const int n = poly_degree(chi);
  int b = 0;
  while (b <= n && mod_pos(chi[static_cast<std::size_t>(b)], p) == 0) ++b;
  if (b == 0) return std::make_pair(IntPoly{1}, chi);
  if (b >= n) return std::make_pair(chi, IntPoly{1});

  IntPoly g(static_cast<std::size_t>(b) + 1, BigInt(0));
  g.back() = 1;
  IntPoly h(chi.begin() + b, chi.end());
  h = poly_mod(h, p);
  IntPoly s, t;
  ext_gcd_p(g, h, p, s, t);

  BigInt norm1 = 0;
  for (const auto& c : chi) norm1 += abs(c);
  const BigInt bound = 2 * (BigInt(1) << n) * norm1 + 1;

  BigInt pk = p;
  while (pk <= bound) {
    IntPoly diff = poly_sub(chi, poly_mul(g, h));
    IntPoly e;
    for (const auto& c : diff) e.push_back(mod_pos(c / pk, p));
    poly_trim(e);
    IntPoly et = poly_mod(poly_mul(e, t), p);
    IntPoly G(et.begin(), et.begin() + std::min<std::ptrdiff_t>(b, static_cast<std::ptrdiff_t>(et.size())));
    IntPoly Q;
    if (static_cast<int>(et.size()) > b) Q.assign(et.begin() + b, et.end());
    IntPoly eq = poly_mul(e, s);
    IntPoly qh = poly_mul(Q, h);
    if (eq.size() < qh.size()) eq.resize(qh.size(), BigInt(0));
    for (std::size_t i = 0; i < qh.size(); ++i) eq[i] += qh[i];
    IntPoly H = poly_mod(eq, p);
    IntPoly gs = g, hs = h;
    if (gs.size() < G.size()) gs.resize(G.size(), BigInt(0));
    for (std::size_t i = 0; i < G.size(); ++i) gs[i] += pk * G[i];
    if (hs.size() < H.size()) hs.resize(H.size(), BigInt(0));
    for (std::size_t i = 0; i < H.size(); ++i) hs[i] += pk * H[i];
    pk *= p;
    g = poly_mod(gs, pk);
    h = poly_mod(hs, pk);
  }
  g = symmetric(g, pk);
  h = symmetric(h, pk);
  if (poly_mul(g, h) != chi) return std::nullopt;
  return std::make_pair(g, h);
}

inline IntMatrix poly_at_matrix(const IntPoly& p, const IntMatrix& a) {
  IntMatrix r(a.rows(), a.cols());
  for (std::size_t i = p.size(); i-- > 0;) {
    r = r * a;
    for (std::size_t d = 0; d < a.rows(); ++d) r(d, d) += p[i];
  }
  return r;
}

// Prime divisors of |n| (n != 0); false when a cofactor cannot be resolved.
inline bool prime_divisors(BigInt n, std::vector<BigInt>& out) {
  n = abs(n);
  for (BigInt d = 2; d * d <= n && d < 1'000'000; ++d)
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) {
    if (!boost::multiprecision::miller_rabin_test(n, 25)) return false;
    out.push_back(n);
  }
  return true;
}

inline IntMatrix hcat(const std::vector<IntMatrix>& parts, std::size_t rows) {
  std::size_t cols = 0;
  for (const auto& p : parts) cols += p.cols();
  IntMatrix m(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < p.cols(); ++j) m(i, off + j) = p(i, j);
    off += p.cols();
  }
  return m;
}

}  // namespace detail

// lim(Z^n -> Z^n) under x -> A x, recognized as Z^a + sum of Z[1/p]^b.
inline DirectLimitGroup direct_limit(const IntMatrix& a) {
  if (!a.square()) fail(ErrorCode::InvalidArgument, "direct limit needs a square matrix");
  DirectLimitGroup out;
  out.presentation = a;
  const std::size_t n = a.rows();
  if (n == 0) return out;

  // Saturated lattice of the eventual image Im(A^n).
  IntMatrix b = matrix_power(a, static_cast<unsigned>(n));
  const std::size_t r = smith_normal_form(b).rank;
  out.eventual_rank = r;
  if (r == 0) {
    out.restricted = IntMatrix(0, 0);
    return out;
  }
  IntMatrix basis;
  IntMatrix left_null = integer_kernel(b.transpose());
  if (left_null.cols() == 0)
    basis = IntMatrix::identity(n);
  else
    basis = integer_kernel(left_null.transpose());
  IntMatrix c = left_inverse_saturated(basis) * a * basis;
  if (a * basis != basis * c) fail(ErrorCode::Unrecognized, "eventual image is not invariant");
  out.restricted = c;

  const BigInt det = determinant(c);
  if (abs(det) == 1) {
    out.free_rank = static_cast<int>(r);
    return out;
  }
  std::vector<BigInt> primes;
  if (!detail::prime_divisors(det, primes)) {
    out.recognized = false;
    return out;
  }
  const IntPoly chi = characteristic_polynomial(c);
  std::vector<std::pair<BigInt, IntPoly>> parts;
  IntPoly unit_part = chi;
  int localized_total = 0;
  for (const auto& p : primes) {
    auto sp = detail::split_at_prime(chi, p);
    if (!sp) {
      out.recognized = false;
      return out;
    }
    parts.emplace_back(p, sp->first);
    localized_total += poly_degree(sp->first);
    IntPoly q;
    if (!int_poly_divides(unit_part, sp->first, &q)) {
      // Roots of positive valuation at two primes: beyond Z and Z[1/p] summands.
      out.recognized = false;
      return out;
    }
    unit_part = q;
  }
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      if (poly_degree(poly_gcd(to_rational(parts[i].second), to_rational(parts[j].second))) > 0) {
        out.recognized = false;
        return out;
      }

  if (parts.size() > 1) {
    // The invariant sublattices must already fill Z^r for the sum to be direct.
    std::vector<IntMatrix> blocks{integer_kernel(detail::poly_at_matrix(unit_part, c))};
    for (const auto& [p, g] : parts) blocks.push_back(integer_kernel(detail::poly_at_matrix(g, c)));
    if (abs(determinant(detail::hcat(blocks, r))) != 1) {
      out.recognized = false;
      return out;
    }
  }
  out.free_rank = static_cast<int>(r) - localized_total;
  for (const auto& [p, g] : parts) out.localized.emplace_back(p, poly_degree(g));
  return out;
}

namespace detail {

inline DirectLimitGroup h1_at_radius(const SubstitutionRule& rule, int radius) {
  CollaredAlphabet ca = collar(rule, radius);
  SmithForm s = smith_normal_form(ca.coboundary);
  const std::size_t e = ca.symbols.size(), rho = s.rank;
  for (std::size_t i = 0; i < rho; ++i)
    if (s.D(i, i) != 1) fail(ErrorCode::Unrecognized, "coboundary has torsion");
  // In coordinates y = U x the coboundaries are the first rho axes.
  IntMatrix conj = s.U * ca.matrix * s.U_inv;
  for (std::size_t i = rho; i < e; ++i)
    for (std::size_t j = 0; j < rho; ++j)
      if (conj(i, j) != 0) fail(ErrorCode::Unrecognized, "substitution does not preserve coboundaries");
  DirectLimitGroup g = direct_limit(conj.block(rho, rho, e - rho, e - rho));
  g.radius = radius;
  return g;
}

}  // namespace detail

// First Cech cohomology of the hull, from the Anderson-Putnam complex of collared tiles.
inline DirectLimitGroup cech_h1(const SubstitutionRule& rule) {
  validate(rule);
  if (!is_primitive(occurrence_matrix(rule))) fail(ErrorCode::NotPrimitive, "cohomology needs a primitive rule");
  if (has_periodic_language(rule)) {
    // The hull of a periodic sequence is a circle.
    DirectLimitGroup g;
    g.free_rank = 1;
    g.presentation = IntMatrix::identity(1);
    g.restricted = IntMatrix::identity(1);
    g.eventual_rank = 1;
    return g;
  }
  DirectLimitGroup r1 = detail::h1_at_radius(rule, 1);
  DirectLimitGroup r2 = detail::h1_at_radius(rule, 2);
  return r1.same_invariants(r2) ? r1 : r2;
}

struct TraceImage {
  LabelGroup group;
  std::vector<std::string> frequencies;  // exact collared frequencies
  std::vector<std::string> collared_symbols;
};

namespace detail {

template <class T>
std::vector<T> exact_left_kernel_vector(const IntMatrix& m, const T& lambda) {
  const std::size_t n = m.rows();
  Matrix<T> a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = T(static_cast<long long>(m(j, i)));
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i) - lambda;
  // Reduced row echelon form; a simple eigenvalue leaves exactly one free column.
  std::vector<std::size_t> pivcol;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < n; ++col) {
    std::size_t p = row;
    while (p < n && a(p, col) == T(0)) ++p;
    if (p == n) continue;
    a.swap_rows(row, p);
    T inv = T(1) / a(row, col);
    for (std::size_t j = 0; j < n; ++j) a(row, j) = a(row, j) * inv;
    for (std::size_t i = 0; i < n; ++i)
      if (i != row && a(i, col) != T(0)) {
        T f = a(i, col);
        for (std::size_t j = 0; j < n; ++j) a(i, j) = a(i, j) - f * a(row, j);
      }
    pivcol.push_back(col);
    ++row;
  }
  if (pivcol.size() + 1 != n) fail(ErrorCode::Unrecognized, "Perron eigenvalue is not simple on the collared matrix");
  std::size_t free_col = 0;
  while (std::find(pivcol.begin(), pivcol.end(), free_col) != pivcol.end()) ++free_col;
  std::vector<T> v(n, T(0));
  v[free_col] = T(1);
  for (std::size_t i = 0; i < pivcol.size(); ++i) v[pivcol[i]] = T(0) - a(i, free_col);
  T sum = T(0);
  for (const auto& x : v) sum = sum + x;
  for (auto& x : v) x = x / sum;
  return v;
}

inline Rational rational_gcd(const std::vector<Rational>& v) {
  BigInt den = 1;
  for (const auto& x : v) den = boost::multiprecision::lcm(den, denominator(x));
  BigInt g = 0;
  for (const auto& x : v) g = boost::multiprecision::gcd(g, numerator(x) * (den / denominator(x)));
  return Rational(g, den);
}

}  // namespace detail

// Subgroup of R generated by lambda^-k f_i, f the collared Perron frequencies.
inline TraceImage trace_image(const SubstitutionRule& rule) {
  validate(rule);
  IntMatrix m = occurrence_matrix(rule);
  PerronData pd = perron_data(m);
  CollaredAlphabet ca = collar(rule, 1);
  TraceImage out{LabelGroup::cyclic(1), {}, ca.symbols};
  const int deg = poly_degree(pd.minpoly);
  const bool periodic = has_periodic_language(rule);

  if (deg == 1) {
    Rational lambda(-pd.minpoly[0]);
    auto f = detail::exact_left_kernel_vector<Rational>(ca.matrix, lambda);
    for (const auto& x : f) out.frequencies.push_back(x.str());
    Rational g = detail::rational_gcd(f);
    if (periodic) {
      if (numerator(g) != 1) fail(ErrorCode::Unrecognized, "frequency lattice does not contain 1");
      out.group = LabelGroup::cyclic(static_cast<std::int64_t>(denominator(g)));
      return out;
    }
    std::vector<BigInt> primes;
    if (!detail::prime_divisors(numerator(lambda), primes) || primes.size() != 1)
      fail(ErrorCode::Unrecognized, "lambda1 = " + lambda.str() + " is not a prime power; generators: gcd " + g.str());
    out.group = LabelGroup::scaled_localized(g, static_cast<int>(primes[0]));
    return out;
  }

  if (deg == 2 && abs(pd.minpoly[0]) == 1) {
    // lambda = (-c1 + sqrt(c1^2 - 4 c0)) / 2 for x^2 + c1 x + c0.
    const BigInt c1 = pd.minpoly[1], c0 = pd.minpoly[0];
    const auto disc = static_cast<std::int64_t>(c1 * c1 - 4 * c0);
    QuadNum lambda(Rational(-c1, 2), Rational(1, 2), disc);
    auto f = detail::exact_left_kernel_vector<QuadNum>(ca.matrix, lambda);
    for (const auto& x : f) out.frequencies.push_back(x.str());
    // Z[lambda] = Z + lambda Z is closed under lambda^-1 for a unit, so f_i and lambda f_i span the group.
    std::vector<std::pair<Rational, Rational>> gens;
    for (const auto& x : f) {
      QuadNum y = QuadNum(x.r(), x.s(), disc);
      gens.emplace_back(y.r(), y.s());
      QuadNum z = y * lambda;
      gens.emplace_back(z.r(), z.s());
    }
    BigInt den = 1;
    for (const auto& [r, s] : gens) den = boost::multiprecision::lcm(den, boost::multiprecision::lcm(denominator(r), denominator(s)));
    // Two-column Hermite reduction of the integer vectors den * (r, s).
    std::vector<std::pair<BigInt, BigInt>> v;
    for (const auto& [r, s] : gens) v.emplace_back(numerator(Rational(r * den)), numerator(Rational(s * den)));
    std::pair<BigInt, BigInt> top{0, 0};
    for (auto& w : v) {
      while (w.second != 0) {
        if (top.second == 0 || abs(w.second) < abs(top.second)) std::swap(top, w);
        if (w.second == 0) break;
        BigInt q = w.second / top.second;
        w.first -= q * top.first;
        w.second -= q * top.second;
      }
    }
    BigInt h = 0;
    for (const auto& w : v) h = boost::multiprecision::gcd(h, w.first);
    if (top.second == 0) fail(ErrorCode::Unrecognized, "frequency lattice has rank 1");
    if (h != den) fail(ErrorCode::Unrecognized, "rational part of the frequency lattice is not Z");
    QuadNum rho(Rational(top.first, den), Rational(top.second, den), disc);
    out.group = LabelGroup::two_gen(static_cast<double>(rho.approx()));
    return out;
  }

  std::string raw;
  for (double x : pd.freq) raw += (raw.empty() ? "" : ",") + std::to_string(x);
  fail(ErrorCode::Unrecognized, "lambda1 is neither an integer nor a quadratic unit; letter frequencies " + raw);
}

}  // namespace aperiodix
