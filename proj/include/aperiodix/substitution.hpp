#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aperiodix/error.hpp"
#include "aperiodix/matrix.hpp"
#include "aperiodix/polynomial.hpp"

namespace aperiodix {

inline constexpr std::size_t kDefaultLengthCap = 10'000'000;

// Reads APERIODIX_LENGTH_CAP; falls back to the default cap when unset or malformed.
inline std::size_t length_cap_from_env() {
  const char* v = std::getenv("APERIODIX_LENGTH_CAP");
  if (!v || !*v) return kDefaultLengthCap;
  char* end = nullptr;
  unsigned long long cap = std::strtoull(v, &end, 10);
  if (*end != '\0' || cap == 0) return kDefaultLengthCap;
  return static_cast<std::size_t>(cap);
}

// Letters are single characters; images[i] is the image of alphabet[i].
struct SubstitutionRule {
  std::string name;
  std::string alphabet;
  std::vector<std::string> images;

  std::size_t size() const noexcept { return alphabet.size(); }

  int index_of(char letter) const {
    auto pos = alphabet.find(letter);
    return pos == std::string::npos ? -1 : static_cast<int>(pos);
  }

  const std::string& image(char letter) const {
    int i = index_of(letter);
    if (i < 0) fail(ErrorCode::InvalidArgument, std::string("letter not in alphabet: ") + letter);
    return images[static_cast<std::size_t>(i)];
  }
};

inline void validate(const SubstitutionRule& r) {
  if (r.alphabet.size() < 2) fail(ErrorCode::InvalidRule, "alphabet needs at least two letters");
  if (r.images.size() != r.alphabet.size())
    fail(ErrorCode::InvalidRule, "one image per letter is required");
  std::array<bool, 256> seen{};
  for (unsigned char c : r.alphabet) {
    if (seen[c]) fail(ErrorCode::InvalidRule, "duplicate alphabet letter");
    seen[c] = true;
  }
  for (const auto& img : r.images) {
    if (img.empty()) fail(ErrorCode::InvalidRule, "empty image");
    for (unsigned char c : img)
      if (!seen[c]) fail(ErrorCode::InvalidRule, std::string("image uses unknown letter ") + char(c));
  }
}

inline SubstitutionRule make_rule(std::string name, std::string alphabet,
                                  std::vector<std::string> images) {
  SubstitutionRule r{std::move(name), std::move(alphabet), std::move(images)};
  validate(r);
  return r;
}

// Row i describes the image of letter i: M(i, j) = occurrences of letter j in sigma(letter i).
inline IntMatrix occurrence_matrix(const SubstitutionRule& r) {
  validate(r);
  const std::size_t a = r.size();
  IntMatrix m(a, a);
  for (std::size_t i = 0; i < a; ++i)
    for (char c : r.images[i]) m(i, static_cast<std::size_t>(r.index_of(c))) += 1;
  return m;
}

inline bool is_primitive(const IntMatrix& m) {
  const std::size_t a = m.rows();
  std::vector<char> b(a * a), p(a * a);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < a; ++j) b[i * a + j] = p[i * a + j] = m(i, j) > 0;
  for (std::size_t k = 1; k <= a * a; ++k) {
    if (std::all_of(p.begin(), p.end(), [](char v) { return v != 0; })) return true;
    std::vector<char> q(a * a, 0);
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t l = 0; l < a; ++l)
        if (p[i * a + l])
          for (std::size_t j = 0; j < a; ++j) q[i * a + j] |= b[l * a + j];
    p.swap(q);
  }
  return false;
}

struct PerronData {
  double lambda1 = 0;
  double lambda2_abs = 0;
  std::vector<double> freq;     // left eigenvector, sums to 1
  std::vector<double> lengths;  // right eigenvector, minimum entry 1
  std::optional<double> beta;   // ln(lambda2_abs) / ln(lambda1)
  IntPoly charpoly;
  IntPoly minpoly;              // minimal polynomial of lambda1
  std::vector<PolyRoot> roots;  // distinct roots of charpoly with multiplicity
};

namespace detail {

// Null vector of (A - lambda I) for a simple eigenvalue, by full-pivot elimination.
inline std::vector<long double> null_vector(const Matrix<long double>& a_in, long double lambda) {
  const std::size_t n = a_in.rows();
  Matrix<long double> a = a_in;
  for (std::size_t i = 0; i < n; ++i) a(i, i) -= lambda;
  std::vector<std::size_t> colperm(n);
  for (std::size_t i = 0; i < n; ++i) colperm[i] = i;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t pi = k, pj = k;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (std::abs(a(i, j)) > std::abs(a(pi, pj))) {
          pi = i;
          pj = j;
        }
    a.swap_rows(k, pi);
    a.swap_cols(k, pj);
    std::swap(colperm[k], colperm[pj]);
    for (std::size_t i = k + 1; i < n; ++i) {
      long double f = a(i, k) / a(k, k);
      if (f != 0) a.add_row(i, k, -f);
    }
  }
  std::vector<long double> y(n, 0);
  y[n - 1] = 1;
  for (std::size_t k = n - 1; k-- > 0;) {
    long double s = 0;
    for (std::size_t j = k + 1; j < n; ++j) s += a(k, j) * y[j];
    y[k] = -s / a(k, k);
  }
  std::vector<long double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[colperm[i]] = y[i];
  return x;
}

}  // namespace detail

inline PerronData perron_data(const IntMatrix& m) {
  if (!m.square() || m.rows() == 0) fail(ErrorCode::InvalidArgument, "occurrence matrix must be square");
  if (!is_primitive(m)) fail(ErrorCode::NotPrimitive, "no power of M up to a^2 is strictly positive");
  const std::size_t a = m.rows();

  PerronData pd;
  pd.charpoly = characteristic_polynomial(m);
  pd.roots = polynomial_roots(pd.charpoly);

  // The Perron root is the real root of largest modulus; polynomial_roots sorts by modulus.
  long double l1 = 0;
  for (const auto& r : pd.roots)
    if (r.value.imag() == 0 && r.value.real() > l1) l1 = r.value.real();
  // Polish by Newton on the characteristic polynomial.
  for (int it = 0; it < 5; ++it) {
    long double v = 0, dv = 0;
    for (std::size_t i = pd.charpoly.size(); i-- > 0;) {
      dv = dv * l1 + v;
      v = v * l1 + static_cast<long double>(pd.charpoly[i]);
    }
    if (dv == 0) break;
    l1 -= v / dv;
  }
  pd.lambda1 = static_cast<double>(l1);

  bool skipped = false;
  long double l2 = 0;
  for (const auto& r : pd.roots)
    for (int k = 0; k < r.multiplicity; ++k) {
      if (!skipped && std::abs(r.value - Complex(l1)) < 1e-9L * (1 + l1)) {
        skipped = true;
        continue;
      }
      l2 = std::max(l2, std::abs(r.value));
    }
  pd.lambda2_abs = static_cast<double>(l2);
  if (pd.lambda2_abs > 0 && pd.lambda1 > 1) pd.beta = std::log(pd.lambda2_abs) / std::log(pd.lambda1);

  Matrix<long double> ml = m.cast<long double>();
  std::vector<long double> f, d;
  if (a == 2) {
    // Closed forms for M = [[alpha, beta], [gamma, delta]].
    long double al = ml(0, 0), be = ml(0, 1), ga = ml(1, 0), de = ml(1, 1);
    f = {ga / (l1 + ga - al), be / (l1 + be - de)};
    d = {be, l1 - al};
  } else {
    f = detail::null_vector(ml.transpose(), l1);
    d = detail::null_vector(ml, l1);
  }
  long double fs = 0;
  for (auto v : f) fs += v;
  long double dmin = *std::min_element(d.begin(), d.end(), [](long double x, long double y) {
    return std::abs(x) < std::abs(y);
  });
  for (std::size_t i = 0; i < a; ++i) {
    pd.freq.push_back(static_cast<double>(f[i] / fs));
    pd.lengths.push_back(static_cast<double>(d[i] / dmin));
  }
  pd.minpoly = minimal_polynomial_of_root(pd.charpoly, l1);
  return pd;
}

inline BigInt trace(const IntMatrix& m) {
  BigInt t = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

struct SubstitutionClass {
  bool primitive = false;
  bool pisot = false;
  bool unimodular = false;
  bool quasiperiodic = false;
  bool common_unimodular = false;
};

inline constexpr double kRootMargin = 1e-9;
inline constexpr double kDeltaTolerance = 0.1;

// lambda1 is Pisot on its minimal polynomial and no other eigenvalue of M lies outside the unit disk.
inline bool is_pisot(const PerronData& pd) {
  const long double l1 = pd.lambda1;
  if (l1 <= 1 + kRootMargin) return false;
  for (const auto& r : polynomial_roots(pd.minpoly)) {
    if (std::abs(r.value - Complex(l1)) < 1e-9L * (1 + l1)) continue;
    if (std::abs(r.value) >= 1 - kRootMargin) return false;
  }
  return pd.lambda2_abs <= 1 + kRootMargin;
}

inline SubstitutionClass classify_substitution(const SubstitutionRule& rule, double delta_u) {
  IntMatrix m = occurrence_matrix(rule);
  PerronData pd = perron_data(m);
  SubstitutionClass c;
  c.primitive = true;
  c.pisot = is_pisot(pd);
  c.unimodular = abs(determinant(m)) == 1;
  c.quasiperiodic = !std::isnan(delta_u) && std::abs(delta_u - 1) <= kDeltaTolerance;

  bool irreducible = pd.minpoly.size() == pd.charpoly.size();
  bool prefix = true, suffix = true;
  for (const auto& img : rule.images) {
    prefix = prefix && img.front() == rule.images.front().front();
    suffix = suffix && img.back() == rule.images.front().back();
  }
  c.common_unimodular = c.primitive && c.pisot && c.unimodular && irreducible && (prefix || suffix);
  return c;
}

// F_0 = 0, F_1 = 1, F_{k+1} = tr(M) F_k - det(M) F_{k-1}, in arbitrary precision.
inline std::vector<BigInt> recurrence_sequence(const IntMatrix& m, std::size_t n) {
  const BigInt t = trace(m), p = determinant(m);
  std::vector<BigInt> f{0};
  if (n >= 1) f.push_back(1);
  while (f.size() <= n) f.push_back(t * f[f.size() - 1] - p * f[f.size() - 2]);
  return f;
}

inline std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    fail(ErrorCode::Overflow, "value exceeds 64-bit integer range");
  return static_cast<std::int64_t>(v);
}

// |sigma^order(seed)|, the seed row sum of M^order.
inline BigInt word_length(const SubstitutionRule& rule, char seed, unsigned order) {
  int s = rule.index_of(seed);
  if (s < 0) fail(ErrorCode::InvalidArgument, std::string("seed not in alphabet: ") + seed);
  IntMatrix p = matrix_power(occurrence_matrix(rule), order);
  BigInt len = 0;
  for (std::size_t j = 0; j < p.cols(); ++j) len += p(static_cast<std::size_t>(s), j);
  return len;
}

inline std::string expand_word(const SubstitutionRule& rule, char seed, unsigned order,
                               std::size_t cap = kDefaultLengthCap) {
  BigInt len = word_length(rule, seed, order);
  if (len > cap)
    fail(ErrorCode::LengthLimit, "word length " + len.str() + " exceeds cap " + std::to_string(cap));
  std::array<const std::string*, 256> img{};
  for (std::size_t i = 0; i < rule.size(); ++i)
    img[static_cast<unsigned char>(rule.alphabet[i])] = &rule.images[i];
  std::string w(1, seed), next;
  for (unsigned k = 0; k < order; ++k) {
    next.clear();
    for (unsigned char c : w) next += *img[c];
    w.swap(next);
  }
  return w;
}

struct LetterStatistics {
  std::string letters;  // sorted distinct letters
  std::vector<std::size_t> counts;
  std::vector<double> freq;

  double frequency(char c) const {
    auto pos = letters.find(c);
    return pos == std::string::npos ? 0.0 : freq[pos];
  }
};

inline LetterStatistics letter_statistics(const std::string& word) {
  if (word.empty()) fail(ErrorCode::EmptyWord, "letter statistics of an empty word");
  std::array<std::size_t, 256> cnt{};
  for (unsigned char c : word) ++cnt[c];
  LetterStatistics s;
  for (int c = 0; c < 256; ++c)
    if (cnt[c]) {
      s.letters.push_back(static_cast<char>(c));
      s.counts.push_back(cnt[c]);
      s.freq.push_back(static_cast<double>(cnt[c]) / static_cast<double>(word.size()));
    }
  return s;
}

}  // namespace aperiodix
