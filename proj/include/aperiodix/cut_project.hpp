#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <optional>
#include <string>

#include "aperiodix/error.hpp"

namespace aperiodix {

namespace dd {

// Double-double helpers: a value is hi + lo with |lo| <= ulp(hi)/2.
struct Num {
  double hi = 0, lo = 0;
};

inline Num two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline Num add(Num x, Num y) {
  Num s = two_sum(x.hi, y.hi);
  double lo = s.lo + x.lo + y.lo;
  return two_sum(s.hi, lo);
}

inline Num mul(Num x, double y) {
  double p = x.hi * y;
  double e = std::fma(x.hi, y, -p);
  return two_sum(p, e + x.lo * y);
}

inline Num div(Num x, double y) {
  double q = x.hi / y;
  Num back = mul({q, 0}, y);
  double r = ((x.hi - back.hi) - back.lo + x.lo) / y;
  return two_sum(q, r);
}

inline Num sqrt_of(double d) {
  double s = std::sqrt(d);
  double e = std::fma(-s, s, d);
  return two_sum(s, e / (2 * s));
}

}  // namespace dd

// Slope s in (0,1): an exact rational p/q, a quadratic irrational (a + b*sqrt(D))/c, or a plain decimal.
class Slope {
 public:
  enum class Kind { Rational, Quadratic, Decimal };

  static Slope rational(std::int64_t p, std::int64_t q) {
    if (q <= 0 || p <= 0 || p >= q) fail(ErrorCode::InvalidArgument, "rational slope must lie in (0,1)");
    std::int64_t g = std::gcd(p, q);
    Slope s;
    s.kind_ = Kind::Rational;
    s.p_ = p / g;
    s.q_ = q / g;
    s.v_ = dd::div({static_cast<double>(s.p_), 0}, static_cast<double>(s.q_));
    return s;
  }

  static Slope quadratic(std::int64_t a, std::int64_t b, std::int64_t d, std::int64_t c) {
    if (d <= 0 || c == 0) fail(ErrorCode::InvalidArgument, "quadratic slope needs D > 0 and c != 0");
    Slope s;
    s.kind_ = Kind::Quadratic;
    auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(d))));
    s.square_radicand_ = (r * r == d);
    dd::Num root = dd::mul(dd::sqrt_of(static_cast<double>(d)), static_cast<double>(b));
    s.v_ = dd::div(dd::add(root, {static_cast<double>(a), 0}), static_cast<double>(c));
    s.check();
    return s;
  }

  static Slope decimal(double x) {
    Slope s;
    s.kind_ = Kind::Decimal;
    s.v_ = {x, 0};
    s.check();
    return s;
  }

  static Slope inverse_golden() { return quadratic(-1, 1, 5, 2); }

  // Accepts "p/q", a decimal literal, or the token "1/golden".
  static Slope parse(const std::string& text) {
    if (text == "1/golden") return inverse_golden();
    auto slash = text.find('/');
    try {
      if (slash != std::string::npos) {
        std::size_t used1 = 0, used2 = 0;
        long long p = std::stoll(text.substr(0, slash), &used1);
        long long q = std::stoll(text.substr(slash + 1), &used2);
        if (used1 != slash || used2 != text.size() - slash - 1) throw std::invalid_argument(text);
        return rational(p, q);
      }
      std::size_t used = 0;
      double x = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return decimal(x);
    } catch (const std::logic_error&) {
      fail(ErrorCode::InvalidArgument, "cannot parse slope '" + text + "'");
    }
  }

  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return v_.hi + v_.lo; }
  dd::Num exact() const noexcept { return v_; }
  std::int64_t p() const noexcept { return p_; }
  std::int64_t q() const noexcept { return q_; }
  bool irrational() const noexcept { return kind_ == Kind::Quadratic && !square_radicand_; }

 private:
  void check() const {
    double v = value();
    if (!(v > 0 && v < 1)) fail(ErrorCode::InvalidArgument, "slope must lie in (0,1)");
  }

  Kind kind_ = Kind::Decimal;
  std::int64_t p_ = 0, q_ = 1;
  bool square_radicand_ = false;
  dd::Num v_;
};

struct CPParams {
  Slope slope = Slope::inverse_golden();
  double phason = 0;  // radians, reduced to [0, 2*pi)
  char letter_plus = 'a';
  char letter_minus = 'b';

  CPParams() = default;
  CPParams(Slope s, double phi, char plus = 'a', char minus = 'b')
      : slope(s), phason(reduce(phi)), letter_plus(plus), letter_minus(minus) {}

  static double reduce(double phi) {
    if (!std::isfinite(phi)) fail(ErrorCode::InvalidArgument, "phason must be finite");
    double r = std::fmod(phi, 2 * std::numbers::pi);
    if (r < 0) r += 2 * std::numbers::pi;
    if (r >= 2 * std::numbers::pi) r = 0;
    return r;
  }
};

// sgn[cos(2 pi n s + phi) - cos(pi s)] with sgn(0) = +1.
// cos(theta) >= cos(pi s) exactly when theta, wrapped to [-pi, pi], has |theta| <= pi s.
inline int chi(std::int64_t n, const CPParams& prm) {
  const Slope& s = prm.slope;
  if (s.kind() == Slope::Kind::Rational && prm.phason == 0) {
    // |wrapped theta| / pi = min(r, 2q - r) / q with r = 2 n p mod 2q, compared with p / q.
    const __int128 q2 = 2 * static_cast<__int128>(s.q());
    __int128 r = (2 * static_cast<__int128>(n) * s.p()) % q2;
    if (r < 0) r += q2;
    __int128 w = r < q2 - r ? r : q2 - r;
    return w <= s.p() ? +1 : -1;
  }
  dd::Num t = dd::mul(s.exact(), static_cast<double>(n));
  double f = t.hi - std::floor(t.hi);
  f += t.lo;
  f += prm.phason / (2 * std::numbers::pi);
  f -= std::floor(f);
  double wrapped = 2 * std::min(f, 1 - f);
  return wrapped <= s.value() ? +1 : -1;
}

inline std::string cp_word(const CPParams& prm, std::int64_t n0, std::size_t count) {
  if (count == 0) fail(ErrorCode::InvalidArgument, "cp_word needs count >= 1");
  std::string w(count, ' ');
  for (std::size_t i = 0; i < count; ++i)
    w[i] = chi(n0 + static_cast<std::int64_t>(i), prm) > 0 ? prm.letter_plus : prm.letter_minus;
  return w;
}

struct Periodicity {
  bool periodic = false;
  std::optional<std::size_t> period;
};

// A finite window of a Sturmian word can repeat for a long time (the golden word has period 4181 for its
// first 10943 letters), so exact slopes are decided by arithmetic and only decimals are scanned.
inline Periodicity check_periodicity(const CPParams& prm, std::size_t horizon) {
  if (prm.slope.irrational()) return {};
  if (prm.slope.kind() == Slope::Kind::Rational) return {true, static_cast<std::size_t>(prm.slope.q())};
  if (horizon < 2) return {};
  std::string w = cp_word(prm, 0, horizon);
  for (std::size_t p = 1; p <= horizon / 2; ++p) {
    bool ok = true;
    for (std::size_t i = 0; i + p < horizon; ++i)
      if (w[i] != w[i + p]) {
        ok = false;
        break;
      }
    if (ok) return {true, p};
  }
  return {};
}

}  // namespace aperiodix
