#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "aperiodix/error.hpp"
#include "aperiodix/matrix.hpp"

namespace aperiodix {

// Finitely described additive subgroups of R used to label gaps and Bragg peaks.
class LabelGroup {
 public:
  enum class Kind { TwoGen, ScaledLocalized, Cyclic, FreeAbelian };

  // Z + rho Z. A rational rho collapses to the cyclic group it generates together with 1.
  static LabelGroup two_gen(double rho) {
    if (!std::isfinite(rho)) fail(ErrorCode::InvalidArgument, "rho must be finite");
    double f = rho - std::floor(rho);
    std::int64_t num = 0, den = 1;
    if (rational_approximation(f, num, den)) return cyclic(den);
    LabelGroup g;
    g.kind_ = Kind::TwoGen;
    g.rho_ = f < 0.5 ? 1 - f : f;  // rho and 1 - rho give the same group
    return g;
  }

  // a Z[1/p] with a normalized so that p divides neither its numerator nor its denominator.
  static LabelGroup scaled_localized(Rational a, int p) {
    if (a <= 0) fail(ErrorCode::InvalidArgument, "scale must be positive");
    if (!is_prime(p)) fail(ErrorCode::InvalidArgument, "localization requires a prime");
    BigInt num = numerator(a), den = denominator(a);
    while (num % p == 0) num /= p;
    while (den % p == 0) den /= p;
    LabelGroup g;
    g.kind_ = Kind::ScaledLocalized;
    g.a_ = Rational(num, den);
    g.p_ = p;
    return g;
  }

  // (1/q) Z
  static LabelGroup cyclic(std::int64_t q) {
    if (q <= 0) fail(ErrorCode::InvalidArgument, "cyclic denominator must be positive");
    LabelGroup g;
    g.kind_ = Kind::Cyclic;
    g.q_ = q;
    return g;
  }

  static LabelGroup free_abelian(std::vector<double> generators) {
    if (generators.empty() || generators.size() > 3)
      fail(ErrorCode::InvalidArgument, "free abelian presentation supports rank 1 to 3");
    LabelGroup g;
    g.kind_ = Kind::FreeAbelian;
    g.gens_ = std::move(generators);
    return g;
  }

  Kind kind() const noexcept { return kind_; }
  double rho() const noexcept { return rho_; }
  const Rational& scale() const noexcept { return a_; }
  int prime() const noexcept { return p_; }
  std::int64_t denominator_q() const noexcept { return q_; }
  const std::vector<double>& generators() const noexcept { return gens_; }

  std::string canonical_name() const {
    switch (kind_) {
      case Kind::TwoGen: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "Z+rho*Z(rho=%.10f)", rho_);
        return buf;
      }
      case Kind::ScaledLocalized: {
        std::string loc = "Z[1/" + std::to_string(p_) + "]";
        if (a_ == 1) return loc;
        return "(" + a_.str() + ")" + loc;
      }
      case Kind::Cyclic: return q_ == 1 ? "Z" : "(1/" + std::to_string(q_) + ")Z";
      case Kind::FreeAbelian: return "FreeAbelian(rank=" + std::to_string(gens_.size()) + ")";
    }
    return "";
  }

  friend bool operator==(const LabelGroup& x, const LabelGroup& y) {
    if (x.kind_ != y.kind_) return false;
    switch (x.kind_) {
      case Kind::TwoGen: return std::abs(x.rho_ - y.rho_) < 1e-10;
      case Kind::ScaledLocalized: return x.a_ == y.a_ && x.p_ == y.p_;
      case Kind::Cyclic: return x.q_ == y.q_;
      case Kind::FreeAbelian: return x.gens_ == y.gens_;
    }
    return false;
  }
  friend bool operator!=(const LabelGroup& x, const LabelGroup& y) { return !(x == y); }

  static bool is_prime(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t d = 2; d * d <= p; ++d)
      if (p % d == 0) return false;
    return true;
  }

 private:
  // Continued-fraction test for small-denominator rationals.
  static bool rational_approximation(double x, std::int64_t& num, std::int64_t& den) {
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int i = 0; i < 40; ++i) {
      double a = std::floor(r);
      std::int64_t ai = static_cast<std::int64_t>(a);
      std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
      if (k2 > 100'000) return false;
      h0 = h1;
      h1 = h2;
      k0 = k1;
      k1 = k2;
      if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) < 1e-12) {
        num = h1;
        den = k1;
        return true;
      }
      double frac = r - a;
      if (frac < 1e-15) return false;
      r = 1 / frac;
    }
    return false;
  }

  Kind kind_ = Kind::Cyclic;
  double rho_ = 0;
  Rational a_ = 1;
  int p_ = 2;
  std::int64_t q_ = 1;
  std::vector<double> gens_;
};

struct GroupElement {
  std::vector<std::int64_t> coordinates;  // (p,q), (m,N), (m) or generator coefficients
  double value = 0;
  double reduced_mod_1 = 0;
};

struct NearestResult {
  GroupElement element;
  double residual = INFINITY;
};

struct LabelBounds {
  int q_max = 30;       // |p|, |q| for TwoGen; coefficient box for FreeAbelian
  int n_max = 12;       // largest exponent N for a Z[1/p]
  double m_factor = 64;  // |m| <= m_factor * p^N
};

inline constexpr double kDefaultLabelTol = 1e-3;

inline GroupElement make_element(std::vector<std::int64_t> coords, double value) {
  return {std::move(coords), value, value - std::floor(value)};
}

inline NearestResult nearest_element(double x, const LabelGroup& g, const LabelBounds& b = {}) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidArgument, "label target must be finite");
  NearestResult best;
  auto offer = [&](std::vector<std::int64_t> coords, double value) {
    double r = std::abs(x - value);
    if (r < best.residual - 1e-15) best = {make_element(std::move(coords), value), r};
  };
  switch (g.kind()) {
    case LabelGroup::Kind::TwoGen:
      for (int aq = 0; aq <= b.q_max; ++aq)
        for (int q : {aq, -aq}) {
          if (aq == 0 && q != 0) continue;
          double p = std::round(x - q * g.rho());
          if (std::abs(p) > b.q_max) continue;
          offer({static_cast<std::int64_t>(p), q}, p + q * g.rho());
        }
      break;
    case LabelGroup::Kind::Cyclic: {
      const double q = static_cast<double>(g.denominator_q());
      double m = std::round(x * q);
      offer({static_cast<std::int64_t>(m)}, m / q);
      break;
    }
    case LabelGroup::Kind::ScaledLocalized: {
      const double a = static_cast<double>(g.scale());
      double pw = 1;
      for (int n = 0; n <= b.n_max; ++n, pw *= g.prime()) {
        double m = std::round(x * pw / a);
        if (std::abs(m) > b.m_factor * pw) continue;
        offer({static_cast<std::int64_t>(m), n}, a * m / pw);
      }
      break;
    }
    case LabelGroup::Kind::FreeAbelian: {
      const auto& gens = g.generators();
      const int box = b.q_max;
      std::vector<std::int64_t> c(gens.size(), -box);
      for (;;) {
        double v = 0;
        for (std::size_t i = 0; i < gens.size(); ++i) v += static_cast<double>(c[i]) * gens[i];
        offer(c, v);
        std::size_t i = 0;
        while (i < c.size() && c[i] == box) c[i++] = -box;
        if (i == c.size()) break;
        ++c[i];
      }
      break;
    }
  }
  return best;
}

inline bool contains(double x, const LabelGroup& g, double tol = kDefaultLabelTol, const LabelBounds& b = {}) {
  return nearest_element(x, g, b).residual <= tol;
}

inline LabelGroup group_for_family(const std::string& family) {
  if (family == "periodic") return LabelGroup::cyclic(2);
  if (family == "fibonacci") return LabelGroup::two_gen(2 / (1 + std::sqrt(5.0)));
  if (family == "thue-morse" || family == "period-doubling")
    return LabelGroup::scaled_localized(Rational(1, 3), 2);
  if (family == "rudin-shapiro") return LabelGroup::scaled_localized(Rational(1), 2);
  fail(ErrorCode::UnknownFamily, "unknown family '" + family + "'");
}

}  // namespace aperiodix
