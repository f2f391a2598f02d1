#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "aperiodix/error.hpp"
#include "aperiodix/matrix.hpp"

namespace aperiodix {

// r + s*sqrt(D) with rational r, s and a fixed non-square D > 0.
class QuadNum {
 public:
  QuadNum() = default;
  QuadNum(long long v) : r_(v) {}  // NOLINT: integers embed implicitly
  QuadNum(Rational r, Rational s, std::int64_t d) : r_(std::move(r)), s_(std::move(s)), d_(d) {}

  const Rational& r() const noexcept { return r_; }
  const Rational& s() const noexcept { return s_; }
  std::int64_t d() const noexcept { return d_; }

  long double approx() const {
    return static_cast<long double>(r_) + static_cast<long double>(s_) * std::sqrt(static_cast<long double>(d_));
  }

  QuadNum conj() const { return {r_, -s_, d_}; }
  Rational norm() const { return r_ * r_ - s_ * s_ * d_; }

  friend QuadNum operator+(const QuadNum& a, const QuadNum& b) { return {a.r_ + b.r_, a.s_ + b.s_, pick(a, b)}; }
  friend QuadNum operator-(const QuadNum& a, const QuadNum& b) { return {a.r_ - b.r_, a.s_ - b.s_, pick(a, b)}; }
  friend QuadNum operator-(const QuadNum& a) { return {-a.r_, -a.s_, a.d_}; }
  friend QuadNum operator*(const QuadNum& a, const QuadNum& b) {
    std::int64_t d = pick(a, b);
    return {a.r_ * b.r_ + a.s_ * b.s_ * d, a.r_ * b.s_ + a.s_ * b.r_, d};
  }
  friend QuadNum operator/(const QuadNum& a, const QuadNum& b) {
    std::int64_t d = pick(a, b);
    QuadNum bb{b.r_, b.s_, d};
    Rational n = bb.norm();
    if (n == 0) fail(ErrorCode::InvalidArgument, "division by zero in quadratic field");
    QuadNum t = QuadNum{a.r_, a.s_, d} * bb.conj();
    return {t.r_ / n, t.s_ / n, d};
  }
  QuadNum& operator+=(const QuadNum& b) { return *this = *this + b; }
  QuadNum& operator-=(const QuadNum& b) { return *this = *this - b; }
  QuadNum& operator*=(const QuadNum& b) { return *this = *this * b; }

  friend bool operator==(const QuadNum& a, const QuadNum& b) { return a.r_ == b.r_ && a.s_ == b.s_; }
  friend bool operator!=(const QuadNum& a, const QuadNum& b) { return !(a == b); }

  std::string str() const { return "(" + r_.str() + ")+(" + s_.str() + ")*sqrt(" + std::to_string(d_) + ")"; }

 private:
  static std::int64_t pick(const QuadNum& a, const QuadNum& b) {
    if (a.d_ && b.d_ && a.d_ != b.d_) fail(ErrorCode::InvalidArgument, "mixed quadratic fields");
    return a.d_ ? a.d_ : b.d_;
  }

  Rational r_ = 0, s_ = 0;
  std::int64_t d_ = 0;  // 0 marks a plain rational not yet tied to a field
};

}  // namespace aperiodix
