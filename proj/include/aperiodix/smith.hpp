#pragma once

#include <cstddef>

#include "aperiodix/matrix.hpp"

namespace aperiodix {

// U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ... ; the
// inverses of U and V are tracked alongside so callers never invert.
struct SmithForm {
  IntMatrix U, U_inv, D, V, V_inv;
  std::size_t rank = 0;
};

namespace detail {

struct SmithWork {
  SmithForm& s;

  void row_add(std::size_t dst, std::size_t src, const BigInt& f) {
    s.D.add_row(dst, src, f);
    s.U.add_row(dst, src, f);
    s.U_inv.add_col(src, dst, -f);
  }
  void row_swap(std::size_t a, std::size_t b) {
    s.D.swap_rows(a, b);
    s.U.swap_rows(a, b);
    s.U_inv.swap_cols(a, b);
  }
  void row_negate(std::size_t a) {
    for (std::size_t j = 0; j < s.D.cols(); ++j) s.D(a, j) = -s.D(a, j);
    for (std::size_t j = 0; j < s.U.cols(); ++j) s.U(a, j) = -s.U(a, j);
    for (std::size_t i = 0; i < s.U_inv.rows(); ++i) s.U_inv(i, a) = -s.U_inv(i, a);
  }
  void col_add(std::size_t dst, std::size_t src, const BigInt& f) {
    s.D.add_col(dst, src, f);
    s.V.add_col(dst, src, f);
    s.V_inv.add_row(src, dst, -f);
  }
  void col_swap(std::size_t a, std::size_t b) {
    s.D.swap_cols(a, b);
    s.V.swap_cols(a, b);
    s.V_inv.swap_rows(a, b);
  }
};

}  // namespace detail

inline SmithForm smith_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  SmithForm s{IntMatrix::identity(m), IntMatrix::identity(m), a, IntMatrix::identity(n),
              IntMatrix::identity(n), 0};
  detail::SmithWork w{s};
  IntMatrix& d = s.D;

  for (std::size_t t = 0; t < m && t < n; ++t) {
    for (;;) {
      // Bring the smallest nonzero entry of the trailing block to the pivot.
      std::size_t pi = m, pj = n;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (d(i, j) != 0 && (pi == m || abs(d(i, j)) < abs(d(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == m) return s;
      w.row_swap(t, pi);
      w.col_swap(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        BigInt q = d(i, t) / d(t, t);
        if (q != 0) w.row_add(i, t, -q);
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        BigInt q = d(t, j) / d(t, t);
        if (q != 0) w.col_add(j, t, -q);
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Enforce divisibility of the remaining block by the pivot.
      std::size_t bad = m;
      for (std::size_t i = t + 1; i < m && bad == m; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (d(i, j) % d(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad != m) {
        w.row_add(t, bad, BigInt(1));
        continue;
      }
      if (d(t, t) < 0) w.row_negate(t);
      s.rank = t + 1;
      break;
    }
  }
  return s;
}

// Columns form a basis of the saturated lattice {x in Z^n : A x = 0}.
inline IntMatrix integer_kernel(const IntMatrix& a) {
  SmithForm s = smith_normal_form(a);
  const std::size_t n = a.cols();
  return s.V.block(0, s.rank, n, n - s.rank);
}

// For P (n x r) with Smith form [I_r; 0], returns L (r x n) with L * P = I_r.
inline IntMatrix left_inverse_saturated(const IntMatrix& p) {
  SmithForm s = smith_normal_form(p);
  const std::size_t r = p.cols();
  if (s.rank != r) fail(ErrorCode::InvalidArgument, "basis matrix is not of full column rank");
  for (std::size_t i = 0; i < r; ++i)
    if (s.D(i, i) != 1) fail(ErrorCode::InvalidArgument, "basis matrix is not saturated");
  return s.V * s.U.block(0, 0, r, p.rows());
}

}  // namespace aperiodix
