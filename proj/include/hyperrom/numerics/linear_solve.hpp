// SPDX-License-Identifier: Apache-2.0

#ifndef HYPERROM_NUMERICS_LINEAR_SOLVE_HPP
#define HYPERROM_NUMERICS_LINEAR_SOLVE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hyperrom/errors.hpp"
#include "hyperrom/numerics/dense.hpp"

namespace hyperrom {

// LU factorization with partial pivoting, PA = LU. The pivot search takes
// the first row attaining the column maximum so repeated runs pick the same
// permutation on ties.
struct LuFactor {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
};

inline LuFactor lu_factor(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw MismatchedSets("lu_factor: matrix not square");
  const std::size_t n = a.rows();
  LuFactor f{a, std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  const double tiny = 1e-14 * std::max(max_abs(a), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(f.lu(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(f.lu(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < tiny) throw SingularMatrix("lu_factor: pivot below threshold");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
      std::swap(f.perm[k], f.perm[p]);
    }
    const double piv = f.lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = f.lu(i, k) / piv;
      f.lu(i, k) = m;
      if (m == 0.0) continue;
      const double* rk = f.lu.row(k);
      double* ri = f.lu.row(i);
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= m * rk[j];
    }
  }
  return f;
}

inline Vector lu_solve(const LuFactor& f, const Vector& b) {
  const std::size_t n = f.lu.rows();
  if (b.size() != n) throw MismatchedSets("lu_solve: rhs size mismatch");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i) {
    const double* ri = f.lu.row(i);
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const double* ri = f.lu.row(ii);
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= ri[j] * x[j];
    x[ii] = s / ri[ii];
  }
  return x;
}

inline Vector lu_factor_solve(const DenseMatrix& a, const Vector& b) {
  return lu_solve(lu_factor(a), b);
}

// Solve L y = b where L is lower triangular with unit diagonal stored in the
// leading m-by-m block of `l`.
inline Vector forward_subst_unit(const DenseMatrix& l, const Vector& b, std::size_t m) {
  Vector y(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    const double* ri = l.row(i);
    for (std::size_t j = 0; j < i; ++j) s -= ri[j] * y[j];
    y[i] = s;
  }
  return y;
}

// Solve L^T x = b on the leading m x m block of the same unit lower
// triangular matrix, without forming the transpose.
inline Vector backward_subst_unit_t(const DenseMatrix& l, const Vector& b, std::size_t m) {
  Vector x(m);
  for (std::size_t ii = m; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < m; ++k) s -= l(k, ii) * x[k];
    x[ii] = s;
  }
  return x;
}

// Square banded matrix with kl sub- and ku super-diagonals, column-major band
// storage with kl spare rows for fill-in during the factorization (same layout
// as the LAPACK general-band format). Entry (i,j) lives at band row
// kl + ku + i - j of column j.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(ld_ * n, 0.0) {}

  std::size_t size() const { return n_; }
  std::size_t kl() const { return kl_; }
  std::size_t ku() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const {
    return (i + ku_ >= j) && (j + kl_ >= i);
  }

  double& at(std::size_t i, std::size_t j) { return ab_[j * ld_ + (kl_ + ku_ + i - j)]; }
  double get(std::size_t i, std::size_t j) const {
    if (!in_band(i, j)) return 0.0;
    return ab_[j * ld_ + (kl_ + ku_ + i - j)];
  }

  void zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

  Vector multiply(const Vector& x) const {
    Vector y(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t i0 = (j >= ku_) ? j - ku_ : 0;
      const std::size_t i1 = std::min<std::size_t>(n_ - 1, j + kl_);
      const double xj = x[j];
      if (xj == 0.0) continue;
      const double* col = ab_.data() + j * ld_ + (kl_ + ku_ + i0 - j);
      for (std::size_t i = i0; i <= i1; ++i) y[i] += col[i - i0] * xj;
    }
    return y;
  }

  double max_abs_entry() const {
    double m = 0.0;
    for (double v : ab_) m = std::max(m, std::abs(v));
    return m;
  }

  std::vector<double>& storage() { return ab_; }
  const std::vector<double>& storage() const { return ab_; }
  std::size_t ld() const { return ld_; }

 private:
  std::size_t n_ = 0, kl_ = 0, ku_ = 0, ld_ = 0;
  std::vector<double> ab_;
};

// In-place banded LU with partial pivoting (row interchanges stay within the
// band reach, fill-in bounded by kl + ku superdiagonals).
struct BandLuFactor {
  BandMatrix ab;
  std::vector<std::size_t> ipiv;
};

inline BandLuFactor band_lu_factor(const BandMatrix& a) {
  const std::size_t n = a.size();
  const std::size_t kl = a.kl(), ku = a.ku();
  BandLuFactor f{a, std::vector<std::size_t>(n)};
  const double tiny = 1e-14 * std::max(a.max_abs_entry(), 1e-300);
  const std::size_t ld = f.ab.ld();
  double* ab = f.ab.storage().data();
  const std::size_t kuw = kl + ku;  // working upper bandwidth after fill-in
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lend = std::min(kl, n - 1 - j);
    // pivot search down column j; first maximal entry wins
    double* colj = ab + j * ld + kl + ku;  // points at (j, j)
    std::size_t p = 0;
    double best = std::abs(colj[0]);
    for (std::size_t i = 1; i <= lend; ++i) {
      const double v = std::abs(colj[i]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < tiny) throw SingularMatrix("band_lu_factor: pivot below threshold");
    f.ipiv[j] = j + p;
    if (p != 0) {
      const std::size_t cols = std::min(kuw, n - 1 - j);
      for (std::size_t c = 0; c <= cols; ++c)
        std::swap(ab[(j + c) * ld + kl + ku - c], ab[(j + c) * ld + kl + ku - c + p]);
    }
    const double piv = colj[0];
    for (std::size_t i = 1; i <= lend; ++i) colj[i] /= piv;
    const std::size_t cols = std::min(kuw, n - 1 - j);
    for (std::size_t c = 1; c <= cols; ++c) {
      double* colc = ab + (j + c) * ld + kl + ku - c;  // points at (j, j+c)
      const double m = colc[0];
      if (m == 0.0) continue;
      for (std::size_t i = 1; i <= lend; ++i) colc[i] -= m * colj[i];
    }
  }
  return f;
}

inline Vector band_lu_solve(const BandLuFactor& f, const Vector& b) {
  const std::size_t n = f.ab.size();
  if (b.size() != n) throw MismatchedSets("band_lu_solve: rhs size mismatch");
  const std::size_t kl = f.ab.kl(), ku = f.ab.ku();
  const std::size_t ld = f.ab.ld();
  const double* ab = f.ab.storage().data();
  Vector x = b;
  for (std::size_t j = 0; j < n; ++j) {
    if (f.ipiv[j] != j) std::swap(x[j], x[f.ipiv[j]]);
    const std::size_t lend = std::min(kl, n - 1 - j);
    const double xj = x[j];
    if (xj == 0.0) continue;
    const double* colj = ab + j * ld + kl + ku;
    for (std::size_t i = 1; i <= lend; ++i) x[j + i] -= colj[i] * xj;
  }
  const std::size_t kuw = kl + ku;
  for (std::size_t jj = n; jj-- > 0;) {
    double s = x[jj];
    const std::size_t cend = std::min(kuw, n - 1 - jj);
    for (std::size_t c = 1; c <= cend; ++c) s -= ab[(jj + c) * ld + kl + ku - c] * x[jj + c];
    x[jj] = s / ab[jj * ld + kl + ku];
  }
  return x;
}

}  // namespace hyperrom

#endif
