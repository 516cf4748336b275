// SPDX-License-Identifier: Apache-2.0

#ifndef HYPERROM_NUMERICS_EIGEN_SYM_HPP
#define HYPERROM_NUMERICS_EIGEN_SYM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "hyperrom/errors.hpp"
#include "hyperrom/numerics/dense.hpp"

namespace hyperrom {

// Full symmetric eigendecomposition, eigenvalues descending, eigenvectors in
// the columns of `vectors`.
struct EigenSym {
  Vector values;
  DenseMatrix vectors;
};

namespace detail {

// Cyclic Jacobi sweeps. Quadratically convergent and simple, but each sweep is
// O(n^3); kept for small matrices where it is plenty fast.
inline void jacobi_eigen(DenseMatrix& a, DenseMatrix& v, Vector& d) {
  const std::size_t n = a.rows();
  v = DenseMatrix::identity(n);
  const double norm_c = frobenius_norm(a);
  const double stop = 1e-12 * std::max(norm_c, 1e-300);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) < stop) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  d.resize(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
}

// Householder reduction to tridiagonal form with accumulated transforms
// (classic tred2).
inline void tridiag_reduce(DenseMatrix& a, Vector& d, Vector& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          a(j, i) = a(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
        for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
      }
    }
    d[i] = a(i, i);
    a(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
  }
}

// Implicit-shift QL on the tridiagonal with eigenvector accumulation
// (classic tql2).
inline void tridiag_ql(Vector& d, Vector& e, DenseMatrix& z) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  // Deflation needs an absolute floor in addition to the relative test: in a
  // block of near-zero diagonal entries (numerically rank-deficient input)
  // |d[m]| + |d[m+1]| can stay below |e[m]| indefinitely and the relative
  // test alone never splits. The floor perturbs eigenvalues by at most
  // eps * anorm, within the backward error of the reduction itself.
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(d[i]) + std::abs(e[i]));
  const double floor = eps * anorm;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= floor) break;
      }
      if (m != l) {
        if (iter++ == 64) throw Error("sym_eig_desc: QL iteration failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

// Eigendecomposition of a symmetric matrix, sorted by descending eigenvalue.
// Small problems use cyclic Jacobi; larger ones go through Householder
// tridiagonalization + implicit-shift QL, which has a far smaller constant.
// Both paths are deterministic. Eigenvector signs are canonicalized so the
// entry of largest magnitude (first such entry on ties) is positive.
inline EigenSym sym_eig_desc(const DenseMatrix& c) {
  if (c.rows() != c.cols()) throw MismatchedSets("sym_eig_desc: matrix not square");
  const std::size_t n = c.rows();
  if (n == 0) return {};
  const double scale = std::max(max_abs(c), 1e-300);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(c(i, j) - c(j, i)) > 1e-12 * scale)
        throw NotSymmetric("sym_eig_desc: matrix is not symmetric");

  DenseMatrix work = c;
  // symmetrize roundoff so both backends see an exactly symmetric input
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (work(i, j) + work(j, i));
      work(i, j) = work(j, i) = v;
    }

  Vector d;
  DenseMatrix v;
  if (n <= 128) {
    detail::jacobi_eigen(work, v, d);
  } else {
    Vector e;
    detail::tridiag_reduce(work, d, e);
    detail::tridiag_ql(d, e, work);
    v = std::move(work);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d[i] > d[j]; });

  EigenSym out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t src = order[m];
    out.values[m] = d[src];
    std::size_t imax = 0;
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double av = std::abs(v(i, src));
      if (av > vmax) {
        vmax = av;
        imax = i;
      }
    }
    const double sign = (v(imax, src) < 0.0) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, m) = sign * v(i, src);
  }
  return out;
}

}  // namespace hyperrom

#endif
