// SPDX-License-Identifier: Apache-2.0
//
// Snapshot families for the nonlinear terms: compositions with the sampled
// fields, optionally enriched with first and second order Taylor expansions
// about every sample.  The reduced space built from a higher order family
// contains the lower order families, because every expansion degenerates to
// the shorter one when the added indices repeat the expansion point.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hyperrom/cases.hpp"
#include "hyperrom/errors.hpp"
#include "hyperrom/numerics/dense.hpp"

namespace hyperrom {

// g(u(x), mu) over a row of field values
inline Vector nonlinear_on_grid(const CaseDefinition& c, const std::string& tag,
                                const double* u, std::size_t n, const ParamVec& mu) {
  Vector out(n);
  for (std::size_t q = 0; q < n; ++q) out[q] = eval_nonlinear(c, tag, 0, {0, 0}, u[q], mu);
  return out;
}

namespace detail {

// indices of the second expansion direction kept for one block; the
// expansion point itself always stays so the first order family survives
inline std::vector<std::size_t> taylor_second_indices(std::size_t n_samples, std::size_t n,
                                                      std::size_t stride) {
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < n_samples; k += stride) keep.push_back(k);
  bool has_n = false;
  for (std::size_t k : keep) has_n = has_n || k == n;
  if (!has_n) keep.push_back(n);
  return keep;
}

}  // namespace detail

// Snapshot rows for one nonlinear term.  u holds the sampled fields at the
// candidate points, one row per sample, aligned with mus.  Orders 0, 1, 2
// produce N, N^2, N^3 rows; max_rows > 0 thins the second order direction by
// a stride until the row count fits, keeping the first order family intact.
// base_du > 0 expands a u-derivative of the term instead of the term itself,
// which is what the linearized-system interpolants need.
inline DenseMatrix taylor_snapshots(const CaseDefinition& c, const std::string& tag, int order,
                                    const DenseMatrix& u, const std::vector<ParamVec>& mus,
                                    std::size_t max_rows = 0, int base_du = 0) {
  const std::size_t n_s = u.rows(), nq = u.cols();
  if (mus.size() != n_s) throw MismatchedSets("taylor_snapshots: sample count mismatch");
  if (n_s == 0) throw EmptyTrainingSet("taylor_snapshots: no samples");
  if (order < 0 || order > 2) throw UnsupportedOrder("taylor_snapshots: order must be 0, 1, 2");
  const int np = c.n_param;

  std::size_t stride = 1;
  std::size_t rows;
  auto count_rows = [&](std::size_t s) {
    if (order == 0) return n_s;
    if (order == 1) return n_s * n_s;
    std::size_t t = 0;
    for (std::size_t n = 0; n < n_s; ++n) t += detail::taylor_second_indices(n_s, n, s).size();
    return t * n_s;
  };
  rows = count_rows(stride);
  if (max_rows > 0) {
    while (rows > max_rows && stride < n_s) rows = count_rows(++stride);
  }

  DenseMatrix out(rows, nq);
  std::size_t row = 0;
  Vector g0(nq), gu(nq), guu(nq);
  std::vector<Vector> gmu(np, Vector(nq));
  std::vector<std::vector<Vector>> gmm(np, std::vector<Vector>(np, Vector(nq)));

  for (std::size_t n = 0; n < n_s; ++n) {
    const double* un = u.row(n);
    const ParamVec& mun = mus[n];
    for (std::size_t q = 0; q < nq; ++q) g0[q] = eval_nonlinear(c, tag, base_du, {0, 0}, un[q], mun);
    if (order >= 1) {
      for (std::size_t q = 0; q < nq; ++q)
        gu[q] = eval_nonlinear(c, tag, base_du + 1, {0, 0}, un[q], mun);
      for (int a = 0; a < np; ++a) {
        MuIndex d{0, 0};
        d[a] = 1;
        for (std::size_t q = 0; q < nq; ++q) gmu[a][q] = eval_nonlinear(c, tag, base_du, d, un[q], mun);
      }
    }
    if (order == 2) {
      for (std::size_t q = 0; q < nq; ++q)
        guu[q] = eval_nonlinear(c, tag, base_du + 2, {0, 0}, un[q], mun);
      for (int a = 0; a < np; ++a) {
        for (int b = a; b < np; ++b) {
          MuIndex d{0, 0};
          d[a] += 1;
          d[b] += 1;
          for (std::size_t q = 0; q < nq; ++q)
            gmm[a][b][q] = eval_nonlinear(c, tag, base_du, d, un[q], mun);
          if (b != a) gmm[b][a] = gmm[a][b];
        }
      }
    }

    if (order == 0) {
      double* r = out.row(row++);
      for (std::size_t q = 0; q < nq; ++q) r[q] = g0[q];
      continue;
    }

    const std::vector<std::size_t> seconds =
        order == 2 ? detail::taylor_second_indices(n_s, n, stride) : std::vector<std::size_t>{n};
    for (std::size_t k : seconds) {
      const double* uk = u.row(k);
      const ParamVec& muk = mus[k];
      for (std::size_t m = 0; m < n_s; ++m) {
        const double* um = u.row(m);
        const ParamVec& mum = mus[m];
        double* r = out.row(row++);
        for (std::size_t q = 0; q < nq; ++q) {
          double v = g0[q] + gu[q] * (um[q] - un[q]);
          if (order == 2) v += 0.5 * guu[q] * (uk[q] - un[q]) * (um[q] - un[q]);
          r[q] = v;
        }
        for (int a = 0; a < np; ++a) {
          const double dm = mum[a] - mun[a];
          if (dm != 0.0) {
            const double* ga = gmu[a].data();
            for (std::size_t q = 0; q < nq; ++q) r[q] += ga[q] * dm;
          }
          if (order == 2) {
            for (int b = 0; b < np; ++b) {
              const double cc = 0.5 * (muk[a] - mun[a]) * (mum[b] - mun[b]);
              if (cc == 0.0) continue;
              const double* gab = gmm[a][b].data();
              for (std::size_t q = 0; q < nq; ++q) r[q] += gab[q] * cc;
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace hyperrom
