// SPDX-License-Identifier: Apache-2.0
//
// Empirical interpolation on a discrete candidate point set: proper
// orthogonal compression of a snapshot family, greedy point selection with a
// nested Newton-type basis, interpolation coefficient solves, and the
// residual-based error estimate obtained from the extra interpolation points.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hyperrom/errors.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/numerics/dense.hpp"
#include "hyperrom/numerics/eigen_sym.hpp"
#include "hyperrom/numerics/linear_solve.hpp"

namespace hyperrom {

// Points where interpolation candidates live, with quadrature weights for the
// L2 inner products used by the compression step.
struct CandidateSet {
  Vector x, y, w;

  std::size_t size() const { return x.size(); }
};

inline CandidateSet candidates_from_space(const FESpace& s) {
  CandidateSet c;
  c.x = s.qp_x;
  c.w = s.qp_w;
  c.y = s.dim == 2 ? s.qp_y : Vector(s.qp_x.size(), 0.0);
  return c;
}

// Uniform grid including both endpoints, trapezoid weights.
inline CandidateSet uniform_candidates_1d(double lo, double hi, std::size_t n) {
  if (n < 2) throw InvalidGrid("uniform_candidates_1d: need at least two points");
  CandidateSet c;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  c.x.resize(n);
  c.y.assign(n, 0.0);
  c.w.assign(n, h);
  for (std::size_t i = 0; i < n; ++i) c.x[i] = lo + h * static_cast<double>(i);
  c.w.front() = 0.5 * h;
  c.w.back() = 0.5 * h;
  return c;
}

struct PODResult {
  DenseMatrix modes;  // n_modes x n_points, row m holds sqrt(lambda_m) phi_m
  Vector lambda;      // all eigenvalues kept by the rank cut, descending
  std::size_t rank = 0;
};

enum class PodRoute { automatic, gram_snapshots, gram_points };

// Method of snapshots with the correlation built on whichever side is
// smaller: the K x K snapshot Gram matrix, or the weighted point Gram matrix
// when there are fewer candidate points than snapshots.  Both give the same
// modes.  Eigenvalues below 1e-14 of the largest are treated as rank loss.
// n_modes == 0 returns every mode the rank cut keeps.  Asking for more modes
// than the rank throws unless clamp_to_rank is set, in which case the result
// simply stops at the rank.
inline PODResult pod_compress(const DenseMatrix& snaps, const Vector& w, std::size_t n_modes,
                              PodRoute route = PodRoute::automatic,
                              bool clamp_to_rank = false) {
  const std::size_t k = snaps.rows(), nq = snaps.cols();
  if (w.size() != nq) throw MismatchedSets("pod_compress: weight count mismatch");
  if (k == 0) throw EmptyTrainingSet("pod_compress: no snapshots");
  if (route == PodRoute::automatic)
    route = k <= nq ? PodRoute::gram_snapshots : PodRoute::gram_points;

  PODResult out;
  const double kinv = 1.0 / static_cast<double>(k);

  if (route == PodRoute::gram_snapshots) {
    DenseMatrix c(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      const double* si = snaps.row(i);
      for (std::size_t j = i; j < k; ++j) {
        const double* sj = snaps.row(j);
        double s = 0.0;
        for (std::size_t q = 0; q < nq; ++q) s += w[q] * si[q] * sj[q];
        c(i, j) = c(j, i) = s * kinv;
      }
    }
    const EigenSym eig = sym_eig_desc(c);
    const double cut = 1e-14 * std::max(eig.values[0], 0.0);
    std::size_t rank = 0;
    while (rank < k && eig.values[rank] > cut && eig.values[rank] > 0.0) ++rank;
    out.rank = rank;
    out.lambda.assign(eig.values.begin(), eig.values.begin() + rank);
    if (n_modes == 0 || (clamp_to_rank && n_modes > rank)) n_modes = rank;
    if (n_modes > rank) throw RankCollapse("pod_compress: requested more modes than rank");
    out.modes = DenseMatrix(n_modes, nq);
    const double scale = std::sqrt(kinv);
    for (std::size_t m = 0; m < n_modes; ++m) {
      double* pm = out.modes.row(m);
      for (std::size_t j = 0; j < k; ++j) {
        const double a = eig.vectors(j, m) * scale;
        if (a == 0.0) continue;
        const double* sj = snaps.row(j);
        for (std::size_t q = 0; q < nq; ++q) pm[q] += a * sj[q];
      }
    }
    return out;
  }

  // point-side Gram: G = (1/K) W^1/2 S^T S W^1/2, modes are W^-1/2 v
  Vector sq(nq);
  for (std::size_t q = 0; q < nq; ++q) sq[q] = std::sqrt(w[q]);
  DenseMatrix g(nq, nq);
  for (std::size_t j = 0; j < k; ++j) {
    const double* sj = snaps.row(j);
    for (std::size_t p = 0; p < nq; ++p) {
      const double sp = sj[p] * sq[p];
      if (sp == 0.0) continue;
      double* gp = g.row(p);
      for (std::size_t q = p; q < nq; ++q) gp[q] += sp * sj[q] * sq[q];
    }
  }
  for (std::size_t p = 0; p < nq; ++p)
    for (std::size_t q = p; q < nq; ++q) g(q, p) = (g(p, q) *= kinv);
  const EigenSym eig = sym_eig_desc(g);
  const double cut = 1e-14 * std::max(eig.values[0], 0.0);
  const std::size_t maxrank = std::min(k, nq);
  std::size_t rank = 0;
  while (rank < maxrank && eig.values[rank] > cut && eig.values[rank] > 0.0) ++rank;
  out.rank = rank;
  out.lambda.assign(eig.values.begin(), eig.values.begin() + rank);
  if (n_modes == 0 || (clamp_to_rank && n_modes > rank)) n_modes = rank;
  if (n_modes > rank) throw RankCollapse("pod_compress: requested more modes than rank");
  out.modes = DenseMatrix(n_modes, nq);
  for (std::size_t m = 0; m < n_modes; ++m) {
    double* pm = out.modes.row(m);
    const double scale = std::sqrt(std::max(eig.values[m], 0.0));
    for (std::size_t q = 0; q < nq; ++q) pm[q] = scale * eig.vectors(q, m) / sq[q];
  }
  return out;
}

// Compression through a Gram matrix resolves mode amplitudes only down to
// about the square root of machine epsilon relative to the largest one, which
// shows up as an artificial rank cliff seven decades down.  Deflating the
// family against the modes already found and compressing the remainder moves
// the floor down by the residual amplitude per pass, so two or three passes
// reach every mode the interpolation systems can use.  Eigenvalues are
// concatenated per pass; they are descending within a pass but the seam
// between passes is only approximately monotone.
inline PODResult pod_compress_refined(const DenseMatrix& snaps, const Vector& w,
                                      std::size_t n_modes, int max_passes = 3) {
  PODResult acc = pod_compress(snaps, w, n_modes, PodRoute::automatic, true);
  if (n_modes == 0 || acc.modes.rows() >= n_modes) return acc;

  const std::size_t k = snaps.rows(), nq = snaps.cols();
  DenseMatrix resid = snaps;
  std::size_t deflated_from = 0;
  for (int pass = 1; pass < max_passes && acc.modes.rows() < n_modes; ++pass) {
    // remove the newly found directions from the remainder family
    for (std::size_t m = deflated_from; m < acc.modes.rows(); ++m) {
      const double* pm = acc.modes.row(m);
      double nm2 = 0.0;
      for (std::size_t q = 0; q < nq; ++q) nm2 += w[q] * pm[q] * pm[q];
      if (nm2 <= 0.0) continue;
      for (std::size_t i = 0; i < k; ++i) {
        double* ri = resid.row(i);
        double proj = 0.0;
        for (std::size_t q = 0; q < nq; ++q) proj += w[q] * pm[q] * ri[q];
        proj /= nm2;
        if (proj == 0.0) continue;
        for (std::size_t q = 0; q < nq; ++q) ri[q] -= proj * pm[q];
      }
    }
    deflated_from = acc.modes.rows();

    PODResult nxt;
    try {
      nxt = pod_compress(resid, w, n_modes - acc.modes.rows(), PodRoute::automatic, true);
    } catch (const DegenerateResidual&) {
      break;
    }
    if (nxt.modes.rows() == 0 || nxt.lambda.empty() || nxt.lambda[0] <= 0.0) break;
    // a remainder this small is roundoff, not family content; modes made from
    // it would fall under the selection threshold anyway
    if (!acc.lambda.empty() && nxt.lambda[0] < 1e-22 * acc.lambda[0]) break;
    // drop the tail of the new pass below the same floor
    {
      std::size_t keep = nxt.modes.rows();
      while (keep > 0 && nxt.lambda[keep - 1] < 1e-22 * acc.lambda[0]) --keep;
      if (keep == 0) break;
      if (keep < nxt.modes.rows()) {
        DenseMatrix trimmed(keep, nq);
        for (std::size_t m = 0; m < keep; ++m)
          for (std::size_t q = 0; q < nq; ++q) trimmed(m, q) = nxt.modes(m, q);
        nxt.modes = std::move(trimmed);
        nxt.lambda.resize(keep);
      }
    }
    DenseMatrix merged(acc.modes.rows() + nxt.modes.rows(), nq);
    for (std::size_t m = 0; m < acc.modes.rows(); ++m)
      for (std::size_t q = 0; q < nq; ++q) merged(m, q) = acc.modes(m, q);
    for (std::size_t m = 0; m < nxt.modes.rows(); ++m)
      for (std::size_t q = 0; q < nq; ++q) merged(acc.modes.rows() + m, q) = nxt.modes(m, q);
    acc.modes = std::move(merged);
    acc.lambda.insert(acc.lambda.end(), nxt.lambda.begin(), nxt.lambda.end());
    acc.rank = acc.modes.rows();
  }
  return acc;
}

// Interpolation system: nested functions psi_m with unit sup norm, magic
// points y_m, and the collocation matrix b(k, m) = psi_m(y_k), which is unit
// lower triangular with entries bounded by one in magnitude.
struct EIMSystem {
  DenseMatrix psi;                 // n_fun x n_points
  std::vector<std::size_t> points;  // candidate indices of y_1..y_n
  DenseMatrix b;                   // n_fun x n_fun

  std::size_t n_fun() const { return points.size(); }
};

// Greedy selection over the given modes.  Each step picks the largest
// remaining residual value over all modes and points, with ties resolved
// toward the lowest point index and then the lowest mode index, and deflates
// every residual at the new point.  A null `selected` keeps the strict
// contract (degeneracy throws); otherwise selection stops there and the
// partial system is returned with *selected telling how far it got.
inline EIMSystem eim_select(const DenseMatrix& modes, std::size_t n_fun,
                            std::size_t* selected = nullptr) {
  const std::size_t nm = modes.rows(), nq = modes.cols();
  if (n_fun > nm) throw RankCollapse("eim_select: more functions than modes");
  DenseMatrix res = modes;
  EIMSystem sys;
  sys.psi = DenseMatrix(n_fun, nq);
  sys.points.reserve(n_fun);

  std::size_t step = 0;
  for (; step < n_fun; ++step) {
    double best = -1.0;
    std::size_t best_q = 0, best_l = 0;
    for (std::size_t l = 0; l < nm; ++l) {
      const double* rl = res.row(l);
      for (std::size_t q = 0; q < nq; ++q) {
        const double v = std::abs(rl[q]);
        if (v > best || (v == best && (q < best_q || (q == best_q && l < best_l)))) {
          best = v;
          best_q = q;
          best_l = l;
        }
      }
    }
    if (best < 1e-12) {
      if (selected == nullptr)
        throw DegenerateResidual("eim_select: residual exhausted before requested size");
      break;
    }

    const double piv = res(best_l, best_q);
    double* pm = sys.psi.row(step);
    const double* rl = res.row(best_l);
    for (std::size_t q = 0; q < nq; ++q) pm[q] = rl[q] / piv;
    sys.points.push_back(best_q);
    for (std::size_t l = 0; l < nm; ++l) {
      double* r = res.row(l);
      const double c = r[best_q];
      if (c == 0.0) continue;
      for (std::size_t q = 0; q < nq; ++q) r[q] -= c * pm[q];
    }
  }

  if (selected != nullptr) *selected = step;
  if (step < n_fun) {
    DenseMatrix psi(step, nq);
    for (std::size_t j = 0; j < step; ++j)
      for (std::size_t q = 0; q < nq; ++q) psi(j, q) = sys.psi(j, q);
    sys.psi = psi;
  }
  const std::size_t got = sys.points.size();
  sys.b = DenseMatrix(got, got);
  for (std::size_t k = 0; k < got; ++k)
    for (std::size_t m = 0; m < got; ++m) sys.b(k, m) = sys.psi(m, sys.points[k]);
  return sys;
}

// Coefficients of the m-point interpolant of a target known at y_1..y_m.
inline Vector interp_coefficients(const EIMSystem& sys, std::size_t m,
                                  const Vector& target_at_points) {
  if (m > sys.n_fun()) throw MismatchedSets("interp_coefficients: m exceeds system size");
  if (target_at_points.size() < m)
    throw MismatchedSets("interp_coefficients: too few target values");
  return forward_subst_unit(sys.b, target_at_points, m);
}

// Values of the interpolant over the whole candidate set.
inline Vector interpolant_values(const EIMSystem& sys, std::size_t m, const Vector& beta) {
  Vector out(sys.psi.cols(), 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double* pj = sys.psi.row(j);
    const double bj = beta[j];
    for (std::size_t q = 0; q < out.size(); ++q) out[q] += bj * pj[q];
  }
  return out;
}

inline double sup_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Interpolation with the residual-based estimate from p spare points: solve
// the trailing p x p unit lower triangular block for the expansion of the
// deflected residual and sum coefficient magnitudes.
struct InterpEval {
  Vector beta;      // m coefficients
  double estimate;  // sum of |e_j|
  Vector e;         // p residual expansion coefficients
};

inline InterpEval interp_with_estimate(const EIMSystem& sys, std::size_t m, std::size_t p,
                                       const Vector& target_at_points) {
  if (m + p > sys.n_fun()) throw MismatchedSets("interp_with_estimate: m + p exceeds system");
  if (target_at_points.size() < m + p)
    throw MismatchedSets("interp_with_estimate: too few target values");
  InterpEval ev;
  ev.beta = forward_subst_unit(sys.b, target_at_points, m);
  ev.e.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double* row = sys.b.row(m + i);
    double s = target_at_points[m + i];
    for (std::size_t j = 0; j < m; ++j) s -= row[j] * ev.beta[j];
    for (std::size_t j = 0; j < i; ++j) s -= row[m + j] * ev.e[j];
    ev.e[i] = s;
  }
  ev.estimate = 0.0;
  for (double v : ev.e) ev.estimate += std::abs(v);
  return ev;
}

// Lebesgue constant of the m-point system: the sup over candidates of the sum
// of cardinal function magnitudes.
inline double lebesgue_constant(const EIMSystem& sys, std::size_t m) {
  // columns of B^-1 by forward substitution
  DenseMatrix binv(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    Vector ej(m, 0.0);
    ej[j] = 1.0;
    const Vector col = forward_subst_unit(sys.b, ej, m);
    for (std::size_t i = 0; i < m; ++i) binv(i, j) = col[i];
  }
  const std::size_t nq = sys.psi.cols();
  double best = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double lj = 0.0;
      for (std::size_t i = j; i < m; ++i) lj += sys.psi(i, q) * binv(i, j);
      s += std::abs(lj);
    }
    best = std::max(best, s);
  }
  return best;
}

}  // namespace hyperrom
