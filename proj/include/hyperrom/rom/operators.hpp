// SPDX-License-Identifier: Apache-2.0
//
// Reduced operators.  Everything parameter independent is assembled once from
// the reduced basis and the interpolation systems; the online solvers touch
// only these small dense objects.

#pragma once

#include <string>
#include <vector>

#include "hyperrom/cases.hpp"
#include "hyperrom/fem/fom.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/interp/eim.hpp"
#include "hyperrom/numerics/dense.hpp"
#include "hyperrom/numerics/linear_solve.hpp"
#include "hyperrom/rb/space.hpp"

namespace hyperrom {

// One interpolated nonlinear term.  Residual targets carry the coupling
// matrix that maps point values of the term to reduced residual entries;
// linearization targets instead carry one reduced matrix per interpolation
// function.
struct TargetSystem {
  std::string tag;        // g, f1, f2
  int deriv = 0;          // u-derivative order of the interpolated term
  int component = -1;     // spatial component for f terms, -1 for g
  std::size_t m = 0;      // interpolation size used by the online solver
  std::size_t p = 0;      // spare points for the error estimate
  std::size_t rank = 0;   // numerical rank of the compressed family
  EIMSystem sys;          // m + p functions and points
  DenseMatrix q;          // (m+p) x N basis values at the points
  DenseMatrix coupling;   // N x m, residual targets only
  std::vector<DenseMatrix> tensors;  // m reduced matrices, linearization targets only
};

struct RomOperators {
  std::size_t n = 0;
  std::vector<DenseMatrix> a;  // reduced affine matrices
  Vector l, l_out;
  std::vector<TargetSystem> residual;
  std::vector<TargetSystem> jacobian;  // filled for the linearized-system scheme
  bool gnh = false;
};

struct RomSolution {
  ParamVec mu;
  Vector alpha;
  double output = 0.0;
  int iterations = 0;
  bool converged = false;
  Vector step_norms;
};

inline void assemble_reduced_affine(const AffineOperators& af, const RBSpace& rb,
                                    RomOperators& out) {
  const std::size_t n = rb.n();
  out.n = n;
  out.a.clear();
  for (const BandMatrix& aq : af.a) {
    DenseMatrix an(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      const Vector col = aq.multiply(rb.basis_int[j]);
      for (std::size_t i = 0; i < n; ++i) an(i, j) = dot(rb.basis_int[i], col);
    }
    out.a.push_back(std::move(an));
  }
  out.l.assign(n, 0.0);
  out.l_out.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    out.l[j] = dot(af.l, rb.basis_int[j]);
    out.l_out[j] = dot(af.l_out, rb.basis_int[j]);
  }
}

// basis values at the system's first `count` interpolation points
inline DenseMatrix point_traces(const RBSpace& rb, const EIMSystem& sys, std::size_t count) {
  const std::size_t n = rb.n();
  DenseMatrix q(count, n);
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t j = 0; j < n; ++j) q(k, j) = rb.zeta(sys.points[k], j);
  return q;
}

// C = E B^-1 with E(i, k) = integral of psi_k against the basis trace; the
// trace is the basis value for the zeroth-order term and the directional
// derivative for the flux terms.
inline DenseMatrix residual_coupling(const RBSpace& rb, const Vector& w, const EIMSystem& sys,
                                     std::size_t m, int component) {
  const std::size_t n = rb.n(), nq = w.size();
  const DenseMatrix& trace = component < 0 ? rb.zeta : rb.dzeta[component];
  DenseMatrix e(n, m);
  for (std::size_t k = 0; k < m; ++k) {
    const double* pk = sys.psi.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t q = 0; q < nq; ++q) s += w[q] * pk[q] * trace(q, i);
      e(i, k) = s;
    }
  }
  DenseMatrix c(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    Vector row(m);
    for (std::size_t k = 0; k < m; ++k) row[k] = e(i, k);
    const Vector ci = backward_subst_unit_t(sys.b, row, m);
    for (std::size_t k = 0; k < m; ++k) c(i, k) = ci[k];
  }
  return c;
}

// Reduced matrices of the linearized term: tensor k is the integral of psi_k
// against (trace_i, basis_j) pairs.
inline std::vector<DenseMatrix> jacobian_tensors(const RBSpace& rb, const Vector& w,
                                                 const EIMSystem& sys, std::size_t m,
                                                 int component) {
  const std::size_t n = rb.n(), nq = w.size();
  const DenseMatrix& trace = component < 0 ? rb.zeta : rb.dzeta[component];
  std::vector<DenseMatrix> out;
  out.reserve(m);
  Vector wi(nq);
  for (std::size_t k = 0; k < m; ++k) {
    const double* pk = sys.psi.row(k);
    DenseMatrix t(n, n);
    for (std::size_t q = 0; q < nq; ++q) wi[q] = w[q] * pk[q];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < nq; ++q) s += wi[q] * trace(q, i) * rb.zeta(q, j);
        t(i, j) = s;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace hyperrom
