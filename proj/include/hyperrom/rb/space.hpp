// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "hyperrom/errors.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/numerics/dense.hpp"

namespace hyperrom {

// Reduced basis in the discrete H1-seminorm inner product, together with the
// traces needed to evaluate reduced fields at every quadrature point.
struct RBSpace {
  std::vector<Vector> basis;      // full nodal vectors, orthonormal
  std::vector<Vector> basis_int;  // interior coefficients of the same vectors
  DenseMatrix zeta;               // n_qp_global x N basis values
  std::array<DenseMatrix, 2> dzeta;  // n_qp_global x N basis derivatives

  std::size_t n() const { return basis.size(); }

  // nodal field of the reduced solution with coefficients alpha
  Vector lift(const Vector& alpha) const {
    Vector out(basis.empty() ? 0 : basis[0].size(), 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) axpy(alpha[j], basis[j], out);
    return out;
  }
};

// Modified Gram-Schmidt with one re-orthogonalization pass.  Snapshots whose
// orthogonal remainder falls below the relative threshold are dropped, so the
// result can have fewer vectors than inputs.
inline std::vector<Vector> orthonormalize_x(const FESpace& s, const std::vector<Vector>& snaps,
                                            double rel_tol = 1e-10) {
  std::vector<Vector> basis;
  for (const Vector& w : snaps) {
    const double wn = x_norm(s, w);
    if (wn == 0.0) continue;
    Vector v = w;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& b : basis) {
        const double c = x_inner_product(s, v, b);
        axpy(-c, b, v);
      }
    }
    const double vn = x_norm(s, v);
    if (vn < rel_tol * wn) continue;
    for (double& x : v) x /= vn;
    basis.push_back(std::move(v));
  }
  return basis;
}

inline RBSpace build_rb_space(const FESpace& s, const std::vector<Vector>& snaps,
                              double rel_tol = 1e-10) {
  RBSpace rb;
  rb.basis = orthonormalize_x(s, snaps, rel_tol);
  const std::size_t n = rb.basis.size();
  rb.basis_int.reserve(n);
  rb.zeta = DenseMatrix(s.n_qp_global, n);
  rb.dzeta[0] = DenseMatrix(s.n_qp_global, n);
  if (s.dim == 2) rb.dzeta[1] = DenseMatrix(s.n_qp_global, n);
  for (std::size_t j = 0; j < n; ++j) {
    rb.basis_int.push_back(s.gather_interior(rb.basis[j]));
    const QuadratureTrace t = trace_at_quadrature(s, rb.basis[j]);
    for (std::size_t q = 0; q < s.n_qp_global; ++q) {
      rb.zeta(q, j) = t.value[q];
      rb.dzeta[0](q, j) = t.grad[0][q];
      if (s.dim == 2) rb.dzeta[1](q, j) = t.grad[1][q];
    }
  }
  return rb;
}

}  // namespace hyperrom
