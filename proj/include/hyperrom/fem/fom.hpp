// SPDX-License-Identifier: Apache-2.0

#ifndef HYPERROM_FEM_FOM_HPP
#define HYPERROM_FEM_FOM_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "hyperrom/cases.hpp"
#include "hyperrom/errors.hpp"
#include "hyperrom/fem/space.hpp"

namespace hyperrom {

// Parameter-independent full-order blocks, Dirichlet rows and columns
// eliminated: stiffness per affine term, load, and the output functional.
struct AffineOperators {
  std::vector<BandMatrix> a;
  Vector l;
  Vector l_out;
};

inline AffineOperators assemble_affine(const FESpace& s, const CaseDefinition& c) {
  if (c.dim != s.dim) throw CaseDimensionMismatch("assemble_affine: case/space dimension differ");
  AffineOperators ops;
  // every shipped case has a single affine term, the Laplacian, which the
  // space already assembled as its X inner product matrix
  for (std::size_t q = 0; q < c.theta.size(); ++q) ops.a.push_back(s.x_stiffness);
  ops.l.assign(s.n_interior(), 0.0);
  ops.l_out.assign(s.n_interior(), 0.0);
  const double cell_vol = (s.dim == 2) ? s.hx * s.hy : s.hx;
  for (std::size_t cell = 0; cell < s.n_cells; ++cell) {
    for (std::size_t q = 0; q < s.nqp; ++q) {
      const std::size_t gq = cell * s.nqp + q;
      const double w = s.ref_w[q] * cell_vol;
      const double fx = c.load ? c.load(s.qp_x[gq], s.qp_y[gq]) : 0.0;
      for (std::size_t b = 0; b < s.nbas; ++b) {
        const std::ptrdiff_t ib = s.interior_of[s.local_node(cell, b)];
        if (ib < 0) continue;
        const double ph = s.phi[q * s.nbas + b];
        ops.l[static_cast<std::size_t>(ib)] += w * fx * ph;
        ops.l_out[static_cast<std::size_t>(ib)] += w * ph;
      }
    }
  }
  return ops;
}

namespace detail {

// Interior residual R(u) = A(mu) u + b(u; mu) - l with
// b_i = int g(u) phi_i + sum_d int f_d(u) d phi_i / d x_d.
inline Vector fom_residual(const FESpace& s, const CaseDefinition& c, const AffineOperators& ops,
                           const ParamVec& mu, const Vector& u_full, const Vector& u_int) {
  Vector r(s.n_interior(), 0.0);
  for (std::size_t q = 0; q < ops.a.size(); ++q) {
    const double th = c.theta[q](mu);
    const Vector au = ops.a[q].multiply(u_int);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += th * au[i];
  }
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ops.l[i];

  const double cell_vol = (s.dim == 2) ? s.hx * s.hy : s.hx;
  const double sx = 1.0 / s.hx, sy = (s.dim == 2) ? 1.0 / s.hy : 0.0;
  const bool has_f = !c.f.empty();
  std::vector<double> local(s.nbas);
  for (std::size_t cell = 0; cell < s.n_cells; ++cell) {
    for (std::size_t b = 0; b < s.nbas; ++b) local[b] = u_full[s.local_node(cell, b)];
    for (std::size_t q = 0; q < s.nqp; ++q) {
      double uq = 0.0;
      const double* ph = s.phi.data() + q * s.nbas;
      for (std::size_t b = 0; b < s.nbas; ++b) uq += ph[b] * local[b];
      const double w = s.ref_w[q] * cell_vol;
      const double gv = c.has_g ? c.g.value(uq, mu) : 0.0;
      double f1 = 0.0, f2 = 0.0;
      if (has_f) {
        f1 = c.f[0].value(uq, mu);
        if (c.f.size() > 1) f2 = c.f[1].value(uq, mu);
      }
      const double* dp = s.dphi.data() + q * s.nbas * s.dim;
      for (std::size_t b = 0; b < s.nbas; ++b) {
        const std::ptrdiff_t ib = s.interior_of[s.local_node(cell, b)];
        if (ib < 0) continue;
        double contrib = gv * ph[b];
        if (has_f) {
          contrib += f1 * dp[b * s.dim + 0] * sx;
          if (s.dim == 2 && c.f.size() > 1) contrib += f2 * dp[b * s.dim + 1] * sy;
        }
        r[static_cast<std::size_t>(ib)] += w * contrib;
      }
    }
  }
  return r;
}

// Interior Jacobian J(u) = A(mu) + int g_u(u) phi_i phi_j
//                        + sum_d int f_d_u(u) (d phi_i / d x_d) phi_j.
inline BandMatrix fom_jacobian(const FESpace& s, const CaseDefinition& c,
                               const AffineOperators& ops, const ParamVec& mu,
                               const Vector& u_full) {
  BandMatrix j(s.n_interior(), s.bandwidth, s.bandwidth);
  for (std::size_t q = 0; q < ops.a.size(); ++q) {
    const double th = c.theta[q](mu);
    const auto& src = ops.a[q].storage();
    auto& dst = j.storage();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] += th * src[k];
  }
  const double cell_vol = (s.dim == 2) ? s.hx * s.hy : s.hx;
  const double sx = 1.0 / s.hx, sy = (s.dim == 2) ? 1.0 / s.hy : 0.0;
  const bool has_f = !c.f.empty();
  std::vector<double> local(s.nbas);
  for (std::size_t cell = 0; cell < s.n_cells; ++cell) {
    for (std::size_t b = 0; b < s.nbas; ++b) local[b] = u_full[s.local_node(cell, b)];
    for (std::size_t q = 0; q < s.nqp; ++q) {
      double uq = 0.0;
      const double* ph = s.phi.data() + q * s.nbas;
      for (std::size_t b = 0; b < s.nbas; ++b) uq += ph[b] * local[b];
      const double w = s.ref_w[q] * cell_vol;
      const double gu = c.has_g ? c.g.du(uq, mu) : 0.0;
      double f1u = 0.0, f2u = 0.0;
      if (has_f) {
        f1u = c.f[0].du(uq, mu);
        if (c.f.size() > 1) f2u = c.f[1].du(uq, mu);
      }
      const double* dp = s.dphi.data() + q * s.nbas * s.dim;
      for (std::size_t a = 0; a < s.nbas; ++a) {
        const std::ptrdiff_t ia = s.interior_of[s.local_node(cell, a)];
        if (ia < 0) continue;
        double test = gu * ph[a];
        if (has_f) {
          test += f1u * dp[a * s.dim + 0] * sx;
          if (s.dim == 2 && c.f.size() > 1) test += f2u * dp[a * s.dim + 1] * sy;
        }
        if (test == 0.0) continue;
        const double wt = w * test;
        for (std::size_t b = 0; b < s.nbas; ++b) {
          const std::ptrdiff_t ib = s.interior_of[s.local_node(cell, b)];
          if (ib < 0) continue;
          j.at(static_cast<std::size_t>(ia), static_cast<std::size_t>(ib)) += wt * ph[b];
        }
      }
    }
  }
  return j;
}

}  // namespace detail

struct FOMSolution {
  Vector u;                  // full nodal vector, zero on the Dirichlet wall
  double output = 0.0;       // s(mu) = int u when the case defines it
  int iterations = 0;
  bool converged = false;
  std::vector<double> step_norms;  // ||delta u||_X per Newton iteration
};

// Newton with the exact Jacobian and a banded direct solve. Stops when
// ||delta u||_X <= tol. A step whose norm jumps by more than 10x is halved
// (at most 8 times); five consecutive residual increases abort the solve.
inline FOMSolution fom_newton_solve(const FESpace& s, const CaseDefinition& c,
                                    const AffineOperators& ops, const ParamVec& mu,
                                    const Vector* initial = nullptr) {
  if (c.dim != s.dim) throw CaseDimensionMismatch("fom_newton_solve: case/space dimension differ");
  if (static_cast<int>(mu.size()) != c.n_param)
    throw MismatchedSets("fom_newton_solve: parameter size mismatch");
  FOMSolution sol;
  sol.u.assign(s.n_nodes, 0.0);
  if (initial) {
    if (initial->size() != s.n_nodes) throw MismatchedSets("fom_newton_solve: bad initial guess");
    sol.u = *initial;
  }
  Vector u_int = s.gather_interior(sol.u);
  double prev_res = -1.0, prev_step = -1.0;
  int grow_count = 0;
  for (int it = 0; it < c.newton_max_iter; ++it) {
    const Vector r = detail::fom_residual(s, c, ops, mu, sol.u, u_int);
    const double rn = norm2(r);
    if (prev_res >= 0.0 && rn > prev_res) {
      if (++grow_count >= 5) throw NewtonDiverged("fom_newton_solve: residual grew 5 times");
    } else {
      grow_count = 0;
    }
    prev_res = rn;
    const BandMatrix j = detail::fom_jacobian(s, c, ops, mu, sol.u);
    Vector rhs(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
    Vector delta;
    try {
      delta = band_lu_solve(band_lu_factor(j), rhs);
    } catch (const SingularMatrix&) {
      throw NewtonDiverged("fom_newton_solve: singular jacobian");
    }
    Vector delta_full = s.scatter_interior(delta);
    double dn = x_norm(s, delta_full);
    if (prev_step > 0.0 && dn > 10.0 * prev_step) {
      for (int h = 0; h < 8 && dn > 10.0 * prev_step; ++h) {
        for (auto& v : delta) v *= 0.5;
        dn *= 0.5;
      }
      delta_full = s.scatter_interior(delta);
    }
    prev_step = dn;
    for (std::size_t i = 0; i < u_int.size(); ++i) u_int[i] += delta[i];
    sol.u = s.scatter_interior(u_int);
    sol.step_norms.push_back(dn);
    sol.iterations = it + 1;
    if (dn <= c.newton_tol) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) throw NewtonDiverged("fom_newton_solve: no convergence within max_iter");
  if (c.has_output) sol.output = dot(ops.l_out, u_int);
  return sol;
}

}  // namespace hyperrom

#endif
