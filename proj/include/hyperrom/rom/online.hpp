// SPDX-License-Identifier: Apache-2.0
//
// Online reduced solvers.  The hyperreduced solver evaluates nonlinear terms
// only at interpolation points; the reference solver projects the full
// residual and Jacobian every iteration and exists to check the others and to
// time the point of hyperreduction.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hyperrom/cases.hpp"
#include "hyperrom/errors.hpp"
#include "hyperrom/fem/fom.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/numerics/dense.hpp"
#include "hyperrom/numerics/linear_solve.hpp"
#include "hyperrom/rb/space.hpp"
#include "hyperrom/rom/operators.hpp"

namespace hyperrom {

namespace detail {

inline Vector theta_values(const CaseDefinition& c, const ParamVec& mu) {
  Vector th(c.theta.size());
  for (std::size_t q = 0; q < th.size(); ++q) th[q] = c.theta[q](mu);
  return th;
}

// reduced field at the first count interpolation points of a target
inline Vector field_at_points(const TargetSystem& ts, const Vector& alpha, std::size_t count) {
  Vector u(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const double* qk = ts.q.row(k);
    double s = 0.0;
    for (std::size_t j = 0; j < alpha.size(); ++j) s += qk[j] * alpha[j];
    u[k] = s;
  }
  return u;
}

inline DenseMatrix reduced_affine_sum(const RomOperators& ops, const Vector& th) {
  DenseMatrix j(ops.n, ops.n);
  for (std::size_t q = 0; q < ops.a.size(); ++q)
    for (std::size_t i = 0; i < j.size(); ++i) j.data()[i] += th[q] * ops.a[q].data()[i];
  return j;
}

}  // namespace detail

// r(alpha) = sum_q theta_q A_q alpha - l + sum_t C_t c_t(u_N(y); mu)
inline Vector hyper_residual(const RomOperators& ops, const CaseDefinition& c,
                             const ParamVec& mu, const Vector& alpha) {
  const Vector th = detail::theta_values(c, mu);
  Vector r(ops.n, 0.0);
  for (std::size_t q = 0; q < ops.a.size(); ++q) {
    const Vector aq = matvec(ops.a[q], alpha);
    axpy(th[q], aq, r);
  }
  for (std::size_t i = 0; i < ops.n; ++i) r[i] -= ops.l[i];
  for (const TargetSystem& ts : ops.residual) {
    const Vector u = detail::field_at_points(ts, alpha, ts.m);
    for (std::size_t k = 0; k < ts.m; ++k) {
      const double t = eval_nonlinear(c, ts.tag, 0, {0, 0}, u[k], mu);
      if (t == 0.0) continue;
      for (std::size_t i = 0; i < ops.n; ++i) r[i] += ts.coupling(i, k) * t;
    }
  }
  return r;
}

// Exact derivative of the hyperreduced residual:
// J = sum theta A + sum_t C_t diag(c_t'(u_N(y))) Q_t.
inline DenseMatrix hyper_jacobian_exact(const RomOperators& ops, const CaseDefinition& c,
                                        const ParamVec& mu, const Vector& alpha) {
  DenseMatrix j = detail::reduced_affine_sum(ops, detail::theta_values(c, mu));
  for (const TargetSystem& ts : ops.residual) {
    const Vector u = detail::field_at_points(ts, alpha, ts.m);
    for (std::size_t k = 0; k < ts.m; ++k) {
      const double tu = eval_nonlinear(c, ts.tag, 1, {0, 0}, u[k], mu);
      if (tu == 0.0) continue;
      const double* qk = ts.q.row(k);
      for (std::size_t i = 0; i < ops.n; ++i) {
        const double cik = ts.coupling(i, k) * tu;
        double* ji = j.row(i);
        for (std::size_t col = 0; col < ops.n; ++col) ji[col] += cik * qk[col];
      }
    }
  }
  return j;
}

// Jacobian with its own interpolation systems: the linearized terms are
// expanded in their interpolation bases and contracted with the precomputed
// reduced matrices.
inline DenseMatrix hyper_jacobian_interp(const RomOperators& ops, const CaseDefinition& c,
                                         const ParamVec& mu, const Vector& alpha) {
  if (ops.jacobian.empty() && !ops.residual.empty())
    throw MissingSystem("hyper_jacobian_interp: operators carry no linearized systems");
  DenseMatrix j = detail::reduced_affine_sum(ops, detail::theta_values(c, mu));
  for (const TargetSystem& ts : ops.jacobian) {
    const Vector u = detail::field_at_points(ts, alpha, ts.m);
    Vector t(ts.m);
    for (std::size_t k = 0; k < ts.m; ++k)
      t[k] = eval_nonlinear(c, ts.tag, 1, {0, 0}, u[k], mu);
    const Vector beta = forward_subst_unit(ts.sys.b, t, ts.m);
    for (std::size_t k = 0; k < ts.m; ++k) {
      if (beta[k] == 0.0) continue;
      const DenseMatrix& tk = ts.tensors[k];
      for (std::size_t i = 0; i < j.size(); ++i) j.data()[i] += beta[k] * tk.data()[i];
    }
  }
  return j;
}

namespace detail {

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<DenseMatrix(const Vector&)>;

// Shared Newton driver on reduced coordinates: zero start, step-norm
// stopping, the same step-halving guard as the full-order solver.
inline RomSolution newton_reduced(std::size_t n, const ParamVec& mu, double tol, int max_iter,
                                  const ResidualFn& res, const JacobianFn& jac,
                                  const std::string& who) {
  RomSolution sol;
  sol.mu = mu;
  sol.alpha.assign(n, 0.0);
  double prev_step = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector r = res(sol.alpha);
    const DenseMatrix j = jac(sol.alpha);
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
    Vector delta;
    try {
      delta = lu_factor_solve(j, rhs);
    } catch (const SingularMatrix&) {
      throw NewtonDiverged(who + ": singular reduced jacobian");
    }
    double dn = norm2(delta);
    if (prev_step > 0.0 && dn > 10.0 * prev_step) {
      for (int h = 0; h < 8 && dn > 10.0 * prev_step; ++h) {
        for (double& v : delta) v *= 0.5;
        dn *= 0.5;
      }
    }
    prev_step = dn;
    for (std::size_t i = 0; i < n; ++i) sol.alpha[i] += delta[i];
    sol.step_norms.push_back(dn);
    sol.iterations = it + 1;
    if (dn <= tol) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) throw NewtonDiverged(who + ": no convergence within max_iter");
  return sol;
}

}  // namespace detail

inline RomSolution online_hgn(const RomOperators& ops, const CaseDefinition& c,
                              const ParamVec& mu) {
  RomSolution sol = detail::newton_reduced(
      ops.n, mu, c.newton_tol, c.newton_max_iter,
      [&](const Vector& a) { return hyper_residual(ops, c, mu, a); },
      [&](const Vector& a) { return hyper_jacobian_exact(ops, c, mu, a); }, "online_hgn");
  sol.output = dot(ops.l_out, sol.alpha);
  return sol;
}

inline RomSolution online_gnh(const RomOperators& ops, const CaseDefinition& c,
                              const ParamVec& mu) {
  RomSolution sol = detail::newton_reduced(
      ops.n, mu, c.newton_tol, c.newton_max_iter,
      [&](const Vector& a) { return hyper_residual(ops, c, mu, a); },
      [&](const Vector& a) { return hyper_jacobian_interp(ops, c, mu, a); }, "online_gnh");
  sol.output = dot(ops.l_out, sol.alpha);
  return sol;
}

// Reference reduced solver: project the full residual and Jacobian each
// iteration.  Deliberately touches full-order quantities, so its cost scales
// with the mesh.
inline RomSolution online_gn_reference(const FESpace& s, const CaseDefinition& c,
                                       const AffineOperators& af, const RBSpace& rb,
                                       const RomOperators& ops, const ParamVec& mu) {
  const std::size_t n = rb.n();
  auto res = [&](const Vector& a) {
    const Vector u_full = rb.lift(a);
    const Vector u_int = s.gather_interior(u_full);
    const Vector r = detail::fom_residual(s, c, af, mu, u_full, u_int);
    Vector rn(n);
    for (std::size_t i = 0; i < n; ++i) rn[i] = dot(rb.basis_int[i], r);
    return rn;
  };
  auto jac = [&](const Vector& a) {
    const Vector u_full = rb.lift(a);
    const BandMatrix j = detail::fom_jacobian(s, c, af, mu, u_full);
    DenseMatrix jn(n, n);
    for (std::size_t col = 0; col < n; ++col) {
      const Vector jc = j.multiply(rb.basis_int[col]);
      for (std::size_t i = 0; i < n; ++i) jn(i, col) = dot(rb.basis_int[i], jc);
    }
    return jn;
  };
  RomSolution sol = detail::newton_reduced(n, mu, c.newton_tol, c.newton_max_iter, res, jac,
                                           "online_gn_reference");
  sol.output = dot(ops.l_out, sol.alpha);
  return sol;
}

// Interpolation-residual error estimate: for each nonlinear term with spare
// points, interpolate the term at the reduced solution and sum the deflected
// residual magnitudes; the reported value is the worst term.
inline double rom_error_estimate(const RomOperators& ops, const CaseDefinition& c,
                                 const ParamVec& mu, const Vector& alpha) {
  double worst = -1.0;
  for (const TargetSystem& ts : ops.residual) {
    if (ts.p == 0) continue;
    const Vector u = detail::field_at_points(ts, alpha, ts.m + ts.p);
    Vector t(ts.m + ts.p);
    for (std::size_t k = 0; k < t.size(); ++k)
      t[k] = eval_nonlinear(c, ts.tag, 0, {0, 0}, u[k], mu);
    const InterpEval ev = interp_with_estimate(ts.sys, ts.m, ts.p, t);
    worst = std::max(worst, ev.estimate);
  }
  if (worst < 0.0)
    throw MissingSystem("rom_error_estimate: no target carries estimate points");
  return worst;
}

}  // namespace hyperrom
