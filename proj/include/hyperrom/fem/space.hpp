// SPDX-License-Identifier: Apache-2.0

#ifndef HYPERROM_FEM_SPACE_HPP
#define HYPERROM_FEM_SPACE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "hyperrom/errors.hpp"
#include "hyperrom/numerics/linear_solve.hpp"
#include "hyperrom/numerics/quadrature.hpp"

namespace hyperrom {

// Structured interval / quadrilateral mesh with tensor-product Lagrange
// elements of degree p (equispaced nodes) and homogeneous Dirichlet walls.
// Nodes are numbered lexicographically, x fastest; cells likewise. The global
// quadrature points (cell-major, then tensor order within the cell) double as
// the candidate set for the interpolation machinery.
class FESpace {
 public:
  int dim = 0;
  int p = 0;
  std::size_t nx = 0, ny = 0;
  std::size_t quad_order = 0;
  std::array<double, 2> lo{0.0, 0.0}, hi{1.0, 1.0};

  std::size_t nnx = 0, nny = 0;  // nodes per direction
  std::size_t n_nodes = 0;
  std::size_t n_cells = 0;
  double hx = 0.0, hy = 0.0;

  std::vector<double> node_x, node_y;
  std::vector<std::ptrdiff_t> interior_of;  // node id -> interior index, -1 on the wall
  std::vector<std::size_t> interior;        // interior index -> node id

  // reference-cell tables on [0,1]^dim
  std::size_t nqp = 0;   // quadrature points per cell
  std::size_t nbas = 0;  // basis functions per cell
  std::vector<double> phi;    // nqp x nbas
  std::vector<double> dphi;   // nqp x nbas x dim, reference derivatives
  std::vector<double> ref_w;  // nqp reference weights on [0,1]^dim
  std::vector<double> ref_x;  // nqp x dim reference coordinates

  // global quadrature data
  std::size_t n_qp_global = 0;
  std::vector<double> qp_x, qp_y, qp_w;

  std::size_t bandwidth = 0;  // half-bandwidth of the interior coupling
  BandMatrix x_stiffness;     // interior Laplacian; the X inner product matrix

  std::size_t n_interior() const { return interior.size(); }

  std::size_t local_node(std::size_t cell, std::size_t b) const {
    if (dim == 1) return cell * static_cast<std::size_t>(p) + b;
    const std::size_t cx = cell % nx, cy = cell / nx;
    const std::size_t bx = b % (p + 1), by = b / (p + 1);
    return (cy * p + by) * nnx + (cx * p + bx);
  }

  Vector gather_interior(const Vector& full) const {
    Vector out(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i) out[i] = full[interior[i]];
    return out;
  }

  Vector scatter_interior(const Vector& inner) const {
    Vector out(n_nodes, 0.0);
    for (std::size_t i = 0; i < interior.size(); ++i) out[interior[i]] = inner[i];
    return out;
  }
};

namespace detail {

// Lagrange basis with equispaced nodes t_i = i/p on [0,1].
inline double lagrange_value(int p, int i, double t) {
  double v = 1.0;
  const double ti = static_cast<double>(i) / p;
  for (int j = 0; j <= p; ++j) {
    if (j == i) continue;
    const double tj = static_cast<double>(j) / p;
    v *= (t - tj) / (ti - tj);
  }
  return v;
}

inline double lagrange_deriv(int p, int i, double t) {
  const double ti = static_cast<double>(i) / p;
  double acc = 0.0;
  for (int k = 0; k <= p; ++k) {
    if (k == i) continue;
    const double tk = static_cast<double>(k) / p;
    double prod = 1.0 / (ti - tk);
    for (int j = 0; j <= p; ++j) {
      if (j == i || j == k) continue;
      const double tj = static_cast<double>(j) / p;
      prod *= (t - tj) / (ti - tj);
    }
    acc += prod;
  }
  return acc;
}

}  // namespace detail

inline FESpace build_fe_space(int dim, std::size_t nx, std::size_t ny, int p,
                              std::size_t quad_order,
                              std::array<double, 2> lo = {0.0, 0.0},
                              std::array<double, 2> hi = {1.0, 1.0}) {
  if (dim != 1 && dim != 2) throw InvalidGrid("build_fe_space: dim must be 1 or 2");
  if (p < 1 || p > 3) throw InvalidDegree("build_fe_space: p must be in [1, 3]");
  if (nx < 1 || (dim == 2 && ny < 1)) throw InvalidGrid("build_fe_space: need at least one cell");
  if (quad_order < 1 || quad_order > 32)
    throw InvalidGrid("build_fe_space: quadrature order out of range");

  FESpace s;
  s.dim = dim;
  s.p = p;
  s.nx = nx;
  s.ny = (dim == 2) ? ny : 1;
  s.quad_order = quad_order;
  s.lo = lo;
  s.hi = hi;
  s.nnx = p * nx + 1;
  s.nny = (dim == 2) ? (p * ny + 1) : 1;
  s.n_nodes = s.nnx * s.nny;
  s.n_cells = s.nx * s.ny;
  s.hx = (hi[0] - lo[0]) / static_cast<double>(nx);
  s.hy = (dim == 2) ? (hi[1] - lo[1]) / static_cast<double>(s.ny) : 1.0;
  if (s.hx <= 0.0 || (dim == 2 && s.hy <= 0.0))
    throw InvalidGrid("build_fe_space: empty domain box");

  s.node_x.resize(s.n_nodes);
  s.node_y.assign(s.n_nodes, 0.0);
  s.interior_of.assign(s.n_nodes, -1);
  for (std::size_t gj = 0; gj < s.nny; ++gj) {
    for (std::size_t gi = 0; gi < s.nnx; ++gi) {
      const std::size_t id = gj * s.nnx + gi;
      s.node_x[id] = lo[0] + s.hx * static_cast<double>(gi) / p;
      if (dim == 2) s.node_y[id] = lo[1] + s.hy * static_cast<double>(gj) / p;
      const bool wall_x = (gi == 0 || gi == s.nnx - 1);
      const bool wall_y = (dim == 2) && (gj == 0 || gj == s.nny - 1);
      if (!wall_x && !wall_y) {
        s.interior_of[id] = static_cast<std::ptrdiff_t>(s.interior.size());
        s.interior.push_back(id);
      }
    }
  }

  // reference tables
  const QuadratureRule g1 = gauss_legendre_rule(quad_order);
  const std::size_t q1 = quad_order;
  s.nqp = (dim == 2) ? q1 * q1 : q1;
  s.nbas = (dim == 2) ? static_cast<std::size_t>((p + 1) * (p + 1))
                      : static_cast<std::size_t>(p + 1);
  s.phi.assign(s.nqp * s.nbas, 0.0);
  s.dphi.assign(s.nqp * s.nbas * dim, 0.0);
  s.ref_w.assign(s.nqp, 0.0);
  s.ref_x.assign(s.nqp * dim, 0.0);
  for (std::size_t qy = 0; qy < (dim == 2 ? q1 : 1); ++qy) {
    for (std::size_t qx = 0; qx < q1; ++qx) {
      const std::size_t q = (dim == 2) ? qy * q1 + qx : qx;
      const double tx = 0.5 * (g1.points[qx] + 1.0);
      const double ty = (dim == 2) ? 0.5 * (g1.points[qy] + 1.0) : 0.0;
      double w = 0.5 * g1.weights[qx];
      if (dim == 2) w *= 0.5 * g1.weights[qy];
      s.ref_w[q] = w;
      s.ref_x[q * dim + 0] = tx;
      if (dim == 2) s.ref_x[q * dim + 1] = ty;
      for (std::size_t b = 0; b < s.nbas; ++b) {
        const int bx = static_cast<int>(dim == 2 ? b % (p + 1) : b);
        const int by = static_cast<int>(dim == 2 ? b / (p + 1) : 0);
        const double vx = detail::lagrange_value(p, bx, tx);
        const double dx = detail::lagrange_deriv(p, bx, tx);
        if (dim == 1) {
          s.phi[q * s.nbas + b] = vx;
          s.dphi[q * s.nbas + b] = dx;
        } else {
          const double vy = detail::lagrange_value(p, by, ty);
          const double dy = detail::lagrange_deriv(p, by, ty);
          s.phi[q * s.nbas + b] = vx * vy;
          s.dphi[(q * s.nbas + b) * 2 + 0] = dx * vy;
          s.dphi[(q * s.nbas + b) * 2 + 1] = vx * dy;
        }
      }
    }
  }

  // global quadrature points
  s.n_qp_global = s.n_cells * s.nqp;
  s.qp_x.resize(s.n_qp_global);
  s.qp_y.assign(s.n_qp_global, 0.0);
  s.qp_w.resize(s.n_qp_global);
  const double cell_vol = (dim == 2) ? s.hx * s.hy : s.hx;
  for (std::size_t cell = 0; cell < s.n_cells; ++cell) {
    const std::size_t cx = cell % s.nx, cy = cell / s.nx;
    for (std::size_t q = 0; q < s.nqp; ++q) {
      const std::size_t gq = cell * s.nqp + q;
      s.qp_x[gq] = lo[0] + (static_cast<double>(cx) + s.ref_x[q * dim + 0]) * s.hx;
      if (dim == 2)
        s.qp_y[gq] = lo[1] + (static_cast<double>(cy) + s.ref_x[q * dim + 1]) * s.hy;
      s.qp_w[gq] = s.ref_w[q] * cell_vol;
    }
  }

  // half-bandwidth of the interior coupling
  std::size_t bw = 0;
  for (std::size_t cell = 0; cell < s.n_cells; ++cell) {
    std::ptrdiff_t imin = -1, imax = -1;
    for (std::size_t b = 0; b < s.nbas; ++b) {
      const std::ptrdiff_t ii = s.interior_of[s.local_node(cell, b)];
      if (ii < 0) continue;
      if (imin < 0 || ii < imin) imin = ii;
      if (ii > imax) imax = ii;
    }
    if (imax >= 0) bw = std::max(bw, static_cast<std::size_t>(imax - imin));
  }
  s.bandwidth = bw;

  // Laplacian stiffness on interior DOFs; this is also the X inner product
  s.x_stiffness = BandMatrix(s.n_interior(), bw, bw);
  const double sx = 1.0 / s.hx, sy = (dim == 2) ? 1.0 / s.hy : 0.0;
  for (std::size_t cell = 0; cell < s.n_cells; ++cell) {
    for (std::size_t q = 0; q < s.nqp; ++q) {
      const double w = s.ref_w[q] * cell_vol;
      for (std::size_t a = 0; a < s.nbas; ++a) {
        const std::ptrdiff_t ia = s.interior_of[s.local_node(cell, a)];
        if (ia < 0) continue;
        const double dax = s.dphi[(q * s.nbas + a) * dim + 0] * sx;
        const double day = (dim == 2) ? s.dphi[(q * s.nbas + a) * dim + 1] * sy : 0.0;
        for (std::size_t b = 0; b < s.nbas; ++b) {
          const std::ptrdiff_t ib = s.interior_of[s.local_node(cell, b)];
          if (ib < 0) continue;
          const double dbx = s.dphi[(q * s.nbas + b) * dim + 0] * sx;
          const double dby = (dim == 2) ? s.dphi[(q * s.nbas + b) * dim + 1] * sy : 0.0;
          s.x_stiffness.at(static_cast<std::size_t>(ia), static_cast<std::size_t>(ib)) +=
              w * (dax * dbx + day * dby);
        }
      }
    }
  }
  return s;
}

// Traces of one nodal field at every global quadrature point.
struct QuadratureTrace {
  Vector value;
  std::array<Vector, 2> grad;
};

inline QuadratureTrace trace_at_quadrature(const FESpace& s, const Vector& nodal) {
  if (nodal.size() != s.n_nodes) throw MismatchedSets("trace_at_quadrature: field size mismatch");
  QuadratureTrace t;
  t.value.assign(s.n_qp_global, 0.0);
  t.grad[0].assign(s.n_qp_global, 0.0);
  if (s.dim == 2) t.grad[1].assign(s.n_qp_global, 0.0);
  const double sx = 1.0 / s.hx, sy = (s.dim == 2) ? 1.0 / s.hy : 0.0;
  std::vector<double> local(s.nbas);
  for (std::size_t cell = 0; cell < s.n_cells; ++cell) {
    for (std::size_t b = 0; b < s.nbas; ++b) local[b] = nodal[s.local_node(cell, b)];
    for (std::size_t q = 0; q < s.nqp; ++q) {
      const std::size_t gq = cell * s.nqp + q;
      double v = 0.0, gx = 0.0, gy = 0.0;
      const double* ph = s.phi.data() + q * s.nbas;
      const double* dp = s.dphi.data() + q * s.nbas * s.dim;
      for (std::size_t b = 0; b < s.nbas; ++b) {
        v += ph[b] * local[b];
        gx += dp[b * s.dim + 0] * local[b];
        if (s.dim == 2) gy += dp[b * s.dim + 1] * local[b];
      }
      t.value[gq] = v;
      t.grad[0][gq] = gx * sx;
      if (s.dim == 2) t.grad[1][gq] = gy * sy;
    }
  }
  return t;
}

// Evaluate a nodal field at arbitrary physical points. Shared cell faces
// belong to the lower-index cell.
inline Vector eval_fields_at_points(const FESpace& s, const Vector& nodal,
                                    const std::vector<double>& px,
                                    const std::vector<double>& py) {
  if (nodal.size() != s.n_nodes) throw MismatchedSets("eval_fields_at_points: field size mismatch");
  const double tol = 1e-12 * std::max(std::abs(s.hi[0] - s.lo[0]), 1.0);
  Vector out(px.size(), 0.0);
  for (std::size_t k = 0; k < px.size(); ++k) {
    const double x = px[k];
    const double y = (s.dim == 2) ? py[k] : 0.0;
    if (x < s.lo[0] - tol || x > s.hi[0] + tol ||
        (s.dim == 2 && (y < s.lo[1] - tol || y > s.hi[1] + tol)))
      throw PointOutsideDomain("eval_fields_at_points: point outside the domain box");
    auto locate = [tol](double c, double lo, double h, std::size_t n) {
      double r = (c - lo) / h;
      std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::ceil(r)) - 1;
      if (i < 0) i = 0;
      if (i >= static_cast<std::ptrdiff_t>(n)) i = static_cast<std::ptrdiff_t>(n) - 1;
      (void)tol;
      return static_cast<std::size_t>(i);
    };
    const std::size_t cx = locate(x, s.lo[0], s.hx, s.nx);
    const std::size_t cy = (s.dim == 2) ? locate(y, s.lo[1], s.hy, s.ny) : 0;
    const std::size_t cell = cy * s.nx + cx;
    const double tx = (x - (s.lo[0] + cx * s.hx)) / s.hx;
    const double ty = (s.dim == 2) ? (y - (s.lo[1] + cy * s.hy)) / s.hy : 0.0;
    double v = 0.0;
    for (std::size_t b = 0; b < s.nbas; ++b) {
      const int bx = static_cast<int>(s.dim == 2 ? b % (s.p + 1) : b);
      const int by = static_cast<int>(s.dim == 2 ? b / (s.p + 1) : 0);
      double shape = detail::lagrange_value(s.p, bx, tx);
      if (s.dim == 2) shape *= detail::lagrange_value(s.p, by, ty);
      v += shape * nodal[s.local_node(cell, b)];
    }
    out[k] = v;
  }
  return out;
}

// H^1_0 seminorm inner product over interior fields (both arguments are
// full-length nodal vectors with zero Dirichlet entries).
inline double x_inner_product(const FESpace& s, const Vector& u, const Vector& v) {
  const Vector ui = s.gather_interior(u);
  const Vector vi = s.gather_interior(v);
  const Vector kv = s.x_stiffness.multiply(vi);
  return dot(ui, kv);
}

inline double x_norm(const FESpace& s, const Vector& u) {
  const double q = x_inner_product(s, u, u);
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace hyperrom

#endif
