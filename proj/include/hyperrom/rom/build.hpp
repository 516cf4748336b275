// SPDX-License-Identifier: Apache-2.0
//
// Offline construction of the reduced operators for a named hyperreduction
// scheme: expand each nonlinear term into its Taylor family over the sampled
// parameters, compress, select interpolation points, and assemble couplings.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hyperrom/cases.hpp"
#include "hyperrom/fem/fom.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/interp/eim.hpp"
#include "hyperrom/interp/taylor.hpp"
#include "hyperrom/rb/snapshots.hpp"
#include "hyperrom/rb/space.hpp"
#include "hyperrom/rom/operators.hpp"

namespace hyperrom {

struct SchemeConfig {
  std::string name = "GN-SOEIM";
  bool hyper = true;   // false: reference solver, no interpolation systems
  bool gnh = false;    // true: interpolate the linearized terms too
  int residual_order = 2;
  double residual_mult = 4.0;
  int jacobian_order = 1;
  double jacobian_mult = 2.0;
  int p_points = -1;  // spare points per residual target; -1 means N, 0 disables
  // Keep every compressed mode of the residual families and spend no points
  // on the estimate.  Interpolation is then exact on the whole family span,
  // which pins the hyperreduced fixed point to the reference one at sampled
  // parameters.
  bool full_rank_residual = false;
  std::size_t max_snapshot_rows = 20000;
};

inline SchemeConfig scheme_by_name(const std::string& name) {
  SchemeConfig c;
  c.name = name;
  if (name == "GN") {
    c.hyper = false;
  } else if (name == "EIM-GN") {
    c.residual_order = 0;
    c.residual_mult = 1.0;
  } else if (name == "FOEIM-GN") {
    c.residual_order = 1;
    c.residual_mult = 2.0;
  } else if (name == "SOEIM-GN") {
    c.residual_order = 2;
    c.residual_mult = 4.0;
  } else if (name == "GN-SOEIM") {
    c.gnh = true;
    c.residual_order = 2;
    c.residual_mult = 8.0;
    c.jacobian_order = 1;
    c.jacobian_mult = 2.0;
  } else {
    throw UnknownKey("scheme_by_name: " + name);
  }
  return c;
}

// Interpolation system for one term, sized to the available rank.  The
// requested m functions plus p estimate points are trimmed when the compressed
// family is smaller: the estimate points are kept at full strength first and
// m absorbs the loss; if even p points are not there, the estimate is dropped.
struct BuiltTarget {
  EIMSystem sys;
  std::size_t m = 0, p = 0;
  std::size_t rank = 0;
};

// Shared (M, P) clamp: honor the request when the usable count covers both,
// otherwise give the spare points priority and shrink M; a count at or below
// P drops the spare points entirely.
inline std::pair<std::size_t, std::size_t> clamp_interp_sizes(std::size_t usable,
                                                              std::size_t m_req,
                                                              std::size_t p_req) {
  if (m_req == 0 || usable >= m_req + p_req) {
    if (m_req == 0) return {usable, 0};
    return {m_req, p_req};
  }
  if (usable > p_req) return {usable - p_req, p_req};
  return {usable, 0};
}

// m_req == 0 keeps the full compressed family (one function per rank) and
// forces p to zero.
inline BuiltTarget build_interp_target(const CaseDefinition& c, const std::string& tag,
                                       int base_du, int order, const DenseMatrix& u_at_cand,
                                       const std::vector<ParamVec>& mus, const Vector& w,
                                       std::size_t m_req, std::size_t p_req,
                                       std::size_t max_rows = 20000) {
  const DenseMatrix fam = taylor_snapshots(c, tag, order, u_at_cand, mus, max_rows, base_du);
  if (m_req == 0) p_req = 0;
  const PODResult pod =
      pod_compress_refined(fam, w, m_req == 0 ? 0 : m_req + p_req);
  BuiltTarget out;
  out.rank = pod.rank;
  // The refined compression can report slightly more modes than the point
  // selection can actually tell apart, so the usable count is whatever the
  // selection reaches before its residual degenerates.
  std::size_t usable = 0;
  out.sys = eim_select(pod.modes, pod.modes.rows(), &usable);
  if (usable == 0) throw DegenerateResidual("build_interp_target: no selectable modes");
  std::tie(out.m, out.p) = clamp_interp_sizes(usable, m_req, p_req);
  return out;
}

// Snapshot fields evaluated on the quadrature points, one row per snapshot.
inline DenseMatrix snapshot_traces(const FESpace& s, const SnapshotSet& snaps) {
  const std::size_t n = snaps.fields.size(), nq = s.qp_w.size();
  DenseMatrix u(n, nq);
  for (std::size_t i = 0; i < n; ++i) {
    const QuadratureTrace tr = trace_at_quadrature(s, snaps.fields[i]);
    for (std::size_t q = 0; q < nq; ++q) u(i, q) = tr.value[q];
  }
  return u;
}

namespace detail {

inline std::size_t scaled_size(double mult, std::size_t n) {
  return static_cast<std::size_t>(std::llround(mult * static_cast<double>(n)));
}

}  // namespace detail

inline RomOperators build_rom_operators(const FESpace& s, const CaseDefinition& c,
                                        const AffineOperators& af, const SnapshotSet& snaps,
                                        const RBSpace& rb, const SchemeConfig& cfg) {
  RomOperators ops;
  ops.gnh = cfg.gnh;
  assemble_reduced_affine(af, rb, ops);
  if (!cfg.hyper) return ops;

  const std::size_t n = rb.n();
  const std::size_t m_res =
      cfg.full_rank_residual ? 0 : detail::scaled_size(cfg.residual_mult, n);
  const std::size_t m_jac = detail::scaled_size(cfg.jacobian_mult, n);
  const std::size_t p = cfg.full_rank_residual
                            ? 0
                            : (cfg.p_points < 0 ? n : static_cast<std::size_t>(cfg.p_points));
  const Vector& w = s.qp_w;
  const DenseMatrix u = snapshot_traces(s, snaps);

  std::vector<std::pair<std::string, int>> terms;  // tag, component
  if (c.has_g) terms.emplace_back("g", -1);
  for (std::size_t d = 0; d < c.f.size(); ++d)
    terms.emplace_back("f" + std::to_string(d + 1), static_cast<int>(d));

  for (const auto& [tag, component] : terms) {
    BuiltTarget bt = build_interp_target(c, tag, 0, cfg.residual_order, u, snaps.mu, w, m_res,
                                         p, cfg.max_snapshot_rows);
    TargetSystem ts;
    ts.tag = tag;
    ts.deriv = 0;
    ts.component = component;
    ts.m = bt.m;
    ts.p = bt.p;
    ts.rank = bt.rank;
    ts.sys = std::move(bt.sys);
    ts.q = point_traces(rb, ts.sys, ts.m + ts.p);
    ts.coupling = residual_coupling(rb, w, ts.sys, ts.m, component);
    ops.residual.push_back(std::move(ts));
  }

  if (cfg.gnh) {
    for (const auto& [tag, component] : terms) {
      BuiltTarget bt = build_interp_target(c, tag, 1, cfg.jacobian_order, u, snaps.mu, w,
                                           m_jac, 0, cfg.max_snapshot_rows);
      TargetSystem ts;
      ts.tag = tag;
      ts.deriv = 1;
      ts.component = component;
      ts.m = bt.m;
      ts.p = 0;
      ts.rank = bt.rank;
      ts.sys = std::move(bt.sys);
      ts.q = point_traces(rb, ts.sys, ts.m);
      ts.tensors = jacobian_tensors(rb, w, ts.sys, ts.m, component);
      ops.jacobian.push_back(std::move(ts));
    }
  }
  return ops;
}

}  // namespace hyperrom
