// SPDX-License-Identifier: Apache-2.0
//
// Greedy enrichment of the parameter sample driven by the interpolation
// error estimate over a training grid.  Two drivers share the bookkeeping:
// the finite element one rebuilds the reduced operators each iteration and
// estimates through the online solver, while the closed-form 1D driver needs
// no solves at all and reduces to the pure interpolation study.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "hyperrom/cases.hpp"
#include "hyperrom/errors.hpp"
#include "hyperrom/fem/fom.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/interp/eim.hpp"
#include "hyperrom/rb/snapshots.hpp"
#include "hyperrom/rb/space.hpp"
#include "hyperrom/rom/build.hpp"
#include "hyperrom/rom/online.hpp"

namespace hyperrom {

struct GreedyConfig {
  SchemeConfig scheme = scheme_by_name("GN-SOEIM");
  double tol = 1e-3;
  std::size_t n_max = 25;
  std::string log_path;  // CSV written here when nonempty
};

struct GreedyIteration {
  std::size_t n;          // sample size the estimates were computed with
  std::size_t selected;   // training-grid index of the argmax
  ParamVec selected_mu;
  double max_estimate = 0.0;
  double seconds = 0.0;
  Vector estimates;       // estimate per training point, for provenance checks
};

struct GreedyResult {
  std::vector<ParamVec> sample;
  std::vector<GreedyIteration> history;
  bool converged = false;
  bool duplicate_stop = false;
};

namespace detail {

inline bool same_param(const ParamVec& a, const ParamVec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  return true;
}

inline bool in_sample(const std::vector<ParamVec>& sample, const ParamVec& mu) {
  for (const ParamVec& s : sample)
    if (same_param(s, mu)) return true;
  return false;
}

// argmax over the training set, skipping current sample members; ties go to
// the lowest training index
inline std::size_t select_argmax(const Vector& est, const std::vector<ParamVec>& train,
                                 const std::vector<ParamVec>& sample) {
  std::size_t best = train.size();
  double best_v = -1.0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (in_sample(sample, train[i])) continue;
    if (est[i] > best_v) {
      best_v = est[i];
      best = i;
    }
  }
  if (best == train.size()) throw EmptyTrainingSet("greedy: training set exhausted");
  return best;
}

inline void write_greedy_log(const std::string& path, const std::vector<GreedyIteration>& h) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw IoError("greedy log: cannot open " + path);
  out << "# greedy sampling log\n";
  out << "iteration,N";
  const std::size_t np = h.empty() ? 0 : h.front().selected_mu.size();
  for (std::size_t p = 0; p < np; ++p) out << ",mu" << p + 1;
  out << ",max_estimate,seconds\n";
  char buf[64];
  for (std::size_t i = 0; i < h.size(); ++i) {
    out << i + 1 << ',' << h[i].n;
    for (double m : h[i].selected_mu) {
      std::snprintf(buf, sizeof(buf), ",%.10g", m);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.6e,%.3f\n", h[i].max_estimate, h[i].seconds);
    out << buf;
  }
}

template <class EstimateSweep>
GreedyResult greedy_loop(const std::vector<ParamVec>& s_init,
                         const std::vector<ParamVec>& train, const GreedyConfig& cfg,
                         const EstimateSweep& sweep) {
  if (train.empty()) throw EmptyTrainingSet("greedy: empty training set");
  GreedyResult res;
  res.sample = s_init;
  while (true) {
    const auto t0 = std::chrono::steady_clock::now();
    GreedyIteration it;
    it.n = res.sample.size();
    it.estimates = sweep(res.sample);
    it.selected = select_argmax(it.estimates, train, res.sample);
    it.selected_mu = train[it.selected];
    it.max_estimate = it.estimates[it.selected];
    it.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.history.push_back(it);

    if (it.max_estimate <= cfg.tol) {
      res.converged = true;
      break;
    }
    if (in_sample(res.sample, it.selected_mu)) {
      res.duplicate_stop = true;  // safety net; selection already skips members
      break;
    }
    res.sample.push_back(it.selected_mu);
    if (res.sample.size() >= cfg.n_max) break;
  }
  write_greedy_log(cfg.log_path, res.history);
  return res;
}

}  // namespace detail

// Closed-form driver: the sample solution is evaluated directly, so each
// iteration is one interpolation-system build plus a sweep of estimates.
inline GreedyResult greedy_sample_closed_form(const CaseDefinition& c, const CandidateSet& cand,
                                              const std::vector<ParamVec>& s_init,
                                              const std::vector<ParamVec>& train,
                                              const GreedyConfig& cfg) {
  if (!c.has_analytic_solution)
    throw MissingSystem("greedy_sample_closed_form: case has no closed-form solution");
  const std::size_t nq = cand.size();

  auto sweep = [&](const std::vector<ParamVec>& sample) {
    const std::size_t n = sample.size();
    DenseMatrix u(n, nq);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t q = 0; q < nq; ++q) u(i, q) = c.analytic_u(cand.x[q], sample[i]);
    const std::size_t m_req = detail::scaled_size(cfg.scheme.residual_mult, n);
    const std::size_t p_req =
        cfg.scheme.p_points < 0 ? n : static_cast<std::size_t>(cfg.scheme.p_points);
    const BuiltTarget bt =
        build_interp_target(c, "g", 0, cfg.scheme.residual_order, u, sample, cand.w, m_req,
                            p_req, cfg.scheme.max_snapshot_rows);
    Vector est(train.size(), 0.0);
    Vector t(bt.m + bt.p);
    for (std::size_t i = 0; i < train.size(); ++i) {
      const ParamVec& mu = train[i];
      for (std::size_t k = 0; k < t.size(); ++k) {
        const double uu = c.analytic_u(cand.x[bt.sys.points[k]], mu);
        t[k] = eval_nonlinear(c, "g", 0, {0, 0}, uu, mu);
      }
      est[i] = bt.p > 0 ? interp_with_estimate(bt.sys, bt.m, bt.p, t).estimate
                        : std::numeric_limits<double>::infinity();
    }
    return est;
  };
  return detail::greedy_loop(s_init, train, cfg, sweep);
}

// Finite element driver: full offline rebuild on the current sample per
// iteration (solves come from the cache after their first computation), then
// one online solve and estimate per training point.
inline GreedyResult greedy_sample(const FESpace& s, const CaseDefinition& c,
                                  const AffineOperators& af,
                                  const std::vector<ParamVec>& s_init,
                                  const std::vector<ParamVec>& train, const GreedyConfig& cfg,
                                  SnapshotCache* cache = nullptr) {
  auto sweep = [&](const std::vector<ParamVec>& sample) {
    const SnapshotSet snaps = compute_snapshots(s, c, af, sample, cache);
    const RBSpace rb = build_rb_space(s, snaps.fields);
    const RomOperators ops = build_rom_operators(s, c, af, snaps, rb, cfg.scheme);
    bool estimable = false;
    for (const TargetSystem& ts : ops.residual) estimable = estimable || ts.p > 0;
    if (!estimable) {
      // Tiny samples can leave a family whose rank is eaten entirely by the
      // interpolation functions.  Nothing to estimate with yet, so mark every
      // point maximally uncertain and let the enrichment proceed.
      return Vector(train.size(), std::numeric_limits<double>::infinity());
    }
    Vector est(train.size(), 0.0);
    for (std::size_t i = 0; i < train.size(); ++i) {
      try {
        const RomSolution sol = ops.gnh ? online_gnh(ops, c, train[i])
                                        : online_hgn(ops, c, train[i]);
        est[i] = rom_error_estimate(ops, c, train[i], sol.alpha);
      } catch (const NewtonDiverged& e) {
        char buf[64];
        std::string msg = std::string("greedy: ") + e.what() + " at mu = (";
        for (std::size_t p = 0; p < train[i].size(); ++p) {
          std::snprintf(buf, sizeof(buf), "%s%.6g", p > 0 ? ", " : "", train[i][p]);
          msg += buf;
        }
        throw NewtonDiverged(msg + ")");
      }
    }
    return est;
  };
  return detail::greedy_loop(s_init, train, cfg, sweep);
}

}  // namespace hyperrom
