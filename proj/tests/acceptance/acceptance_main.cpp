// SPDX-License-Identifier: Apache-2.0

// Acceptance harness: one PASS/FAIL line per shipped guarantee, each with its
// measured wall time checked against that guarantee's budget.  Related
// criteria share fixtures; construction cost is charged to the criterion that
// triggers the build, so criteria that reuse a fixture report only their own
// work.  Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hyperrom/bench/bench.hpp"
#include "hyperrom/cases.hpp"
#include "hyperrom/fem/fom.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/greedy/greedy.hpp"
#include "hyperrom/interp/eim.hpp"
#include "hyperrom/rb/snapshots.hpp"
#include "hyperrom/rb/space.hpp"
#include "hyperrom/rom/build.hpp"
#include "hyperrom/rom/online.hpp"

using namespace hyperrom;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Check {
  bool pass = true;
  std::vector<std::string> fails;
  std::vector<std::string> infos;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      fails.push_back(what);
    }
  }
  void info(const std::string& what) { infos.push_back(what); }
};

struct Outcome {
  int id = 0;
  std::string name;
  double budget = 0.0;  // seconds; 0 means the criterion carries no time bound
  Check ck;
  double seconds = 0.0;
};

// every interpolation system built by the harness lands here for the
// structural sweep of criterion 4
struct SystemRecord {
  std::string label;
  EIMSystem sys;
  std::size_t m = 0, p = 0;
};

struct Fixtures {
  std::unique_ptr<StudyResult> study;  // 1d study, 19-point sample
  std::unique_ptr<BenchContext> ell, cdr;
  SnapshotCache cache_ell, cache_cdr;
  std::vector<SystemRecord> systems;
  bool full_scale = false;
};

void record_systems(Fixtures& fx, const RomOperators& ops, const std::string& label) {
  for (const TargetSystem& ts : ops.residual)
    fx.systems.push_back({label + " residual " + ts.tag, ts.sys, ts.m, ts.p});
  for (const TargetSystem& ts : ops.jacobian)
    fx.systems.push_back({label + " jacobian " + ts.tag, ts.sys, ts.m, ts.p});
}

// smooth seeded test families; the row-indexed bump keeps any requested
// number of rows linearly independent
DenseMatrix smooth_family(std::size_t n_modes, std::size_t n_points, std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> freq(1.0, 8.0), phase(0.0, 6.28);
  DenseMatrix m(n_modes, n_points);
  for (std::size_t r = 0; r < n_modes; ++r) {
    const double a = gauss(rng), b = gauss(rng), w = freq(rng), t = phase(rng);
    const double center = (static_cast<double>(r) + 0.5) / static_cast<double>(n_modes);
    for (std::size_t q = 0; q < n_points; ++q) {
      const double x = static_cast<double>(q) / static_cast<double>(n_points - 1);
      m(r, q) = a * std::sin(w * x + t) + b * std::cos((w + 2.0) * x) +
                2.0 * std::exp(-std::pow((x - center) / 0.08, 2));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// 1. greedy parameter selection on the closed-form 1d case

void criterion_greedy_points(Check& ck) {
  const CaseDefinition c = get_case("analytic1d");
  const CandidateSet cand = uniform_candidates_1d(c.domain_lo[0], c.domain_hi[0], 1000);
  std::vector<ParamVec> train;
  for (std::size_t j = 0; j < 100; ++j) train.push_back({10.0 * double(j) / 99.0});

  GreedyConfig g;
  g.scheme.residual_order = 2;
  g.scheme.residual_mult = 6.0;
  g.scheme.p_points = -1;
  g.tol = 1e-3;
  g.n_max = 25;
  const GreedyResult res =
      greedy_sample_closed_form(c, cand, {{0.0}, {5.0}, {10.0}}, train, g);

  // reference selections for this configuration, on the j*10/99 training grid
  const double expected[16] = {0.4040, 0.9091, 6.5657, 3.0303, 1.6162, 7.9798,
                               2.1212, 3.9394, 0.2020, 1.2121, 0.6061, 2.4242,
                               8.9899, 5.6566, 3.4343, 4.3434};
  const double half = 0.5 * 10.0 / 99.0;

  ck.require(res.history.size() >= 2, "greedy made fewer than two selections");
  if (res.history.size() >= 2) {
    const double s0 = res.history[0].selected_mu[0];
    const double s1 = res.history[1].selected_mu[0];
    ck.require(std::abs(s0 - expected[0]) <= half,
               fmt("first selection %.4f, expected %.4f", s0, expected[0]));
    ck.require(std::abs(s1 - expected[1]) <= half,
               fmt("second selection %.4f, expected %.4f", s1, expected[1]));
  }
  int matched = 0;
  for (double e : expected) {
    for (const ParamVec& mu : res.sample)
      if (std::abs(mu[0] - e) <= half) {
        ++matched;
        break;
      }
  }
  ck.require(matched >= 12, fmt("only %d of 16 expected points matched", matched));
  const std::size_t n_final = res.sample.size();
  ck.require(n_final >= 16 && n_final <= 22,
             fmt("terminal sample size %zu outside [16, 22]", n_final));
  ck.info(fmt("terminal N=%zu, matched %d/16 expected points, converged=%d", n_final,
              matched, int(res.converged)));
}

// ---------------------------------------------------------------------------
// 2. estimator magnitudes of the 1d study at N=19

void criterion_estimator_magnitudes(Fixtures& fx, Check& ck) {
  StudyOptions o;
  o.tol = 0.0;  // enrich to exactly 19 so the tabulated row exists
  o.n_max = 19;
  o.n_rows = {19};
  fx.study = std::make_unique<StudyResult>(run_interp_study(o));
  const StudyResult& st = *fx.study;

  ck.require(st.greedy.sample.size() == 19,
             fmt("study sample holds %zu points, wanted 19", st.greedy.sample.size()));
  ck.require(st.eim.size() == 1 && st.foeim.size() == 3 && st.soeim.size() == 3,
             "study row counts off");
  if (st.foeim.size() < 3 || st.soeim.size() < 3) return;

  const InterpStudyRow& f3 = st.foeim[2];  // multiplier 3
  const InterpStudyRow& s6 = st.soeim[2];  // multiplier 6
  ck.require(f3.m == 57, fmt("first-order row built with m=%zu, wanted 57", f3.m));
  ck.require(s6.m == 114, fmt("second-order row built with m=%zu, wanted 114", s6.m));

  const double f_ref = 7.23e-3, s_ref = 2.74e-5;
  ck.require(f3.mean_est >= f_ref / 3.0 && f3.mean_est <= f_ref * 3.0,
             fmt("first-order mean estimate %.3e outside factor-3 band around %.2e",
                 f3.mean_est, f_ref));
  ck.require(s6.mean_est >= s_ref / 5.0 && s6.mean_est <= s_ref * 5.0,
             fmt("second-order mean estimate %.3e outside factor-5 band around %.2e",
                 s6.mean_est, s_ref));
  for (const auto* rows : {&st.foeim, &st.soeim})
    for (const InterpStudyRow& r : *rows)
      ck.require(r.mean_eff > 0.2 && r.mean_eff < 10.0,
                 fmt("order-%d m=%zu mean effectivity %.3f outside (0.2, 10)", r.order,
                     r.m, r.mean_eff));
  ck.info(fmt("first-order m=57 mean estimate %.3e, second-order m=114 mean estimate %.3e",
              f3.mean_est, s6.mean_est));
  double lo = 1e300, hi = 0.0;
  for (const auto* rows : {&st.foeim, &st.soeim})
    for (const InterpStudyRow& r : *rows) {
      lo = std::min(lo, r.mean_eff);
      hi = std::max(hi, r.mean_eff);
    }
  ck.info(fmt("mean effectivities span [%.2f, %.2f] across the six rows", lo, hi));
}

// ---------------------------------------------------------------------------
// 3. error ordering across the three interpolation variants at N=19

void criterion_method_ordering(Fixtures& fx, Check& ck) {
  if (!fx.study) {
    ck.require(false, "study fixture unavailable");
    return;
  }
  const StudyResult& st = *fx.study;
  if (st.eim.empty() || st.foeim.size() < 3 || st.soeim.size() < 3) {
    ck.require(false, "study rows missing");
    return;
  }
  const double e0 = st.eim[0].mean_true;    // plain, m = N
  const double e1 = st.foeim[2].mean_true;  // first order, m = 3N
  const double e2 = st.soeim[2].mean_true;  // second order, m = 6N
  ck.require(e1 > 0.0 && e2 > 0.0, "degenerate zero mean error");
  ck.require(e0 >= 10.0 * e1,
             fmt("plain/first-order ratio %.1f below one order of magnitude", e0 / e1));
  ck.require(e1 >= 10.0 * e2,
             fmt("first/second-order ratio %.1f below one order of magnitude", e1 / e2));
  ck.info(fmt("mean errors: plain %.3e, first order %.3e, second order %.3e", e0, e1, e2));
}

// ---------------------------------------------------------------------------
// 5. spare-point estimate is exact for targets inside the extended span

void criterion_estimator_exact(Fixtures& fx, Check& ck) {
  // worked system where two functions share a peak, so the coefficient-sum
  // bound is attained: psi_1 = [1,1,0], psi_2 = [0,1,0], target = psi_1+psi_2
  {
    DenseMatrix modes(2, 3);
    modes(0, 0) = 1.0;
    modes(0, 1) = 1.0;
    modes(1, 1) = 1.0;
    const EIMSystem sys = eim_select(modes, 2);
    Vector tgrid(3);
    for (std::size_t q = 0; q < 3; ++q) tgrid[q] = sys.psi(0, q) + sys.psi(1, q);
    Vector t(2);
    for (std::size_t k = 0; k < 2; ++k) t[k] = tgrid[sys.points[k]];
    const InterpEval ev = interp_with_estimate(sys, 0, 2, t);
    double sup = 0.0;
    for (double v : tgrid) sup = std::max(sup, std::abs(v));
    ck.require(std::abs(ev.estimate - 2.0) < 1e-14,
               fmt("worked example estimate %.15f, wanted 2", ev.estimate));
    ck.require(std::abs(ev.estimate - sup) < 1e-14,
               "worked example estimate does not equal the true sup error");
  }

  // randomized constructions: interpolated part plus a single spare function,
  // where the coefficient sum provably equals the sup of the deflected
  // residual because every function has unit sup norm on the candidate grid
  std::mt19937 rng(2024);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t nq = 60 + rng() % 180;
    const std::size_t n_modes = 8 + rng() % 11;
    const std::size_t n_fun = 3 + rng() % 8;
    const DenseMatrix modes = smooth_family(n_modes, nq, rng);
    const EIMSystem sys = eim_select(modes, n_fun);
    const std::size_t m = 1 + rng() % (n_fun - 1);
    const std::size_t p = n_fun - m;
    const std::size_t spare = rng() % p;
    const double c = (unif(rng) < 0.5 ? -1.0 : 1.0) * (0.5 + 1.5 * unif(rng));

    Vector tgrid(nq, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double coef = gauss(rng);
      for (std::size_t q = 0; q < nq; ++q) tgrid[q] += coef * sys.psi(j, q);
    }
    for (std::size_t q = 0; q < nq; ++q) tgrid[q] += c * sys.psi(m + spare, q);

    Vector t(m + p);
    for (std::size_t k = 0; k < m + p; ++k) t[k] = tgrid[sys.points[k]];
    const InterpEval ev = interp_with_estimate(sys, m, p, t);
    const double truth = sup_diff(interpolant_values(sys, m, ev.beta), tgrid);
    const double gap = std::abs(ev.estimate - truth);
    worst = std::max(worst, gap);
    ck.require(gap <= 1e-10, fmt("trial %d: estimate %.12e vs true error %.12e", trial,
                                 ev.estimate, truth));
    ck.require(truth > 0.4, fmt("trial %d degenerate: true error %.3e", trial, truth));
    ck.require(std::abs(ev.estimate - std::abs(c)) <= 1e-10,
               fmt("trial %d: estimate %.12e vs spare coefficient %.12e", trial,
                   ev.estimate, std::abs(c)));
    if (trial < 10)
      fx.systems.push_back({fmt("estimator trial %d", trial), sys, m, p});
  }
  ck.info(fmt("50 randomized in-span targets, worst |estimate - true| = %.2e", worst));
}

// ---------------------------------------------------------------------------
// 6. pod spectrum, orthonormality, reconstruction

void criterion_pod(Check& ck) {
  std::mt19937 rng(7);
  const std::size_t k = 30, nq = 400;
  const CandidateSet grid = uniform_candidates_1d(0.0, 1.0, nq);
  const DenseMatrix snaps = smooth_family(k, nq, rng);

  for (PodRoute route : {PodRoute::gram_snapshots, PodRoute::gram_points}) {
    const char* rn = route == PodRoute::gram_snapshots ? "snapshot gram" : "point gram";
    const PODResult pod = pod_compress(snaps, grid.w, 0, route);
    ck.require(pod.rank == k, fmt("%s: rank %zu, wanted %zu", rn, pod.rank, k));
    if (pod.modes.rows() != k) continue;

    for (std::size_t i = 0; i + 1 < pod.lambda.size(); ++i)
      ck.require(pod.lambda[i + 1] <= pod.lambda[i] * (1.0 + 1e-12),
                 fmt("%s: eigenvalues not descending at %zu", rn, i));

    // rows carry sqrt(lambda) phi; strip the amplitude before the checks
    DenseMatrix phi(k, nq);
    for (std::size_t i = 0; i < k; ++i) {
      const double a = std::sqrt(pod.lambda[i]);
      for (std::size_t q = 0; q < nq; ++q) phi(i, q) = pod.modes(i, q) / a;
    }
    double worst_ortho = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) {
        double g = 0.0;
        for (std::size_t q = 0; q < nq; ++q) g += grid.w[q] * phi(i, q) * phi(j, q);
        worst_ortho = std::max(worst_ortho, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    ck.require(worst_ortho <= 1e-9,
               fmt("%s: orthonormality defect %.2e above 1e-9", rn, worst_ortho));

    double err2 = 0.0, tot2 = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
      Vector rec(nq, 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        double coef = 0.0;
        for (std::size_t q = 0; q < nq; ++q) coef += grid.w[q] * phi(j, q) * snaps(s, q);
        for (std::size_t q = 0; q < nq; ++q) rec[q] += coef * phi(j, q);
      }
      for (std::size_t q = 0; q < nq; ++q) {
        const double d = rec[q] - snaps(s, q);
        err2 += grid.w[q] * d * d;
        tot2 += grid.w[q] * snaps(s, q) * snaps(s, q);
      }
    }
    const double rel = std::sqrt(err2 / tot2);
    ck.require(rel <= 1e-8, fmt("%s: full-rank reconstruction error %.2e above 1e-8", rn, rel));
    ck.info(fmt("%s: reconstruction %.2e, orthonormality %.2e", rn, rel, worst_ortho));
  }
}

// ---------------------------------------------------------------------------
// 7. full-order solver verification

double sinsin(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); }

double l2_error_vs(const FESpace& s, const Vector& nodal, double (*fn)(double, double)) {
  const QuadratureTrace t = trace_at_quadrature(s, nodal);
  double acc = 0.0;
  for (std::size_t q = 0; q < s.n_qp_global; ++q) {
    const double d = t.value[q] - fn(s.qp_x[q], s.qp_y[q]);
    acc += s.qp_w[q] * d * d;
  }
  return std::sqrt(acc);
}

void criterion_fom(Check& ck) {
  CaseDefinition ms;
  ms.name = "poisson_ms";
  ms.dim = 2;
  ms.n_param = 0;
  ms.theta.push_back([](const ParamVec&) { return 1.0; });
  ms.load = [](double x, double y) {
    return 2.0 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y);
  };

  for (int p = 1; p <= 2; ++p) {
    std::vector<double> errs;
    for (std::size_t cells : {4ul, 8ul, 16ul}) {
      const FESpace s = build_fe_space(2, cells, cells, p, p + 2);
      const AffineOperators ops = assemble_affine(s, ms);
      const FOMSolution sol = fom_newton_solve(s, ms, ops, {});
      ck.require(sol.converged, fmt("p=%d cells=%zu: solve did not converge", p, cells));
      errs.push_back(l2_error_vs(s, sol.u, sinsin));
    }
    const double r1 = std::log2(errs[0] / errs[1]);
    const double r2 = std::log2(errs[1] / errs[2]);
    ck.require(r1 > p + 1 - 0.35, fmt("p=%d: coarse rate %.2f below %.2f", p, r1, p + 1 - 0.35));
    ck.require(r2 > p + 1 - 0.25, fmt("p=%d: fine rate %.2f below %.2f", p, r2, p + 1 - 0.25));
    ck.require(r2 < p + 1 + 0.35, fmt("p=%d: fine rate %.2f above %.2f", p, r2, p + 1 + 0.35));
    ck.info(fmt("p=%d rates %.2f %.2f", p, r1, r2));
  }

  {
    const FESpace s = build_fe_space(2, 4, 4, 1, 3);
    const CaseDefinition c = get_case("cdr2d");
    const AffineOperators ops = assemble_affine(s, c);
    const ParamVec mu{3.0, 7.0};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    Vector u_int(s.n_interior());
    for (auto& v : u_int) v = dist(rng);
    const Vector u_full = s.scatter_interior(u_int);
    Vector dir(s.n_interior());
    for (auto& v : dir) v = dist(rng);

    const BandMatrix j = detail::fom_jacobian(s, c, ops, mu, u_full);
    const Vector jv = j.multiply(dir);
    auto fd_error = [&](double eps) {
      Vector up = u_int, um = u_int;
      for (std::size_t i = 0; i < dir.size(); ++i) {
        up[i] += eps * dir[i];
        um[i] -= eps * dir[i];
      }
      const Vector rp = detail::fom_residual(s, c, ops, mu, s.scatter_interior(up), up);
      const Vector rm = detail::fom_residual(s, c, ops, mu, s.scatter_interior(um), um);
      double w = 0.0;
      for (std::size_t i = 0; i < dir.size(); ++i)
        w = std::max(w, std::abs((rp[i] - rm[i]) / (2.0 * eps) - jv[i]));
      return w;
    };
    const double e3 = fd_error(1e-3), e4 = fd_error(1e-4);
    ck.require(e3 < 1e-3, fmt("finite-difference defect %.2e at eps=1e-3", e3));
    const double ratio = e3 / e4;
    ck.require(ratio > 30.0 && ratio < 300.0,
               fmt("finite-difference decay ratio %.1f outside (30, 300)", ratio));
    ck.info(fmt("jacobian finite-difference decay ratio %.0f", ratio));
  }

  {
    const FESpace s = build_fe_space(2, 8, 8, 2, 4);
    const CaseDefinition c = get_case("elliptic2d");
    const AffineOperators ops = assemble_affine(s, c);
    const FOMSolution sol = fom_newton_solve(s, c, ops, {4.0, 5.0});
    ck.require(sol.converged && sol.iterations <= 12,
               fmt("newton: converged=%d iterations=%d", int(sol.converged), sol.iterations));
    bool quadratic = false;
    for (std::size_t i = 0; i + 1 < sol.step_norms.size(); ++i) {
      const double a = sol.step_norms[i], b = sol.step_norms[i + 1];
      if (a < 1e-2 && a > 1e-8) {
        ck.require(b < 0.05 * a, fmt("newton step %zu contracted only %.2f", i, b / a));
        if (b < 1e4 * a * a) quadratic = true;
      }
    }
    ck.require(quadratic, "no quadratic contraction pair observed");
    ck.info(fmt("newton iterations %d", sol.iterations));
  }
}

// ---------------------------------------------------------------------------
// 9. hyperreduction effectivity structure on both 2d cases

void criterion_effectivity(Fixtures& fx, Check& ck) {
  BenchOptions oe;
  oe.case_name = "elliptic2d";
  oe.n_values = {8, 12};
  oe.cache = &fx.cache_ell;
  if (fx.full_scale) {
    oe.nx = oe.ny = 32;
    oe.degree = 3;
    oe.test_per_dim = 30;
  }
  fx.ell = std::make_unique<BenchContext>(make_bench_context(oe));

  BenchOptions oc = oe;
  oc.case_name = "cdr2d";
  oc.cache = &fx.cache_cdr;
  fx.cdr = std::make_unique<BenchContext>(make_bench_context(oc));

  auto run_case = [&](const BenchContext& ctx, SnapshotCache* cache, bool check_output) {
    for (std::size_t n : {std::size_t(8), std::size_t(12)}) {
      const std::vector<ParamVec> sample(ctx.greedy.sample.begin(),
                                         ctx.greedy.sample.begin() + n);
      const detail::BuiltRom gn = detail::build_for_scheme(ctx, sample, "GN", cache);
      const ErrorReport gn_rep =
          evaluate_errors(ctx.s, ctx.c, gn.rb, detail::solver_for(ctx, gn, "GN"), ctx.test,
                          ctx.reference, "GN");

      const detail::BuiltRom hh = detail::build_for_scheme(ctx, sample, "GN-SOEIM", cache);
      const ErrorReport hh_rep =
          evaluate_errors(ctx.s, ctx.c, hh.rb, detail::solver_for(ctx, hh, "GN-SOEIM"),
                          ctx.test, ctx.reference, "GN-SOEIM");
      const EffectivityReport hh_eff = evaluate_effectivities(hh_rep, gn_rep);
      record_systems(fx, hh.ops, fmt("%s n=%zu gn-soeim", ctx.c.name.c_str(), n));
      ck.require(hh_eff.mean_u >= 0.9 && hh_eff.mean_u <= 1.5,
                 fmt("%s n=%zu: gn-soeim solution effectivity %.3f outside [0.9, 1.5]",
                     ctx.c.name.c_str(), n, hh_eff.mean_u));
      ck.info(fmt("%s n=%zu: gn-soeim eta_u %.3f (%zu of %zu points excluded)",
                  ctx.c.name.c_str(), n, hh_eff.mean_u, hh_eff.excluded_u,
                  ctx.test.size()));

      if (check_output) {
        const detail::BuiltRom e0 = detail::build_for_scheme(ctx, sample, "EIM-GN", cache);
        const ErrorReport e0_rep =
            evaluate_errors(ctx.s, ctx.c, e0.rb, detail::solver_for(ctx, e0, "EIM-GN"),
                            ctx.test, ctx.reference, "EIM-GN");
        const EffectivityReport e0_eff = evaluate_effectivities(e0_rep, gn_rep);
        record_systems(fx, e0.ops, fmt("%s n=%zu eim-gn", ctx.c.name.c_str(), n));
        ck.require(e0_eff.mean_u > 0.0 && e0_eff.mean_s / e0_eff.mean_u > 10.0,
                   fmt("%s n=%zu: eim-gn output/solution effectivity ratio %.1f not above 10",
                       ctx.c.name.c_str(), n, e0_eff.mean_s / e0_eff.mean_u));
        ck.info(fmt("%s n=%zu: eim-gn eta_s %.1f / eta_u %.2f = %.1f", ctx.c.name.c_str(),
                    n, e0_eff.mean_s, e0_eff.mean_u, e0_eff.mean_s / e0_eff.mean_u));
      }
    }
  };
  run_case(*fx.ell, &fx.cache_ell, true);
  run_case(*fx.cdr, &fx.cache_cdr, false);
}

// ---------------------------------------------------------------------------
// 8. all rom variants agree with the full solve at sampled parameters

void criterion_rom_consistency(Fixtures& fx, Check& ck) {
  if (!fx.ell) {
    ck.require(false, "elliptic context unavailable");
    return;
  }
  const BenchContext& ctx = *fx.ell;
  const std::vector<ParamVec> s8(ctx.greedy.sample.begin(), ctx.greedy.sample.begin() + 8);
  const SnapshotSet snaps = compute_snapshots(ctx.s, ctx.c, ctx.af, s8, &fx.cache_ell);
  const RBSpace rb = build_rb_space(ctx.s, snaps.fields);

  const RomOperators ops_gn =
      build_rom_operators(ctx.s, ctx.c, ctx.af, snaps, rb, scheme_by_name("GN"));
  SchemeConfig hgn = scheme_by_name("SOEIM-GN");
  hgn.full_rank_residual = true;
  const RomOperators ops_hgn = build_rom_operators(ctx.s, ctx.c, ctx.af, snaps, rb, hgn);
  SchemeConfig gnh = scheme_by_name("GN-SOEIM");
  gnh.full_rank_residual = true;
  const RomOperators ops_gnh = build_rom_operators(ctx.s, ctx.c, ctx.af, snaps, rb, gnh);
  record_systems(fx, ops_hgn, "elliptic2d n=8 full-rank pre-linearization");
  record_systems(fx, ops_gnh, "elliptic2d n=8 full-rank per-linearization");

  double worst[3] = {0.0, 0.0, 0.0};
  for (const ParamVec& mu : s8) {
    const Vector u = compute_snapshot(ctx.s, ctx.c, ctx.af, mu, &fx.cache_ell);
    Vector a_fom(rb.n());
    for (std::size_t j = 0; j < rb.n(); ++j) a_fom[j] = x_inner_product(ctx.s, u, rb.basis[j]);
    auto dev = [&](const Vector& alpha) {
      Vector d = alpha;
      for (std::size_t j = 0; j < d.size(); ++j) d[j] -= a_fom[j];
      return x_norm(ctx.s, rb.lift(d));
    };
    worst[0] = std::max(worst[0], dev(online_gn_reference(ctx.s, ctx.c, ctx.af, rb, ops_gn, mu).alpha));
    worst[1] = std::max(worst[1], dev(online_hgn(ops_hgn, ctx.c, mu).alpha));
    worst[2] = std::max(worst[2], dev(online_gnh(ops_gnh, ctx.c, mu).alpha));
  }
  const char* names[3] = {"reference", "pre-linearization", "per-linearization"};
  for (int k = 0; k < 3; ++k)
    ck.require(worst[k] <= 1e-7,
               fmt("%s solver deviates %.2e from the full coordinates", names[k], worst[k]));
  ck.info(fmt("worst deviation: reference %.1e, pre %.1e, per %.1e", worst[0], worst[1],
              worst[2]));
}

// ---------------------------------------------------------------------------
// 11. greedy hierarchy and selection provenance on the 2d run

void criterion_greedy_hierarchy(Fixtures& fx, Check& ck) {
  if (!fx.ell) {
    ck.require(false, "elliptic context unavailable");
    return;
  }
  const BenchContext& ctx = *fx.ell;
  const GreedyResult& g = ctx.greedy;
  ck.require(g.sample.size() == 12, fmt("sample size %zu, wanted 12", g.sample.size()));
  ck.require(g.history.size() + 4 == g.sample.size(),
             fmt("history holds %zu iterations for %zu selections", g.history.size(),
                 g.sample.size() - 4));

  for (std::size_t k = 0; k < g.history.size(); ++k) {
    const GreedyIteration& it = g.history[k];
    ck.require(it.n == 4 + k, fmt("iteration %zu ran at sample size %zu", k, it.n));
    if (4 + k < g.sample.size())
      ck.require(g.sample[4 + k] == it.selected_mu,
                 fmt("iteration %zu: selection not appended in order", k));
    ck.require(it.estimates.size() == ctx.train.size(),
               fmt("iteration %zu: sweep covered %zu of %zu points", k, it.estimates.size(),
                   ctx.train.size()));
    ck.require(it.selected < ctx.train.size() && ctx.train[it.selected] == it.selected_mu,
               fmt("iteration %zu: selected index does not name its parameter", k));
    ck.require(it.estimates[it.selected] == it.max_estimate,
               fmt("iteration %zu: logged maximum differs from the sweep", k));
    for (std::size_t j = 0; j < it.estimates.size(); ++j) {
      const bool ok = j < it.selected ? it.estimates[j] < it.max_estimate
                                      : it.estimates[j] <= it.max_estimate;
      if (!ok) {
        ck.require(false, fmt("iteration %zu: index %zu beats the recorded argmax", k, j));
        break;
      }
    }
  }
  double run_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.history.size(); ++k) {
    run_min = std::min(run_min, g.history[k].max_estimate);
    double later_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j <= k; ++j)
      later_min = std::min(later_min, g.history[j].max_estimate);
    ck.require(later_min <= run_min * (1.0 + 1e-15), "running minimum increased");
  }

  // a shorter run over the same training grid must reproduce the prefix
  GreedyConfig gc;
  gc.tol = 0.0;
  gc.n_max = 8;
  const std::vector<ParamVec> init(g.sample.begin(), g.sample.begin() + 4);
  const GreedyResult r8 =
      greedy_sample(ctx.s, ctx.c, ctx.af, init, ctx.train, gc, &fx.cache_ell);
  ck.require(r8.sample.size() == 8, fmt("short run reached %zu points", r8.sample.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(8, r8.sample.size()); ++i)
    ck.require(r8.sample[i] == g.sample[i], fmt("short run diverges at position %zu", i));
  ck.info(fmt("%zu iterations checked, prefix of 8 reproduced, final estimate %.3e",
              g.history.size(), g.history.back().max_estimate));
}

// ---------------------------------------------------------------------------
// 10. online cost independent of mesh size, speedup over the full solve

void criterion_speedup(Fixtures& fx, Check& ck) {
  if (!fx.ell) {
    ck.require(false, "elliptic context unavailable");
    return;
  }
  const CaseDefinition c = fx.ell->c;
  const std::vector<ParamVec> sample(fx.ell->greedy.sample.begin(),
                                     fx.ell->greedy.sample.begin() + 10);
  const std::vector<ParamVec> test(fx.ell->test.begin(), fx.ell->test.begin() + 3);

  struct MeshRun {
    double per_iter = 0.0;
    SpeedupReport rep;
  };
  auto run_mesh = [&](int cells) {
    const FESpace s = build_fe_space(2, cells, cells, 3, 5);
    const AffineOperators af = assemble_affine(s, c);
    SnapshotCache cache;
    const SnapshotSet snaps = compute_snapshots(s, c, af, sample, &cache);
    const RBSpace rb = build_rb_space(s, snaps.fields);
    const RomOperators ops =
        build_rom_operators(s, c, af, snaps, rb, scheme_by_name("GN-SOEIM"));
    record_systems(fx, ops, fmt("elliptic2d %dx%d p3 gn-soeim", cells, cells));
    const OnlineSolver solve = [&](const ParamVec& mu) { return online_gnh(ops, c, mu); };
    MeshRun r;
    r.rep = measure_speedup(s, c, af, solve, test, 5, "GN-SOEIM", rb.n());
    Vector per;
    for (const SpeedupRow& row : r.rep.rows)
      per.push_back(row.t_rom / std::max(1, row.rom_iterations));
    r.per_iter = detail::median(per);
    return r;
  };
  const MeshRun coarse = run_mesh(16);
  const MeshRun fine = run_mesh(32);

  const double drift = std::abs(fine.per_iter - coarse.per_iter) / coarse.per_iter;
  ck.require(drift < 0.25,
             fmt("online per-iteration time drifts %.0f%% between meshes (%.2e vs %.2e)",
                 100.0 * drift, coarse.per_iter, fine.per_iter));
  ck.require(fine.rep.median_t_fom > 2.0 * coarse.rep.median_t_fom,
             fmt("full solve grew only %.2fx with mesh refinement",
                 fine.rep.median_t_fom / coarse.rep.median_t_fom));
  ck.require(fine.rep.median_speedup > 50.0,
             fmt("speedup %.0f on the fine mesh not above 50", fine.rep.median_speedup));
  ck.info(fmt("per-iteration %.2e -> %.2e s (drift %.0f%%), full solve %.3f -> %.3f s, "
              "speedup %.0f",
              coarse.per_iter, fine.per_iter, 100.0 * drift, coarse.rep.median_t_fom,
              fine.rep.median_t_fom, fine.rep.median_speedup));
}

// ---------------------------------------------------------------------------
// 4. structural sweep over every interpolation system the harness built

void criterion_system_structure(Fixtures& fx, Check& ck) {
  if (fx.study) {
    // add 1d systems at two sample sizes and all three taylor orders
    const CaseDefinition c = get_case("analytic1d");
    const CandidateSet cand = uniform_candidates_1d(c.domain_lo[0], c.domain_hi[0], 1000);
    for (std::size_t n : {std::size_t(10), std::size_t(19)}) {
      const std::vector<ParamVec> sample(fx.study->greedy.sample.begin(),
                                         fx.study->greedy.sample.begin() + n);
      DenseMatrix u(n, cand.size());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t q = 0; q < cand.size(); ++q)
          u(i, q) = c.analytic_u(cand.x[q], sample[i]);
      const struct {
        int order;
        double mult;
        std::size_t p;
      } kinds[3] = {{0, 1.0, 0}, {1, 3.0, n}, {2, 6.0, n}};
      for (const auto& kd : kinds) {
        const BuiltTarget bt =
            build_interp_target(c, "g", 0, kd.order, u, sample, cand.w,
                                static_cast<std::size_t>(kd.mult * double(n)), kd.p);
        fx.systems.push_back(
            {fmt("analytic1d n=%zu order-%d", n, kd.order), bt.sys, bt.m, bt.p});
      }
    }
  }
  ck.require(!fx.systems.empty(), "no interpolation systems were recorded");

  std::mt19937 rng(17);
  std::normal_distribution<double> gauss;
  double worst_span = 0.0;
  std::size_t checked = 0;
  for (const SystemRecord& rec : fx.systems) {
    const EIMSystem& sys = rec.sys;
    const std::size_t nf = sys.n_fun(), nq = sys.psi.cols();
    ++checked;

    for (std::size_t k = 0; k < nf; ++k)
      for (std::size_t j = 0; j < nf; ++j) {
        const double v = sys.b(k, j);
        if (j > k)
          ck.require(std::abs(v) <= 1e-12,
                     fmt("%s: entry (%zu,%zu) above the diagonal is %.2e",
                         rec.label.c_str(), k, j, v));
        else if (j == k)
          ck.require(std::abs(v - 1.0) <= 1e-12,
                     fmt("%s: diagonal entry %zu is %.15f", rec.label.c_str(), k, v));
        else
          ck.require(std::abs(v) <= 1.0 + 1e-12,
                     fmt("%s: entry (%zu,%zu) magnitude %.15f exceeds one",
                         rec.label.c_str(), k, j, v));
      }

    const std::set<std::size_t> uniq(sys.points.begin(), sys.points.end());
    ck.require(uniq.size() == nf, fmt("%s: interpolation points repeat", rec.label.c_str()));

    for (std::size_t j = 0; j < nf; ++j) {
      double sup = 0.0;
      for (std::size_t q = 0; q < nq; ++q) sup = std::max(sup, std::abs(sys.psi(j, q)));
      ck.require(std::abs(sup - 1.0) <= 1e-12,
                 fmt("%s: function %zu has sup norm %.15f", rec.label.c_str(), j, sup));
    }

    if (rec.m == 0) continue;
    for (int trial = 0; trial < 2; ++trial) {
      Vector tgrid(nq, 0.0);
      for (std::size_t j = 0; j < rec.m; ++j) {
        const double coef = gauss(rng);
        for (std::size_t q = 0; q < nq; ++q) tgrid[q] += coef * sys.psi(j, q);
      }
      Vector t(rec.m);
      for (std::size_t k = 0; k < rec.m; ++k) t[k] = tgrid[sys.points[k]];
      const Vector beta = interp_coefficients(sys, rec.m, t);
      const double err = sup_diff(interpolant_values(sys, rec.m, beta), tgrid);
      double scale = 0.0;
      for (double v : tgrid) scale = std::max(scale, std::abs(v));
      const double rel = err / std::max(scale, 1e-300);
      worst_span = std::max(worst_span, rel);
      ck.require(rel <= 1e-11, fmt("%s: in-span interpolation error %.2e relative",
                                   rec.label.c_str(), rel));
    }
  }
  ck.info(fmt("%zu systems checked, worst in-span error %.2e relative", checked, worst_span));
}

}  // namespace

int main(int argc, char** argv) {
  Fixtures fx;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--full-scale") == 0) fx.full_scale = true;

  std::vector<Outcome> results;
  auto run = [&](int id, const char* name, double budget, auto&& body) {
    Outcome o;
    o.id = id;
    o.name = name;
    o.budget = budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(o.ck);
    } catch (const std::exception& e) {
      o.ck.require(false, std::string("exception: ") + e.what());
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.budget > 0.0 && o.seconds > o.budget) {
      o.ck.pass = false;
      o.ck.fails.push_back(fmt("wall time %.1fs exceeds the %.0fs budget", o.seconds, o.budget));
    }
    std::printf("... %2d done in %.1fs\n", id, o.seconds);
    std::fflush(stdout);
    results.push_back(std::move(o));
  };

  // fixture-producing criteria run before their consumers; output is sorted
  run(1, "1d greedy selects the expected parameter points", 300, [&](Check& ck) {
    criterion_greedy_points(ck);
  });
  run(2, "estimator magnitudes of the 1d study at n=19", 600, [&](Check& ck) {
    criterion_estimator_magnitudes(fx, ck);
  });
  run(3, "interpolation error ordering across taylor orders", 0, [&](Check& ck) {
    criterion_method_ordering(fx, ck);
  });
  run(5, "spare-point estimate exact for in-span targets", 60, [&](Check& ck) {
    criterion_estimator_exact(fx, ck);
  });
  run(6, "pod spectrum, orthonormality, reconstruction", 60, [&](Check& ck) {
    criterion_pod(ck);
  });
  run(7, "full-order solver verification", 300, [&](Check& ck) { criterion_fom(ck); });
  run(9, "hyperreduction effectivity structure", 1200, [&](Check& ck) {
    criterion_effectivity(fx, ck);
  });
  run(8, "rom variants agree at sampled parameters", 300, [&](Check& ck) {
    criterion_rom_consistency(fx, ck);
  });
  run(11, "greedy hierarchy and selection provenance", 900, [&](Check& ck) {
    criterion_greedy_hierarchy(fx, ck);
  });
  run(10, "online cost independent of mesh size", 600, [&](Check& ck) {
    criterion_speedup(fx, ck);
  });
  run(4, "interpolation system structure and in-span exactness", 60, [&](Check& ck) {
    criterion_system_structure(fx, ck);
  });

  std::sort(results.begin(), results.end(),
            [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  int failed = 0;
  std::printf("\nacceptance suite: %zu criteria\n", results.size());
  for (const Outcome& o : results) {
    if (!o.ck.pass) ++failed;
    if (o.budget > 0.0)
      std::printf("[%s] %2d  %-52s %7.1fs (budget %.0fs)\n", o.ck.pass ? "PASS" : "FAIL",
                  o.id, o.name.c_str(), o.seconds, o.budget);
    else
      std::printf("[%s] %2d  %-52s %7.1fs\n", o.ck.pass ? "PASS" : "FAIL", o.id,
                  o.name.c_str(), o.seconds);
    for (const std::string& s : o.ck.infos) std::printf("           %s\n", s.c_str());
    for (const std::string& s : o.ck.fails) std::printf("     FAIL: %s\n", s.c_str());
  }
  std::printf("result: %zu/%zu passed\n", results.size() - std::size_t(failed),
              results.size());
  return failed;
}
