// SPDX-License-Identifier: Apache-2.0
//
// Error, effectivity, and speedup metrics plus the CSV table/series emitters.
// The drivers at the bottom reproduce the benchmark tables at whatever scale
// the options select; acceptance checks and the command line both go through
// them.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hyperrom/cases.hpp"
#include "hyperrom/errors.hpp"
#include "hyperrom/fem/fom.hpp"
#include "hyperrom/greedy/greedy.hpp"
#include "hyperrom/interp/eim.hpp"
#include "hyperrom/numerics/parallel.hpp"
#include "hyperrom/rb/snapshots.hpp"
#include "hyperrom/rb/space.hpp"
#include "hyperrom/rom/build.hpp"
#include "hyperrom/rom/online.hpp"

namespace hyperrom {

using OnlineSolver = std::function<RomSolution(const ParamVec&)>;

// ---------------------------------------------------------------------------
// error metrics

struct ErrorReport {
  std::string scheme;
  std::size_t n = 0;  // reduced basis size
  std::vector<ParamVec> mu;
  Vector err_u;  // X-norm solution error per point
  Vector err_s;  // absolute output error per point
  std::vector<int> iterations;
  double mean_u = 0.0, mean_s = 0.0;
};

inline ErrorReport evaluate_errors(const FESpace& s, const CaseDefinition& c, const RBSpace& rb,
                                   const OnlineSolver& solve, const std::vector<ParamVec>& test,
                                   const std::vector<FOMSolution>& reference,
                                   const std::string& scheme = "") {
  if (reference.size() != test.size())
    throw MissingReference("evaluate_errors: reference count differs from test set");
  for (const FOMSolution& r : reference)
    if (!r.converged) throw MissingReference("evaluate_errors: unconverged reference present");

  ErrorReport rep;
  rep.scheme = scheme;
  rep.n = rb.n();
  rep.mu = test;
  rep.err_u.reserve(test.size());
  rep.err_s.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const RomSolution sol = solve(test[i]);
    Vector diff = rb.lift(sol.alpha);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= reference[i].u[k];
    rep.err_u.push_back(x_norm(s, diff));
    rep.err_s.push_back(c.has_output ? std::abs(sol.output - reference[i].output) : 0.0);
    rep.iterations.push_back(sol.iterations);
  }
  if (!test.empty()) {
    double su = 0.0, ss = 0.0;
    for (double v : rep.err_u) su += v;
    for (double v : rep.err_s) ss += v;
    rep.mean_u = su / double(test.size());
    rep.mean_s = ss / double(test.size());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// effectivities against a reference method on the same test set

struct EffectivityReport {
  std::string scheme;
  std::size_t n = 0;
  std::vector<ParamVec> mu;
  Vector eta_u, eta_s;  // NaN marks an excluded point
  double mean_u = 0.0, mean_s = 0.0;
  std::size_t excluded_u = 0, excluded_s = 0;
};

inline EffectivityReport evaluate_effectivities(const ErrorReport& method,
                                                const ErrorReport& ref) {
  if (method.n != ref.n)
    throw MismatchedSets("evaluate_effectivities: basis sizes differ");
  if (method.mu.size() != ref.mu.size())
    throw MismatchedSets("evaluate_effectivities: test sets differ in size");
  for (std::size_t i = 0; i < method.mu.size(); ++i)
    if (!detail::same_param(method.mu[i], ref.mu[i]))
      throw MismatchedSets("evaluate_effectivities: test sets differ");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  EffectivityReport rep;
  rep.scheme = method.scheme;
  rep.n = method.n;
  rep.mu = method.mu;
  double su = 0.0, ss = 0.0;
  std::size_t cu = 0, cs = 0;
  for (std::size_t i = 0; i < method.mu.size(); ++i) {
    if (ref.err_u[i] < 1e-14) {
      rep.eta_u.push_back(nan);
      ++rep.excluded_u;
    } else {
      rep.eta_u.push_back(method.err_u[i] / ref.err_u[i]);
      su += rep.eta_u.back();
      ++cu;
    }
    if (ref.err_s[i] < 1e-14) {
      rep.eta_s.push_back(nan);
      ++rep.excluded_s;
    } else {
      rep.eta_s.push_back(method.err_s[i] / ref.err_s[i]);
      ss += rep.eta_s.back();
      ++cs;
    }
  }
  if (cu > 0) rep.mean_u = su / double(cu);
  if (cs > 0) rep.mean_s = ss / double(cs);
  return rep;
}

// ---------------------------------------------------------------------------
// timing

struct SpeedupRow {
  ParamVec mu;
  double t_fom = 0.0, t_rom = 0.0;  // median wall seconds
  double speedup = 0.0;
  int fom_iterations = 0, rom_iterations = 0;
};

struct SpeedupReport {
  std::string scheme;
  std::size_t n = 0;
  std::vector<SpeedupRow> rows;
  double median_t_fom = 0.0, median_t_rom = 0.0, median_speedup = 0.0;
};

namespace detail {

inline double median(Vector v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

template <class F>
double timed(const F& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Median-of-repetitions wall clock for the full solver against the online
// solver, one warm-up run each before timing starts.
inline SpeedupReport measure_speedup(const FESpace& s, const CaseDefinition& c,
                                     const AffineOperators& af, const OnlineSolver& solve,
                                     const std::vector<ParamVec>& sample, int repetitions = 3,
                                     const std::string& scheme = "", std::size_t n = 0) {
  repetitions = std::max(repetitions, 3);
  SpeedupReport rep;
  rep.scheme = scheme;
  rep.n = n;
  Vector all_fom, all_rom, all_speedup;
  for (const ParamVec& mu : sample) {
    SpeedupRow row;
    row.mu = mu;
    FOMSolution fom = fom_newton_solve(s, c, af, mu);
    RomSolution rom = solve(mu);
    row.fom_iterations = fom.iterations;
    row.rom_iterations = rom.iterations;
    Vector tf, tr;
    for (int r = 0; r < repetitions; ++r) {
      tf.push_back(detail::timed([&] { fom = fom_newton_solve(s, c, af, mu); }));
      tr.push_back(detail::timed([&] { rom = solve(mu); }));
    }
    row.t_fom = detail::median(tf);
    row.t_rom = detail::median(tr);
    row.speedup = row.t_rom > 0.0 ? row.t_fom / row.t_rom : 0.0;
    all_fom.push_back(row.t_fom);
    all_rom.push_back(row.t_rom);
    all_speedup.push_back(row.speedup);
    rep.rows.push_back(std::move(row));
  }
  rep.median_t_fom = detail::median(all_fom);
  rep.median_t_rom = detail::median(all_rom);
  rep.median_speedup = detail::median(all_speedup);
  return rep;
}

// ---------------------------------------------------------------------------
// interpolation study (closed-form case)

struct InterpStudyRow {
  std::size_t n = 0, m = 0, p = 0;
  int order = 0;
  Vector est, true_err;  // per test point; true error in the sup norm
  double max_true = 0.0, mean_true = 0.0, mean_est = 0.0, mean_eff = 0.0;
};

// Interpolation error and estimate sweep for one Taylor order over several
// size multipliers. One point selection at the largest size serves every
// smaller size through its prefix.
inline std::vector<InterpStudyRow> interp_study_rows(const CaseDefinition& c,
                                                     const CandidateSet& cand,
                                                     const std::vector<ParamVec>& sample,
                                                     const std::vector<ParamVec>& test,
                                                     int order,
                                                     const std::vector<double>& multipliers,
                                                     int p_points = -1) {
  if (!c.has_analytic_solution)
    throw MissingSystem("interp_study_rows: case has no closed-form solution");
  const std::size_t n = sample.size(), nq = cand.size();
  const std::size_t p_req = p_points < 0 ? n : static_cast<std::size_t>(p_points);

  DenseMatrix u(n, nq);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t q = 0; q < nq; ++q) u(i, q) = c.analytic_u(cand.x[q], sample[i]);

  double max_mult = 0.0;
  for (double m : multipliers) max_mult = std::max(max_mult, m);
  const BuiltTarget bt = build_interp_target(c, "g", 0, order, u, sample, cand.w,
                                             detail::scaled_size(max_mult, n), p_req);
  const std::size_t usable = bt.m + bt.p;

  std::vector<InterpStudyRow> out;
  for (double mult : multipliers) {
    InterpStudyRow row;
    row.n = n;
    row.order = order;
    const auto [m_i, p_i] = clamp_interp_sizes(usable, detail::scaled_size(mult, n), p_req);
    row.m = m_i;
    row.p = p_i;
    Vector t(m_i + p_i), gfull(nq);
    for (const ParamVec& mu : test) {
      for (std::size_t q = 0; q < nq; ++q)
        gfull[q] = eval_nonlinear(c, "g", 0, {0, 0}, c.analytic_u(cand.x[q], mu), mu);
      for (std::size_t k = 0; k < m_i + p_i; ++k) t[k] = gfull[bt.sys.points[k]];
      const InterpEval ev = interp_with_estimate(bt.sys, m_i, p_i, t);
      const Vector vals = interpolant_values(bt.sys, m_i, ev.beta);
      const double true_err = sup_diff(gfull, vals);
      row.est.push_back(p_i > 0 ? ev.estimate : std::numeric_limits<double>::quiet_NaN());
      row.true_err.push_back(true_err);
    }
    double st = 0.0, se = 0.0, sf = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      st += row.true_err[i];
      row.max_true = std::max(row.max_true, row.true_err[i]);
      if (p_i > 0) {
        se += row.est[i];
        sf += row.true_err[i] > 0.0 ? row.est[i] / row.true_err[i] : 1.0;
      }
    }
    if (!test.empty()) {
      row.mean_true = st / double(test.size());
      if (p_i > 0) {
        row.mean_est = se / double(test.size());
        row.mean_eff = sf / double(test.size());
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV tables

struct Table {
  std::string id;         // table number as a string
  std::string case_name;
  std::vector<std::string> comments;  // column documentation
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline std::string fmt_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string emit_table(const Table& t) {
  if (t.rows.empty()) throw IncompleteReport("emit_table: table " + t.id + " has no rows");
  std::string out;
  for (const std::string& cmt : t.comments) out += "# " + cmt + "\n";
  for (std::size_t j = 0; j < t.columns.size(); ++j)
    out += (j > 0 ? "," : "") + t.columns[j];
  out += "\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw IncompleteReport("emit_table: row width differs from header in table " + t.id);
    for (std::size_t j = 0; j < row.size(); ++j) out += (j > 0 ? "," : "") + row[j];
    out += "\n";
  }
  return out;
}

inline Table parse_table(const std::string& csv) {
  Table t;
  std::istringstream in(csv);
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header_done) {
      t.columns = std::move(cells);
      header_done = true;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  if (!header_done) throw ParseError("parse_table: no header line");
  return t;
}

inline std::string table_file_name(const Table& t) {
  return "table_" + t.id + "_" + t.case_name + ".csv";
}

inline void write_table(const Table& t, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + table_file_name(t);
  std::ofstream out(path);
  if (!out) throw IoError("write_table: cannot open " + path);
  out << emit_table(t);
}

inline void write_series(const std::string& path, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw MismatchedSets("write_series: column lengths differ");
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("write_series: cannot open " + path);
  for (std::size_t i = 0; i < x.size(); ++i)
    out << fmt_sig6(x[i]) << " " << fmt_sig6(y[i]) << "\n";
}

namespace detail {

// Aggregate from the rendered cells so the emitted value matches a recompute
// from the parsed file exactly.
inline std::string cell_mean(const std::vector<const std::vector<std::string>*>& rows,
                             std::size_t col) {
  double sum = 0.0;
  std::size_t cnt = 0;
  for (const auto* r : rows) {
    const double v = std::strtod((*r)[col].c_str(), nullptr);
    if (std::isnan(v)) continue;
    sum += v;
    ++cnt;
  }
  return cnt > 0 ? fmt_sig6(sum / double(cnt)) : "nan";
}

inline std::string cell_median(const std::vector<const std::vector<std::string>*>& rows,
                               std::size_t col) {
  Vector vals;
  for (const auto* r : rows) {
    const double v = std::strtod((*r)[col].c_str(), nullptr);
    if (!std::isnan(v)) vals.push_back(v);
  }
  return vals.empty() ? "nan" : fmt_sig6(median(std::move(vals)));
}

inline bool is_marker(const std::string& s) { return s == "mean" || s == "median"; }

}  // namespace detail

// Checks every aggregate row ("mean"/"median" markers in the per-point
// columns) against a fresh recomputation from its group's point rows.
inline bool verify_table_aggregates(const std::string& csv) {
  const Table t = parse_table(csv);
  for (const auto& row : t.rows) {
    std::size_t first_marker = row.size(), last_marker = row.size();
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (detail::is_marker(row[j])) {
        if (first_marker == row.size()) first_marker = j;
        last_marker = j;
      }
    }
    if (first_marker == row.size()) continue;  // point row
    const std::string& op = row[first_marker];
    std::vector<const std::vector<std::string>*> group;
    for (const auto& cand : t.rows) {
      bool match = !detail::is_marker(cand[first_marker]);
      for (std::size_t j = 0; match && j < first_marker; ++j) match = cand[j] == row[j];
      if (match) group.push_back(&cand);
    }
    if (group.empty()) return false;
    for (std::size_t j = last_marker + 1; j < row.size(); ++j) {
      const std::string want =
          op == "mean" ? detail::cell_mean(group, j) : detail::cell_median(group, j);
      if (want != row[j]) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// table builders

inline Table table_from_greedy(const GreedyResult& g, const std::string& case_name,
                               const std::string& id = "1") {
  Table t;
  t.id = id;
  t.case_name = case_name;
  const std::size_t np = g.history.empty() ? 1 : g.history.front().selected_mu.size();
  t.comments = {"greedy sampling record: one row per iteration",
                "columns: iteration, sample size N, selected parameter, max estimate"};
  t.columns = {"iteration", "N"};
  for (std::size_t p = 0; p < np; ++p) t.columns.push_back("mu" + std::to_string(p + 1));
  t.columns.push_back("max_estimate");
  for (std::size_t i = 0; i < g.history.size(); ++i) {
    const GreedyIteration& it = g.history[i];
    std::vector<std::string> row = {std::to_string(i + 1), std::to_string(it.n)};
    for (double m : it.selected_mu) row.push_back(fmt_sig6(m));
    row.push_back(fmt_sig6(it.max_estimate));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table table_from_interp_study(const std::vector<InterpStudyRow>& rows,
                                     const std::vector<ParamVec>& test,
                                     const std::string& case_name, const std::string& id) {
  Table t;
  t.id = id;
  t.case_name = case_name;
  t.comments = {"interpolation study: per-point rows plus a mean row per (N, M, P) group",
                "columns: sample size N, functions M, spare points P, parameter, error "
                "estimate, true sup-norm error, effectivity estimate/true"};
  t.columns = {"N", "M", "P", "mu", "estimate", "true_error", "effectivity"};
  for (const InterpStudyRow& r : rows) {
    std::vector<const std::vector<std::string>*> group;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double eff = r.p > 0 && r.true_err[i] > 0.0 ? r.est[i] / r.true_err[i]
                         : r.p > 0                      ? 1.0
                                  : std::numeric_limits<double>::quiet_NaN();
      t.rows.push_back({std::to_string(r.n), std::to_string(r.m), std::to_string(r.p),
                        fmt_sig6(test[i][0]), fmt_sig6(r.est[i]), fmt_sig6(r.true_err[i]),
                        fmt_sig6(eff)});
    }
    std::vector<std::string> mean = {std::to_string(r.n), std::to_string(r.m),
                                     std::to_string(r.p), "mean"};
    for (std::size_t i = t.rows.size() - test.size(); i < t.rows.size(); ++i)
      group.push_back(&t.rows[i]);
    for (std::size_t col = 4; col < t.columns.size(); ++col)
      mean.push_back(detail::cell_mean(group, col));
    t.rows.push_back(std::move(mean));
  }
  return t;
}

inline Table table_from_effectivities(
    const std::vector<std::pair<ErrorReport, EffectivityReport>>& blocks,
    const std::string& case_name, const std::string& id) {
  Table t;
  t.id = id;
  t.case_name = case_name;
  t.comments = {"per-point errors and effectivities vs the reference reduced solver,",
                "one block per (scheme, N); nan marks points excluded by the reference",
                "error floor; mean rows aggregate the non-excluded points",
                "columns: scheme, N, parameter, X-norm solution error, absolute output "
                "error, solution effectivity, output effectivity"};
  t.columns = {"scheme", "N", "mu1", "mu2", "err_u", "err_s", "eta_u", "eta_s"};
  for (const auto& [err, eff] : blocks) {
    const std::size_t start = t.rows.size();
    for (std::size_t i = 0; i < err.mu.size(); ++i)
      t.rows.push_back({err.scheme, std::to_string(err.n), fmt_sig6(err.mu[i][0]),
                        fmt_sig6(err.mu[i][1]), fmt_sig6(err.err_u[i]), fmt_sig6(err.err_s[i]),
                        fmt_sig6(eff.eta_u[i]), fmt_sig6(eff.eta_s[i])});
    std::vector<const std::vector<std::string>*> group;
    for (std::size_t i = start; i < t.rows.size(); ++i) group.push_back(&t.rows[i]);
    std::vector<std::string> mean = {err.scheme, std::to_string(err.n), "mean", "mean"};
    for (std::size_t col = 4; col < t.columns.size(); ++col)
      mean.push_back(detail::cell_mean(group, col));
    t.rows.push_back(std::move(mean));
  }
  return t;
}

inline Table table_from_speedups(const std::vector<SpeedupReport>& reports,
                                 const std::string& case_name, const std::string& id) {
  Table t;
  t.id = id;
  t.case_name = case_name;
  t.comments = {"wall-clock comparison, medians over repeated runs; timing columns vary",
                "between machines and runs",
                "columns: scheme, N, parameter, median full-solve seconds, median online "
                "seconds, speedup, iteration counts"};
  t.columns = {"scheme", "N",     "mu1",     "mu2",       "t_fom",
               "t_rom",  "speedup", "fom_iter", "rom_iter"};
  for (const SpeedupReport& rep : reports) {
    const std::size_t start = t.rows.size();
    for (const SpeedupRow& r : rep.rows)
      t.rows.push_back({rep.scheme, std::to_string(rep.n), fmt_sig6(r.mu[0]),
                        fmt_sig6(r.mu.size() > 1 ? r.mu[1] : 0.0), fmt_sig6(r.t_fom),
                        fmt_sig6(r.t_rom), fmt_sig6(r.speedup),
                        std::to_string(r.fom_iterations), std::to_string(r.rom_iterations)});
    std::vector<const std::vector<std::string>*> group;
    for (std::size_t i = start; i < t.rows.size(); ++i) group.push_back(&t.rows[i]);
    std::vector<std::string> med = {rep.scheme, std::to_string(rep.n), "median", "median"};
    for (std::size_t col = 4; col < t.columns.size(); ++col)
      med.push_back(detail::cell_median(group, col));
    t.rows.push_back(std::move(med));
  }
  return t;
}

// ---------------------------------------------------------------------------
// benchmark drivers

struct BenchOptions {
  std::string case_name = "elliptic2d";
  int nx = 16, ny = 16, degree = 2;
  std::vector<std::size_t> n_values = {4, 6, 8, 10, 12};
  std::size_t train_per_dim = 10;
  std::size_t test_per_dim = 10;
  std::size_t speedup_points = 3;
  int repetitions = 3;
  int threads = 1;      // reference sweep only; timing stays single-threaded
  std::string out_dir;  // tables and series land here when nonempty
  SnapshotCache* cache = nullptr;
};

// inclusive uniform grid over the parameter box
inline std::vector<ParamVec> param_grid(const CaseDefinition& c, std::size_t per_dim) {
  std::vector<ParamVec> out;
  if (c.n_param == 1) {
    for (std::size_t i = 0; i < per_dim; ++i)
      out.push_back({c.param_lo[0] + (c.param_hi[0] - c.param_lo[0]) * double(i) /
                                        double(per_dim - 1)});
    return out;
  }
  for (std::size_t i = 0; i < per_dim; ++i)
    for (std::size_t j = 0; j < per_dim; ++j)
      out.push_back({c.param_lo[0] + (c.param_hi[0] - c.param_lo[0]) * double(i) /
                                        double(per_dim - 1),
                     c.param_lo[1] + (c.param_hi[1] - c.param_lo[1]) * double(j) /
                                        double(per_dim - 1)});
  return out;
}

// cell-centered grid, offset from the inclusive training grid so test points
// never coincide with snapshot parameters
inline std::vector<ParamVec> param_grid_centered(const CaseDefinition& c, std::size_t per_dim) {
  std::vector<ParamVec> out;
  auto at = [&](int d, std::size_t i) {
    return c.param_lo[d] +
           (c.param_hi[d] - c.param_lo[d]) * (double(i) + 0.5) / double(per_dim);
  };
  if (c.n_param == 1) {
    for (std::size_t i = 0; i < per_dim; ++i) out.push_back({at(0, i)});
    return out;
  }
  for (std::size_t i = 0; i < per_dim; ++i)
    for (std::size_t j = 0; j < per_dim; ++j) out.push_back({at(0, i), at(1, j)});
  return out;
}

struct BenchContext {
  CaseDefinition c;
  FESpace s;
  AffineOperators af;
  std::vector<ParamVec> train, test;
  GreedyResult greedy;                 // hierarchical sample, size max(n_values)
  std::vector<FOMSolution> reference;  // full solves on the test set
};

inline BenchContext make_bench_context(const BenchOptions& o) {
  BenchContext ctx{get_case(o.case_name),
                   build_fe_space(2, o.nx, o.ny, o.degree, o.degree + 2),
                   {}, {}, {}, {}, {}};
  ctx.af = assemble_affine(ctx.s, ctx.c);
  ctx.train = param_grid(ctx.c, o.train_per_dim);
  ctx.test = param_grid_centered(ctx.c, o.test_per_dim);

  std::size_t n_max = 0;
  for (std::size_t n : o.n_values) n_max = std::max(n_max, n);
  GreedyConfig gcfg;
  gcfg.tol = 0.0;  // run to n_max; the hierarchy provides every smaller sample
  gcfg.n_max = n_max;
  const ParamVec corners[4] = {{ctx.c.param_lo[0], ctx.c.param_lo[1]},
                               {ctx.c.param_hi[0], ctx.c.param_lo[1]},
                               {ctx.c.param_lo[0], ctx.c.param_hi[1]},
                               {ctx.c.param_hi[0], ctx.c.param_hi[1]}};
  std::vector<ParamVec> s_init(corners, corners + 4);
  ctx.greedy = greedy_sample(ctx.s, ctx.c, ctx.af, s_init, ctx.train, gcfg, o.cache);

  ctx.reference.resize(ctx.test.size());
  std::vector<std::exception_ptr> errs(ctx.test.size());
  parallel_for(ctx.test.size(), o.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        ctx.reference[i] = fom_newton_solve(ctx.s, ctx.c, ctx.af, ctx.test[i]);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  });
  for (const std::exception_ptr& e : errs)
    if (e) std::rethrow_exception(e);
  return ctx;
}

namespace detail {

struct BuiltRom {
  RBSpace rb;
  RomOperators ops;
};

inline BuiltRom build_for_scheme(const BenchContext& ctx, const std::vector<ParamVec>& sample,
                                 const std::string& scheme, SnapshotCache* cache) {
  const SnapshotSet snaps = compute_snapshots(ctx.s, ctx.c, ctx.af, sample, cache);
  BuiltRom b{build_rb_space(ctx.s, snaps.fields), {}};
  b.ops = build_rom_operators(ctx.s, ctx.c, ctx.af, snaps, b.rb, scheme_by_name(scheme));
  return b;
}

inline OnlineSolver solver_for(const BenchContext& ctx, const BuiltRom& b,
                               const std::string& scheme) {
  if (scheme == "GN")
    return [&ctx, &b](const ParamVec& mu) {
      return online_gn_reference(ctx.s, ctx.c, ctx.af, b.rb, b.ops, mu);
    };
  if (b.ops.gnh) return [&ctx, &b](const ParamVec& mu) { return online_gnh(b.ops, ctx.c, mu); };
  return [&ctx, &b](const ParamVec& mu) { return online_hgn(b.ops, ctx.c, mu); };
}

}  // namespace detail

// Effectivity table across hyperreduction schemes, one block per (scheme, N),
// with the plain reduced solver as the error reference.
inline Table bench_effectivity_table(const BenchContext& ctx, const BenchOptions& o,
                                     const std::string& id,
                                     const std::vector<std::string>& schemes = {
                                         "EIM-GN", "FOEIM-GN", "SOEIM-GN", "GN-SOEIM"}) {
  std::vector<std::pair<ErrorReport, EffectivityReport>> blocks;
  std::vector<std::pair<std::string, Vector>> series;  // mean err_u vs N per scheme
  for (const std::string& scheme : schemes) series.emplace_back(scheme, Vector());
  Vector n_axis;

  for (std::size_t n : o.n_values) {
    const std::vector<ParamVec> sample(ctx.greedy.sample.begin(),
                                       ctx.greedy.sample.begin() + n);
    const detail::BuiltRom gn = detail::build_for_scheme(ctx, sample, "GN", o.cache);
    const ErrorReport gn_rep = evaluate_errors(
        ctx.s, ctx.c, gn.rb, detail::solver_for(ctx, gn, "GN"), ctx.test, ctx.reference, "GN");
    n_axis.push_back(double(gn_rep.n));
    for (std::size_t k = 0; k < schemes.size(); ++k) {
      const detail::BuiltRom b = detail::build_for_scheme(ctx, sample, schemes[k], o.cache);
      ErrorReport rep = evaluate_errors(ctx.s, ctx.c, b.rb,
                                        detail::solver_for(ctx, b, schemes[k]), ctx.test,
                                        ctx.reference, schemes[k]);
      EffectivityReport eff = evaluate_effectivities(rep, gn_rep);
      series[k].second.push_back(rep.mean_u);
      blocks.emplace_back(std::move(rep), std::move(eff));
    }
  }
  const Table t = table_from_effectivities(blocks, ctx.c.name, id);
  if (!o.out_dir.empty()) {
    write_table(t, o.out_dir);
    for (const auto& [scheme, ys] : series)
      write_series(o.out_dir + "/plots/err_u_" + scheme + "_" + ctx.c.name + ".dat", n_axis,
                   ys);
  }
  return t;
}

// Speedup table across schemes including the plain reduced solver.
inline Table bench_speedup_table(const BenchContext& ctx, const BenchOptions& o,
                                 const std::string& id,
                                 const std::vector<std::string>& schemes = {
                                     "GN", "EIM-GN", "FOEIM-GN", "SOEIM-GN", "GN-SOEIM"}) {
  std::vector<ParamVec> sample_mu(ctx.test.begin(),
                                  ctx.test.begin() +
                                      std::min(o.speedup_points, ctx.test.size()));
  std::vector<SpeedupReport> reports;
  for (std::size_t n : o.n_values) {
    const std::vector<ParamVec> sample(ctx.greedy.sample.begin(),
                                       ctx.greedy.sample.begin() + n);
    for (const std::string& scheme : schemes) {
      const detail::BuiltRom b = detail::build_for_scheme(ctx, sample, scheme, o.cache);
      reports.push_back(measure_speedup(ctx.s, ctx.c, ctx.af,
                                        detail::solver_for(ctx, b, scheme), sample_mu,
                                        o.repetitions, scheme, b.rb.n()));
    }
  }
  const Table t = table_from_speedups(reports, ctx.c.name, id);
  if (!o.out_dir.empty()) write_table(t, o.out_dir);
  return t;
}

// ---------------------------------------------------------------------------
// closed-form study driver (greedy record plus estimate tables)

struct StudyOptions {
  std::size_t n_candidates = 1000;
  std::size_t n_train = 100;
  std::size_t n_test = 200;
  double tol = 1e-3;
  std::size_t n_max = 25;
  std::vector<std::size_t> n_rows = {4, 7, 10, 13, 16, 19};
  std::string out_dir;
};

struct StudyResult {
  GreedyResult greedy;
  std::vector<ParamVec> test;
  std::vector<InterpStudyRow> eim, foeim, soeim;  // orders 0, 1, 2 across n_rows
  Table table_greedy, table_foeim, table_soeim;
};

inline StudyResult run_interp_study(const StudyOptions& o) {
  const CaseDefinition c = get_case("analytic1d");
  const CandidateSet cand = uniform_candidates_1d(c.domain_lo[0], c.domain_hi[0],
                                                  o.n_candidates);

  GreedyConfig gcfg;
  gcfg.scheme.residual_order = 2;
  gcfg.scheme.residual_mult = 6.0;
  gcfg.scheme.p_points = -1;
  gcfg.tol = o.tol;
  gcfg.n_max = o.n_max;
  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    gcfg.log_path = o.out_dir + "/greedy_" + c.name + ".csv";
  }

  std::vector<ParamVec> train;
  for (std::size_t j = 0; j < o.n_train; ++j)
    train.push_back({c.param_lo[0] + (c.param_hi[0] - c.param_lo[0]) * double(j) /
                                        double(o.n_train - 1)});
  StudyResult res;
  res.greedy = greedy_sample_closed_form(c, cand, {{0.0}, {5.0}, {10.0}}, train, gcfg);

  for (std::size_t j = 0; j < o.n_test; ++j)
    res.test.push_back({c.param_lo[0] + (c.param_hi[0] - c.param_lo[0]) * double(j) /
                                           double(o.n_test - 1)});

  for (std::size_t n : o.n_rows) {
    if (n > res.greedy.sample.size()) break;
    const std::vector<ParamVec> sample(res.greedy.sample.begin(),
                                       res.greedy.sample.begin() + n);
    auto append = [](std::vector<InterpStudyRow>& dst, std::vector<InterpStudyRow> rows) {
      for (auto& r : rows) dst.push_back(std::move(r));
    };
    append(res.eim, interp_study_rows(c, cand, sample, res.test, 0, {1.0}));
    append(res.foeim, interp_study_rows(c, cand, sample, res.test, 1, {1.0, 2.0, 3.0}));
    append(res.soeim, interp_study_rows(c, cand, sample, res.test, 2, {2.0, 4.0, 6.0}));
  }

  res.table_greedy = table_from_greedy(res.greedy, c.name);
  res.table_foeim = table_from_interp_study(res.foeim, res.test, c.name, "2");
  res.table_soeim = table_from_interp_study(res.soeim, res.test, c.name, "3");
  if (!o.out_dir.empty()) {
    write_table(res.table_greedy, o.out_dir);
    write_table(res.table_foeim, o.out_dir);
    write_table(res.table_soeim, o.out_dir);
    Vector n_axis, est_axis;
    for (const GreedyIteration& it : res.greedy.history) {
      n_axis.push_back(double(it.n));
      est_axis.push_back(it.max_estimate);
    }
    write_series(o.out_dir + "/plots/greedy_estimate_" + c.name + ".dat", n_axis, est_axis);
    auto series_for = [&](const std::vector<InterpStudyRow>& rows, const std::string& name) {
      Vector xs, mean_ys, max_ys;
      for (const InterpStudyRow& r : rows) {
        xs.push_back(double(r.n));
        mean_ys.push_back(r.mean_true);
        max_ys.push_back(r.max_true);
      }
      write_series(o.out_dir + "/plots/" + name + "_mean_" + c.name + ".dat", xs, mean_ys);
      write_series(o.out_dir + "/plots/" + name + "_max_" + c.name + ".dat", xs, max_ys);
    };
    series_for(res.eim, "interp_order0");
    series_for(res.foeim, "interp_order1");
    series_for(res.soeim, "interp_order2");
  }
  return res;
}

}  // namespace hyperrom
