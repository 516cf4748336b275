// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end.  Subcommands: offline (build artifacts), solve (one
// online solve from artifacts), greedy (parameter sampling), bench (reproduce
// one benchmark table), interp-study (interpolation error study).
// Exit codes: 0 success, 2 configuration error, 3 solver divergence,
// 4 artifact mismatch.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hyperrom/bench/bench.hpp"
#include "hyperrom/cli/artifact.hpp"
#include "hyperrom/cli/config.hpp"
#include "hyperrom/errors.hpp"

namespace {

using namespace hyperrom;

CaseDefinition case_for(const RunConfig& cfg) {
  CaseDefinition c = get_case(cfg.case_name);
  c.newton_tol = cfg.newton_tol;
  c.newton_max_iter = cfg.newton_max_iter;
  return c;
}

int run_offline(const RunConfig& cfg) {
  const CaseDefinition c = case_for(cfg);
  if (c.dim != 2)
    throw MissingSystem("offline: case " + cfg.case_name +
                        " has no finite element discretization; use interp-study or greedy");
  const FESpace s = build_fe_space(2, cfg.nx, cfg.ny, cfg.degree, cfg.quad_order);
  const AffineOperators af = assemble_affine(s, c);
  SnapshotCache cache = SnapshotCache::from_env();

  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  GreedyConfig g;
  g.scheme = scheme_from_config(cfg);
  g.tol = 0.0;  // enrich to exactly n; convergence studies belong to greedy
  g.n_max = cfg.n;
  g.log_path = cfg.out_dir + "/greedy_log.csv";
  const GreedyResult res =
      greedy_sample(s, c, af, cfg.initial_sample, param_grid(c, cfg.train_per_dim), g, &cache);

  const SnapshotSet snaps = compute_snapshots(s, c, af, res.sample, &cache);
  const RBSpace rb = build_rb_space(s, snaps.fields);
  const RomOperators ops = build_rom_operators(s, c, af, snaps, rb, g.scheme);

  ArtifactBundle b;
  b.case_name = cfg.case_name;
  b.scheme = cfg.scheme;
  b.gnh = ops.gnh;
  b.n = rb.n();
  b.nx = cfg.nx;
  b.ny = cfg.ny;
  b.degree = cfg.degree;
  b.quad_order = cfg.quad_order;
  b.newton_tol = cfg.newton_tol;
  b.newton_max_iter = cfg.newton_max_iter;
  b.sample = res.sample;
  b.ops = ops;
  if (!g.scheme.hyper) {
    // mesh-bound reference scheme: keep the basis so solve can rebuild it
    b.basis = rb.basis;
    b.basis_int = rb.basis_int;
  }
  write_artifacts(cfg.out_dir, b);
  write_effective_config(cfg, cfg.out_dir);
  std::printf("offline: case=%s scheme=%s N=%zu mesh=%dx%d p=%d -> %s\n", cfg.case_name.c_str(),
              cfg.scheme.c_str(), b.n, cfg.nx, cfg.ny, cfg.degree, cfg.out_dir.c_str());
  return 0;
}

int run_solve(const RunConfig& cfg, const std::string& mu_text) {
  const ArtifactBundle b = load_artifacts(cfg.out_dir);
  CaseDefinition c = get_case(b.case_name);
  c.newton_tol = b.newton_tol;
  c.newton_max_iter = b.newton_max_iter;
  const ParamVec mu = parse_mu(mu_text);
  validate_mu(c, mu, "solve");

  RomSolution sol;
  if (!b.ops.residual.empty()) {
    sol = b.gnh ? online_gnh(b.ops, c, mu) : online_hgn(b.ops, c, mu);
  } else if (!b.basis.empty()) {
    const FESpace s = build_fe_space(2, b.nx, b.ny, b.degree, b.quad_order);
    const AffineOperators af = assemble_affine(s, c);
    RBSpace rb;
    rb.basis = b.basis;
    rb.basis_int = b.basis_int;
    sol = online_gn_reference(s, c, af, rb, b.ops, mu);
  } else {
    throw ArtifactMismatch("solve: artifact carries neither interpolation systems nor a basis");
  }

  std::printf("s_N = %.10g\n", sol.output);
  std::printf("iterations = %d\n", sol.iterations);
  bool estimable = false;
  for (const TargetSystem& ts : b.ops.residual) estimable = estimable || ts.p > 0;
  if (estimable)
    std::printf("estimate = %.6e\n", rom_error_estimate(b.ops, c, mu, sol.alpha));
  return 0;
}

int run_greedy(const RunConfig& cfg) {
  const CaseDefinition c = case_for(cfg);
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  GreedyConfig g;
  g.scheme = scheme_from_config(cfg);
  g.tol = cfg.greedy_tol;
  g.n_max = cfg.greedy_n_max;
  g.log_path = cfg.out_dir + "/greedy_" + cfg.case_name + ".csv";

  GreedyResult res;
  if (c.dim == 1) {
    const CandidateSet cand =
        uniform_candidates_1d(c.domain_lo[0], c.domain_hi[0], cfg.study_candidates);
    res = greedy_sample_closed_form(c, cand, cfg.initial_sample,
                                    param_grid(c, cfg.study_train), g);
  } else {
    const FESpace s = build_fe_space(2, cfg.nx, cfg.ny, cfg.degree, cfg.quad_order);
    const AffineOperators af = assemble_affine(s, c);
    SnapshotCache cache = SnapshotCache::from_env();
    res = greedy_sample(s, c, af, cfg.initial_sample, param_grid(c, cfg.train_per_dim), g,
                        &cache);
  }
  write_table(table_from_greedy(res, cfg.case_name), cfg.out_dir);
  write_effective_config(cfg, cfg.out_dir);
  std::printf("greedy: case=%s N=%zu %s\n", cfg.case_name.c_str(), res.sample.size(),
              res.converged ? "converged" : "stopped at n_max");
  if (!res.history.empty())
    std::printf("greedy: last max estimate %.6e\n", res.history.back().max_estimate);
  std::printf("greedy: log %s\n", g.log_path.c_str());
  return 0;
}

int run_study(const RunConfig& cfg, bool to_full_rows) {
  StudyOptions o;
  o.n_candidates = cfg.study_candidates;
  o.n_train = cfg.study_train;
  o.n_test = cfg.study_test;
  o.tol = cfg.greedy_tol;
  o.n_max = cfg.greedy_n_max;
  o.out_dir = cfg.out_dir;
  if (to_full_rows) {
    // estimator tables list every row; drop the stopping rule and enrich to
    // the largest tabulated N
    o.tol = 0.0;
    o.n_max = *std::max_element(o.n_rows.begin(), o.n_rows.end());
  }
  const StudyResult r = run_interp_study(o);
  write_effective_config(cfg, cfg.out_dir);
  std::printf("interp-study: sample N=%zu, tables %s/%s %s %s\n", r.greedy.sample.size(),
              cfg.out_dir.c_str(), table_file_name(r.table_greedy).c_str(),
              table_file_name(r.table_foeim).c_str(), table_file_name(r.table_soeim).c_str());
  return 0;
}

int run_bench(const RunConfig& cfg, int table) {
  if (table <= 3) return run_study(cfg, table >= 2);

  BenchOptions o;
  o.case_name = cfg.case_name;
  o.nx = cfg.nx;
  o.ny = cfg.ny;
  o.degree = cfg.degree;
  o.n_values = cfg.n_values;
  o.train_per_dim = cfg.train_per_dim;
  o.test_per_dim = cfg.test_per_dim;
  o.speedup_points = cfg.speedup_points;
  o.repetitions = cfg.repetitions;
  o.threads = cfg.threads;
  o.out_dir = cfg.out_dir;
  SnapshotCache cache = SnapshotCache::from_env();
  o.cache = &cache;

  const BenchContext ctx = make_bench_context(o);
  const Table t = (table == 4 || table == 6)
                      ? bench_effectivity_table(ctx, o, std::to_string(table))
                      : bench_speedup_table(ctx, o, std::to_string(table));
  write_effective_config(cfg, cfg.out_dir);
  std::printf("bench: wrote %s/%s\n", cfg.out_dir.c_str(), table_file_name(t).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reduced order modeling toolkit"};
  app.require_subcommand(1);

  std::string config_path, case_name, scheme, out_dir, mu_text;
  std::size_t n = 0;
  int threads = 0, table = 0;
  bool full_scale = false;

  app.add_option("--config", config_path, "JSON configuration file");
  auto* opt_case = app.add_option("--case", case_name, "problem case name");
  auto* opt_scheme = app.add_option("--scheme", scheme, "reduction scheme name");
  auto* opt_n = app.add_option("--n", n, "reduced dimension");
  auto* opt_out = app.add_option("--out", out_dir, "output directory");
  auto* opt_threads = app.add_option("--threads", threads, "worker threads for sweeps");
  auto* opt_full = app.add_flag("--full-scale", full_scale, "full-size mesh and test grids");

  CLI::App* cmd_offline = app.add_subcommand("offline", "build reduced artifacts");
  CLI::App* cmd_solve = app.add_subcommand("solve", "one online solve from artifacts");
  cmd_solve->add_option("--mu", mu_text, "parameter components, comma separated")->required();
  CLI::App* cmd_greedy = app.add_subcommand("greedy", "greedy parameter sampling");
  CLI::App* cmd_bench = app.add_subcommand("bench", "reproduce one benchmark table");
  cmd_bench->add_option("--table", table, "table id, 1 through 7")
      ->required()
      ->check(CLI::Range(1, 7));
  CLI::App* cmd_study = app.add_subcommand("interp-study", "interpolation error study");
  for (CLI::App* sub : {cmd_offline, cmd_solve, cmd_greedy, cmd_bench, cmd_study})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty()
                        ? RunConfig()
                        : parse_config_raw(read_text_file(config_path, "config"));
    if (*opt_case) cfg.case_name = case_name;
    if (*opt_scheme) cfg.scheme = scheme;
    if (*opt_n) cfg.n = n;
    if (*opt_out) cfg.out_dir = out_dir;
    if (*opt_threads) cfg.threads = threads;
    if (*opt_full) cfg.full_scale = true;

    if (cmd_bench->parsed()) {
      const char* forced = table <= 3 ? "analytic1d" : (table <= 5 ? "elliptic2d" : "cdr2d");
      if (*opt_case && cfg.case_name != forced)
        std::fprintf(stderr, "bench: table %d belongs to case %s; ignoring --case %s\n", table,
                     forced, cfg.case_name.c_str());
      cfg.case_name = forced;
    } else if (cmd_study->parsed()) {
      if (*opt_case && cfg.case_name != "analytic1d")
        std::fprintf(stderr, "interp-study: closed-form workflow; ignoring --case %s\n",
                     cfg.case_name.c_str());
      cfg.case_name = "analytic1d";
    }

    finalize_config(cfg);

    if (cmd_offline->parsed()) return run_offline(cfg);
    if (cmd_solve->parsed()) return run_solve(cfg, mu_text);
    if (cmd_greedy->parsed()) return run_greedy(cfg);
    if (cmd_bench->parsed()) return run_bench(cfg, table);
    return run_study(cfg, false);
  } catch (const NewtonDiverged& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 3;
  } catch (const ArtifactMismatch& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 4;
  } catch (const UnknownKey& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const OutOfDomain& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const InvalidGrid& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const InvalidDegree& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const CaseDimensionMismatch& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const UnknownCase& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const MissingSystem& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const EmptyTrainingSet& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hyperrom: %s\n", e.what());
    return 1;
  }
}
