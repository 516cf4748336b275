// SPDX-License-Identifier: Apache-2.0
//
// Run configuration for the command line: JSON file in, validated struct out,
// and an echo of the effective settings written next to the outputs.  Every
// field has a default, so an empty file is a complete configuration.

#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperrom/cases.hpp"
#include "hyperrom/errors.hpp"
#include "hyperrom/numerics/parallel.hpp"
#include "hyperrom/rom/build.hpp"

namespace hyperrom {

struct RunConfig {
  std::string case_name = "elliptic2d";
  int nx = 16, ny = 16;
  int degree = 2;
  int quad_order = 0;  // 0 resolves to degree + 2
  std::string scheme = "GN-SOEIM";
  std::size_t n = 10;
  // Interpolation sizing.  Negative multipliers and p_points = -2 resolve to
  // the scheme defaults; p_points = -1 matches N and 0 drops the estimate.
  double residual_multiplier = -1.0;
  double jacobian_multiplier = -1.0;
  int p_points = -2;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double greedy_tol = 1e-3;
  std::size_t greedy_n_max = 25;
  std::vector<ParamVec> initial_sample;  // empty resolves to the case default
  std::size_t train_per_dim = 10;
  std::size_t test_per_dim = 10;
  // 1D interpolation study sizes
  std::size_t study_candidates = 1000;
  std::size_t study_train = 100;
  std::size_t study_test = 200;
  // benchmark sweep
  std::vector<std::size_t> n_values = {4, 6, 8, 10, 12};
  std::size_t speedup_points = 3;
  int repetitions = 3;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 0;          // 0 resolves to the available cores
  bool full_scale = false;  // pins the mesh and test grid to the full-size run
};

namespace detail {

template <typename T>
T config_value(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config: " + key + ": " + std::string(e.what()));
  }
}

inline std::size_t config_count(const nlohmann::json& v, const std::string& key,
                                long long min_value) {
  const long long raw = config_value<long long>(v, key);
  if (raw < min_value)
    throw ParseError("config: " + key + ": must be at least " + std::to_string(min_value));
  return static_cast<std::size_t>(raw);
}

inline std::string format_param(const ParamVec& mu) {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < mu.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.10g", mu[i]);
    if (i > 0) out += ", ";
    out += buf;
  }
  return out + ")";
}

}  // namespace detail

// lowest corner, midpoint(s), highest corner of the parameter box
inline std::vector<ParamVec> default_initial_sample(const CaseDefinition& c) {
  if (c.n_param == 1)
    return {{c.param_lo[0]}, {0.5 * (c.param_lo[0] + c.param_hi[0])}, {c.param_hi[0]}};
  return {{c.param_lo[0], c.param_lo[1]},
          {c.param_hi[0], c.param_lo[1]},
          {c.param_lo[0], c.param_hi[1]},
          {c.param_hi[0], c.param_hi[1]}};
}

inline void validate_mu(const CaseDefinition& c, const ParamVec& mu, const std::string& who) {
  if (mu.size() != static_cast<std::size_t>(c.n_param))
    throw CaseDimensionMismatch(who + ": expected " + std::to_string(c.n_param) +
                                " parameter components, got " + std::to_string(mu.size()));
  for (int d = 0; d < c.n_param; ++d)
    if (mu[d] < c.param_lo[d] || mu[d] > c.param_hi[d]) {
      std::ostringstream box;
      box << "[" << c.param_lo[0] << ", " << c.param_hi[0] << "]";
      if (c.n_param == 2) box << " x [" << c.param_lo[1] << ", " << c.param_hi[1] << "]";
      throw OutOfDomain(who + ": mu = " + detail::format_param(mu) +
                        " outside the parameter domain " + box.str());
    }
}

// Resolves sentinels against the case and scheme and validates every field.
// Called once after the file and any flag overrides have been applied.
inline void finalize_config(RunConfig& cfg) {
  const CaseDefinition c = get_case(cfg.case_name);

  if (cfg.full_scale && c.dim == 2) {
    cfg.nx = 32;
    cfg.ny = 32;
    cfg.degree = 3;
    cfg.quad_order = 0;
    cfg.test_per_dim = 30;
  }

  if (cfg.nx < 1) throw InvalidGrid("config: nx: mesh needs at least one cell per direction");
  if (cfg.ny < 1) throw InvalidGrid("config: ny: mesh needs at least one cell per direction");
  if (cfg.degree < 1) throw InvalidDegree("config: degree: must be at least 1");
  if (cfg.quad_order < 0) throw InvalidDegree("config: quad_order: must be nonnegative");
  if (cfg.quad_order == 0) cfg.quad_order = cfg.degree + 2;

  const SchemeConfig sc = scheme_by_name(cfg.scheme);
  if (cfg.residual_multiplier < 0.0) cfg.residual_multiplier = sc.residual_mult;
  if (cfg.jacobian_multiplier < 0.0) cfg.jacobian_multiplier = sc.jacobian_mult;
  if (cfg.p_points == -2) cfg.p_points = sc.p_points;
  if (cfg.p_points < -1) throw ParseError("config: p_points: must be -1, 0, or positive");

  if (cfg.n < 1) throw ParseError("config: n: must be at least 1");
  if (cfg.newton_tol <= 0.0) throw ParseError("config: newton_tol: must be positive");
  if (cfg.newton_max_iter < 1) throw ParseError("config: newton_max_iter: must be at least 1");
  if (cfg.greedy_tol < 0.0) throw ParseError("config: greedy_tol: must be nonnegative");
  if (cfg.greedy_n_max < 1) throw ParseError("config: greedy_n_max: must be at least 1");

  if (cfg.initial_sample.empty()) cfg.initial_sample = default_initial_sample(c);
  for (std::size_t i = 0; i < cfg.initial_sample.size(); ++i)
    validate_mu(c, cfg.initial_sample[i], "config: initial_sample[" + std::to_string(i) + "]");

  if (cfg.train_per_dim < 2) throw InvalidGrid("config: train_per_dim: must be at least 2");
  if (cfg.test_per_dim < 2) throw InvalidGrid("config: test_per_dim: must be at least 2");
  if (cfg.study_candidates < 2) throw InvalidGrid("config: study_candidates: must be at least 2");
  if (cfg.study_train < 2) throw InvalidGrid("config: study_train: must be at least 2");
  if (cfg.study_test < 2) throw InvalidGrid("config: study_test: must be at least 2");

  if (cfg.n_values.empty()) throw ParseError("config: n_values: must not be empty");
  for (std::size_t v : cfg.n_values)
    if (v < 1) throw ParseError("config: n_values: entries must be at least 1");
  if (cfg.speedup_points < 1) throw ParseError("config: speedup_points: must be at least 1");
  if (cfg.repetitions < 1) throw ParseError("config: repetitions: must be at least 1");
  if (cfg.threads == 0) cfg.threads = default_thread_count();
  if (cfg.threads < 1) throw ParseError("config: threads: must be nonnegative");
  if (cfg.out_dir.empty()) throw ParseError("config: out: must not be empty");
}

// Parses JSON text into a config without resolving sentinels, so callers can
// still layer flag overrides on top.  Whitespace-only text means defaults.
inline RunConfig parse_config_raw(const std::string& text) {
  RunConfig cfg;
  bool blank = true;
  for (char ch : text)
    if (std::isspace(static_cast<unsigned char>(ch)) == 0) {
      blank = false;
      break;
    }
  if (blank) return cfg;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ParseError("config: top level must be a JSON object");

  using detail::config_count;
  using detail::config_value;
  for (const auto& [key, v] : doc.items()) {
    if (key == "case") {
      cfg.case_name = config_value<std::string>(v, key);
    } else if (key == "nx") {
      cfg.nx = config_value<int>(v, key);
    } else if (key == "ny") {
      cfg.ny = config_value<int>(v, key);
    } else if (key == "degree") {
      cfg.degree = config_value<int>(v, key);
    } else if (key == "quad_order") {
      cfg.quad_order = config_value<int>(v, key);
    } else if (key == "scheme") {
      cfg.scheme = config_value<std::string>(v, key);
    } else if (key == "n") {
      cfg.n = config_count(v, key, 1);
    } else if (key == "residual_multiplier") {
      cfg.residual_multiplier = config_value<double>(v, key);
    } else if (key == "jacobian_multiplier") {
      cfg.jacobian_multiplier = config_value<double>(v, key);
    } else if (key == "p_points") {
      cfg.p_points = config_value<int>(v, key);
    } else if (key == "newton_tol") {
      cfg.newton_tol = config_value<double>(v, key);
    } else if (key == "newton_max_iter") {
      cfg.newton_max_iter = config_value<int>(v, key);
    } else if (key == "greedy_tol") {
      cfg.greedy_tol = config_value<double>(v, key);
    } else if (key == "greedy_n_max") {
      cfg.greedy_n_max = config_count(v, key, 1);
    } else if (key == "initial_sample") {
      cfg.initial_sample = config_value<std::vector<ParamVec>>(v, key);
    } else if (key == "train_per_dim") {
      cfg.train_per_dim = config_count(v, key, 1);
    } else if (key == "test_per_dim") {
      cfg.test_per_dim = config_count(v, key, 1);
    } else if (key == "study_candidates") {
      cfg.study_candidates = config_count(v, key, 1);
    } else if (key == "study_train") {
      cfg.study_train = config_count(v, key, 1);
    } else if (key == "study_test") {
      cfg.study_test = config_count(v, key, 1);
    } else if (key == "n_values") {
      cfg.n_values.clear();
      for (const auto& e : v) cfg.n_values.push_back(config_count(e, key, 1));
    } else if (key == "speedup_points") {
      cfg.speedup_points = config_count(v, key, 1);
    } else if (key == "repetitions") {
      cfg.repetitions = config_value<int>(v, key);
    } else if (key == "out") {
      cfg.out_dir = config_value<std::string>(v, key);
    } else if (key == "seed") {
      cfg.seed = config_value<std::uint64_t>(v, key);
    } else if (key == "threads") {
      cfg.threads = config_value<int>(v, key);
    } else if (key == "full_scale") {
      cfg.full_scale = config_value<bool>(v, key);
    } else {
      throw UnknownKey("config: unknown key \"" + key + "\"");
    }
  }
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg = parse_config_raw(text);
  finalize_config(cfg);
  return cfg;
}

inline std::string read_text_file(const std::string& path, const std::string& who) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(who + ": cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline RunConfig parse_config(const std::string& path) {
  return parse_config_text(read_text_file(path, "config"));
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["case"] = cfg.case_name;
  j["nx"] = cfg.nx;
  j["ny"] = cfg.ny;
  j["degree"] = cfg.degree;
  j["quad_order"] = cfg.quad_order;
  j["scheme"] = cfg.scheme;
  j["n"] = cfg.n;
  j["residual_multiplier"] = cfg.residual_multiplier;
  j["jacobian_multiplier"] = cfg.jacobian_multiplier;
  j["p_points"] = cfg.p_points;
  j["newton_tol"] = cfg.newton_tol;
  j["newton_max_iter"] = cfg.newton_max_iter;
  j["greedy_tol"] = cfg.greedy_tol;
  j["greedy_n_max"] = cfg.greedy_n_max;
  j["initial_sample"] = cfg.initial_sample;
  j["train_per_dim"] = cfg.train_per_dim;
  j["test_per_dim"] = cfg.test_per_dim;
  j["study_candidates"] = cfg.study_candidates;
  j["study_train"] = cfg.study_train;
  j["study_test"] = cfg.study_test;
  j["n_values"] = cfg.n_values;
  j["speedup_points"] = cfg.speedup_points;
  j["repetitions"] = cfg.repetitions;
  j["out"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["full_scale"] = cfg.full_scale;
  return j;
}

inline void write_effective_config(const RunConfig& cfg, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = dir + "/effective_config.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("config: cannot write " + path);
  out << config_json(cfg).dump(2) << "\n";
}

// scheme with the config's sizing applied; finalize_config must have run
inline SchemeConfig scheme_from_config(const RunConfig& cfg) {
  SchemeConfig sc = scheme_by_name(cfg.scheme);
  sc.residual_mult = cfg.residual_multiplier;
  sc.jacobian_mult = cfg.jacobian_multiplier;
  sc.p_points = cfg.p_points;
  return sc;
}

// comma-separated component list from the --mu flag
inline ParamVec parse_mu(const std::string& text) {
  ParamVec mu;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string part =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    char* end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    if (end == part.c_str() || (end != nullptr && *end != '\0'))
      throw ParseError("--mu: cannot parse component \"" + part + "\"");
    mu.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (mu.empty()) throw ParseError("--mu: empty value list");
  return mu;
}

}  // namespace hyperrom
