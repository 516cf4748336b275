// SPDX-License-Identifier: Apache-2.0
//
// Artifact persistence for one offline run: every reduced operator in its own
// ROMX file named by role, plus meta.json carrying the run description and a
// content hash per file.  Loading verifies the hashes first, so a stale or
// hand-edited artifact directory is rejected instead of producing numbers.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperrom/cases.hpp"
#include "hyperrom/errors.hpp"
#include "hyperrom/io/romx.hpp"
#include "hyperrom/rom/operators.hpp"
#include "hyperrom/util/hash.hpp"

namespace hyperrom {

struct ArtifactBundle {
  std::string case_name;
  std::string scheme;
  bool gnh = false;
  std::size_t n = 0;
  int nx = 0, ny = 0, degree = 0, quad_order = 0;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  std::vector<ParamVec> sample;
  RomOperators ops;
  // Reference-scheme runs keep the nodal basis so the mesh-bound solver can
  // be reconstructed; hyperreduced runs leave both empty.
  std::vector<Vector> basis;
  std::vector<Vector> basis_int;
};

namespace detail {

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("artifact: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string file_digest(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  return hex64(fnv1a64(bytes.data(), bytes.size()));
}

inline std::string coupling_file(const TargetSystem& ts) {
  return ts.tag == "g" ? "C_NM_g" : "D_NK_" + ts.tag;
}

inline std::string trace_file(const TargetSystem& ts) {
  return ts.tag == "g" ? "Q_MN_g" : "Q_KN_" + ts.tag;
}

inline std::string tensor_file(const TargetSystem& ts, std::size_t k) {
  char idx[8];
  std::snprintf(idx, sizeof idx, "%03zu", k + 1);
  return (ts.tag == "g" ? "C" : "D") + ts.tag + "u_" + idx;
}

inline nlohmann::ordered_json target_meta(const TargetSystem& ts) {
  nlohmann::ordered_json t;
  t["tag"] = ts.tag;
  t["deriv"] = ts.deriv;
  t["component"] = ts.component;
  t["m"] = ts.m;
  t["p"] = ts.p;
  t["rank"] = ts.rank;
  t["points"] = ts.sys.points;
  return t;
}

inline DenseMatrix matrix_from_rows(const std::vector<Vector>& rows) {
  DenseMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline std::vector<Vector> rows_from_matrix(const DenseMatrix& m) {
  std::vector<Vector> rows(m.rows(), Vector(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace detail

inline void write_artifacts(const std::string& dir, const ArtifactBundle& b) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);

  std::vector<std::string> names;
  auto put = [&](const std::string& name, const auto& value) {
    write_romx(dir + "/" + name, value);
    names.push_back(name);
    return name;
  };

  nlohmann::ordered_json meta;
  meta["format"] = "hyperrom-artifact";
  meta["version"] = 1;
  meta["case"] = b.case_name;
  meta["scheme"] = b.scheme;
  meta["gnh"] = b.gnh;
  meta["n"] = b.n;
  meta["mesh"] = {{"nx", b.nx}, {"ny", b.ny}, {"degree", b.degree}, {"quad_order", b.quad_order}};
  meta["newton_tol"] = b.newton_tol;
  meta["newton_max_iter"] = b.newton_max_iter;
  meta["sample"] = b.sample;
  meta["n_affine"] = b.ops.a.size();

  for (std::size_t q = 0; q < b.ops.a.size(); ++q)
    put("A_" + std::to_string(q + 1), b.ops.a[q]);
  put("l_N", b.ops.l);
  put("l_out", b.ops.l_out);

  meta["residual_targets"] = nlohmann::ordered_json::array();
  for (const TargetSystem& ts : b.ops.residual) {
    nlohmann::ordered_json t = detail::target_meta(ts);
    t["coupling"] = put(detail::coupling_file(ts), ts.coupling);
    t["q"] = put(detail::trace_file(ts), ts.q);
    t["b"] = put("B_" + ts.tag, ts.sys.b);
    meta["residual_targets"].push_back(t);
  }

  meta["jacobian_targets"] = nlohmann::ordered_json::array();
  for (const TargetSystem& ts : b.ops.jacobian) {
    nlohmann::ordered_json t = detail::target_meta(ts);
    t["q"] = put("Q_" + ts.tag + "u", ts.q);
    t["b"] = put("B_" + ts.tag + "u", ts.sys.b);
    auto files = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < ts.tensors.size(); ++k)
      files.push_back(put(detail::tensor_file(ts, k), ts.tensors[k]));
    t["tensors"] = files;
    meta["jacobian_targets"].push_back(t);
  }

  if (!b.basis.empty()) {
    put("Z_nodal", detail::matrix_from_rows(b.basis));
    put("Z_interior", detail::matrix_from_rows(b.basis_int));
    meta["basis_files"] = {"Z_nodal", "Z_interior"};
  }

  nlohmann::ordered_json hashes;
  for (const std::string& name : names) hashes[name] = detail::file_digest(dir + "/" + name);
  meta["hashes"] = hashes;

  const std::string meta_path = dir + "/meta.json";
  std::ofstream out(meta_path, std::ios::binary);
  if (!out) throw IoError("artifact: cannot write " + meta_path);
  out << meta.dump(2) << "\n";
}

namespace detail {

// hash gate in front of every artifact read
inline std::string verified_path(const std::string& dir, const nlohmann::ordered_json& meta,
                                 const std::string& name) {
  const auto& hashes = meta.at("hashes");
  if (!hashes.contains(name))
    throw ArtifactMismatch("artifact: " + name + ": no recorded hash in meta.json");
  const std::string path = dir + "/" + name;
  const std::string got = file_digest(path);
  const std::string want = hashes.at(name).get<std::string>();
  if (got != want)
    throw ArtifactMismatch("artifact: " + name + ": content hash " + got +
                           " does not match recorded " + want + "; rerun offline");
  return path;
}

inline TargetSystem load_target(const std::string& dir, const nlohmann::ordered_json& meta,
                                const nlohmann::ordered_json& t, bool jacobian) {
  TargetSystem ts;
  ts.tag = t.at("tag").get<std::string>();
  ts.deriv = t.at("deriv").get<int>();
  ts.component = t.at("component").get<int>();
  ts.m = t.at("m").get<std::size_t>();
  ts.p = t.at("p").get<std::size_t>();
  ts.rank = t.at("rank").get<std::size_t>();
  ts.sys.points = t.at("points").get<std::vector<std::size_t>>();
  ts.sys.b = read_romx(verified_path(dir, meta, t.at("b").get<std::string>()));
  ts.q = read_romx(verified_path(dir, meta, t.at("q").get<std::string>()));
  // psi stays empty: it belongs to the offline point selection, and the
  // online solvers and the estimator only touch b, q, and the couplings.
  if (jacobian) {
    for (const auto& name : t.at("tensors"))
      ts.tensors.push_back(read_romx(verified_path(dir, meta, name.get<std::string>())));
  } else {
    ts.coupling = read_romx(verified_path(dir, meta, t.at("coupling").get<std::string>()));
  }
  return ts;
}

}  // namespace detail

inline ArtifactBundle load_artifacts(const std::string& dir) {
  nlohmann::ordered_json meta;
  try {
    meta = nlohmann::ordered_json::parse(detail::read_file_bytes(dir + "/meta.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("artifact: meta.json: " + std::string(e.what()));
  }
  try {
    if (meta.at("format").get<std::string>() != "hyperrom-artifact" ||
        meta.at("version").get<int>() != 1)
      throw FormatError("artifact: unsupported meta.json format or version");

    ArtifactBundle b;
    b.case_name = meta.at("case").get<std::string>();
    b.scheme = meta.at("scheme").get<std::string>();
    b.gnh = meta.at("gnh").get<bool>();
    b.n = meta.at("n").get<std::size_t>();
    b.nx = meta.at("mesh").at("nx").get<int>();
    b.ny = meta.at("mesh").at("ny").get<int>();
    b.degree = meta.at("mesh").at("degree").get<int>();
    b.quad_order = meta.at("mesh").at("quad_order").get<int>();
    b.newton_tol = meta.at("newton_tol").get<double>();
    b.newton_max_iter = meta.at("newton_max_iter").get<int>();
    b.sample = meta.at("sample").get<std::vector<ParamVec>>();

    b.ops.n = b.n;
    b.ops.gnh = b.gnh;
    const std::size_t n_affine = meta.at("n_affine").get<std::size_t>();
    for (std::size_t q = 0; q < n_affine; ++q)
      b.ops.a.push_back(read_romx(detail::verified_path(dir, meta, "A_" + std::to_string(q + 1))));
    b.ops.l = read_romx_vector(detail::verified_path(dir, meta, "l_N"));
    b.ops.l_out = read_romx_vector(detail::verified_path(dir, meta, "l_out"));
    for (const auto& t : meta.at("residual_targets"))
      b.ops.residual.push_back(detail::load_target(dir, meta, t, false));
    for (const auto& t : meta.at("jacobian_targets"))
      b.ops.jacobian.push_back(detail::load_target(dir, meta, t, true));

    if (meta.contains("basis_files")) {
      b.basis = detail::rows_from_matrix(read_romx(detail::verified_path(dir, meta, "Z_nodal")));
      b.basis_int =
          detail::rows_from_matrix(read_romx(detail::verified_path(dir, meta, "Z_interior")));
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("artifact: meta.json: " + std::string(e.what()));
  }
}

}  // namespace hyperrom
