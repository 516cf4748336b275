// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "hyperrom/fem/fom.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/rb/snapshots.hpp"
#include "hyperrom/rb/space.hpp"

using namespace hyperrom;

namespace {

struct Fixture {
  FESpace s = build_fe_space(2, 8, 8, 2, 4);
  CaseDefinition c = get_case("elliptic2d");
  AffineOperators ops;
  Fixture() { ops = assemble_affine(s, c); }
};

std::vector<ParamVec> sample_grid() {
  return {{1.0, 1.0}, {2.0, 3.0}, {1.5, 6.0}, {1.2, 2.2}, {1.9, 4.8}};
}

}  // namespace

TEST_CASE("reduced basis is orthonormal and spans the snapshots") {
  Fixture f;
  const SnapshotSet set = compute_snapshots(f.s, f.c, f.ops, sample_grid());
  const RBSpace rb = build_rb_space(f.s, set.fields);
  REQUIRE(rb.n() == set.fields.size());

  for (std::size_t i = 0; i < rb.n(); ++i) {
    for (std::size_t j = 0; j < rb.n(); ++j) {
      const double g = x_inner_product(f.s, rb.basis[i], rb.basis[j]);
      REQUIRE(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }

  // every snapshot is reproduced exactly by its projection onto the basis
  for (const Vector& w : set.fields) {
    Vector alpha(rb.n());
    for (std::size_t j = 0; j < rb.n(); ++j) alpha[j] = x_inner_product(f.s, w, rb.basis[j]);
    Vector diff = rb.lift(alpha);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] -= w[k];
    REQUIRE(x_norm(f.s, diff) < 1e-9 * x_norm(f.s, w));
  }
}

TEST_CASE("gram-schmidt keeps earlier vectors fixed when snapshots are appended") {
  Fixture f;
  const SnapshotSet set = compute_snapshots(f.s, f.c, f.ops, sample_grid());
  std::vector<Vector> first3(set.fields.begin(), set.fields.begin() + 3);
  const std::vector<Vector> b3 = orthonormalize_x(f.s, first3);
  const std::vector<Vector> b5 = orthonormalize_x(f.s, set.fields);
  REQUIRE(b3.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < b3[j].size(); ++k) {
      REQUIRE(std::abs(b3[j][k] - b5[j][k]) < 1e-13);
    }
  }
}

TEST_CASE("dependent snapshots are dropped instead of polluting the basis") {
  Fixture f;
  std::vector<ParamVec> mus = sample_grid();
  mus.push_back(mus[1]);  // exact repeat
  const SnapshotSet set = compute_snapshots(f.s, f.c, f.ops, mus);
  const RBSpace rb = build_rb_space(f.s, set.fields);
  REQUIRE(rb.n() == 5);

  std::vector<Vector> with_combo = set.fields;
  Vector combo(set.fields[0].size());
  for (std::size_t k = 0; k < combo.size(); ++k)
    combo[k] = 0.3 * set.fields[0][k] - 1.7 * set.fields[2][k];
  with_combo.push_back(combo);
  REQUIRE(orthonormalize_x(f.s, with_combo).size() == 5);
}

TEST_CASE("basis traces match direct point evaluation") {
  Fixture f;
  const SnapshotSet set = compute_snapshots(f.s, f.c, f.ops, {{1.4, 3.1}, {1.8, 5.5}});
  const RBSpace rb = build_rb_space(f.s, set.fields);
  REQUIRE(rb.zeta.rows() == f.s.n_qp_global);
  for (std::size_t q : {std::size_t(0), f.s.n_qp_global / 2, f.s.n_qp_global - 1}) {
    for (std::size_t j = 0; j < rb.n(); ++j) {
      const Vector v = eval_fields_at_points(f.s, rb.basis[j], {f.s.qp_x[q]}, {f.s.qp_y[q]});
      REQUIRE(std::abs(rb.zeta(q, j) - v[0]) < 1e-12);
    }
  }
}

TEST_CASE("snapshot cache returns bitwise identical fields") {
  Fixture f;
  const ParamVec mu{1.6, 4.2};

  SnapshotCache mem;
  const Vector a = compute_snapshot(f.s, f.c, f.ops, mu, &mem);
  const Vector b = compute_snapshot(f.s, f.c, f.ops, mu, &mem);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] == b[k]);

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "hyperrom_cache_test";
  std::filesystem::remove_all(dir);
  {
    SnapshotCache disk(dir.string());
    compute_snapshot(f.s, f.c, f.ops, mu, &disk);
  }
  REQUIRE(std::filesystem::exists(dir));
  REQUIRE(!std::filesystem::is_empty(dir));
  {
    // a fresh cache object must hit the on-disk entry
    SnapshotCache disk(dir.string());
    Vector out;
    REQUIRE(disk.lookup(SnapshotCache::key(f.s, f.c, mu), out));
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] == out[k]);
    Vector miss;
    REQUIRE(!disk.lookup(SnapshotCache::key(f.s, f.c, {1.61, 4.2}), miss));
  }
  std::filesystem::remove_all(dir);
}
