// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hyperrom/cases.hpp"
#include "hyperrom/fem/fom.hpp"
#include "hyperrom/fem/space.hpp"
#include "hyperrom/io/romx.hpp"
#include "hyperrom/util/hash.hpp"

namespace hyperrom {

// Caches full-order solves keyed by discretization and parameter value.  All
// hits are bitwise identical to the original solve.  An empty directory name
// keeps the cache in memory only; otherwise misses are persisted as .romx
// files under the directory.
class SnapshotCache {
 public:
  SnapshotCache() = default;
  explicit SnapshotCache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  // honors HYPERROM_CACHE when set, memory-only otherwise
  static SnapshotCache from_env() {
    const char* d = std::getenv("HYPERROM_CACHE");
    return d != nullptr && d[0] != '\0' ? SnapshotCache(d) : SnapshotCache();
  }

  static std::string key(const FESpace& s, const CaseDefinition& c, const ParamVec& mu) {
    char buf[160];
    std::string k = c.name;
    std::snprintf(buf, sizeof(buf), "|d%d|%zux%zu|p%d|q%zu", s.dim, static_cast<std::size_t>(s.nx),
                  static_cast<std::size_t>(s.ny), s.p, static_cast<std::size_t>(s.quad_order));
    k += buf;
    for (double m : mu) {
      std::snprintf(buf, sizeof(buf), "|%.17g", m);
      k += buf;
    }
    return k;
  }

  bool lookup(const std::string& key, Vector& out) {
    auto it = mem_.find(key);
    if (it != mem_.end()) {
      out = it->second;
      return true;
    }
    if (dir_.empty()) return false;
    const std::filesystem::path p = path_for(key);
    if (!std::filesystem::exists(p)) return false;
    out = read_romx_vector(p.string());
    mem_[key] = out;
    return true;
  }

  void store(const std::string& key, const Vector& v) {
    mem_[key] = v;
    if (!dir_.empty()) write_romx(path_for(key).string(), v);
  }

 private:
  std::filesystem::path path_for(const std::string& key) const {
    return std::filesystem::path(dir_) / (hex64(fnv1a64(key)) + ".romx");
  }

  std::string dir_;
  std::map<std::string, Vector> mem_;
};

struct SnapshotSet {
  std::vector<ParamVec> mu;
  std::vector<Vector> fields;  // full nodal solutions, one per parameter
};

inline Vector compute_snapshot(const FESpace& s, const CaseDefinition& c,
                               const AffineOperators& ops, const ParamVec& mu,
                               SnapshotCache* cache = nullptr) {
  const std::string key = cache != nullptr ? SnapshotCache::key(s, c, mu) : std::string();
  Vector u;
  if (cache != nullptr && cache->lookup(key, u)) return u;
  u = fom_newton_solve(s, c, ops, mu).u;
  if (cache != nullptr) cache->store(key, u);
  return u;
}

inline SnapshotSet compute_snapshots(const FESpace& s, const CaseDefinition& c,
                                     const AffineOperators& ops,
                                     const std::vector<ParamVec>& mus,
                                     SnapshotCache* cache = nullptr) {
  SnapshotSet set;
  set.mu = mus;
  set.fields.reserve(mus.size());
  for (const ParamVec& mu : mus) set.fields.push_back(compute_snapshot(s, c, ops, mu, cache));
  return set;
}

}  // namespace hyperrom
