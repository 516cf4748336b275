// SPDX-License-Identifier: Apache-2.0

#ifndef HYPERROM_NUMERICS_QUADRATURE_HPP
#define HYPERROM_NUMERICS_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "hyperrom/errors.hpp"

namespace hyperrom {

// Gauss-Legendre rule on [-1, 1]; exact for polynomials up to degree 2n-1.
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
};

inline QuadratureRule gauss_legendre_rule(std::size_t n) {
  if (n < 1 || n > 32) throw UnsupportedOrder("gauss_legendre_rule: n must be in [1, 32]");
  QuadratureRule rule;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const std::size_t m = (n + 1) / 2;
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 1; i <= m; ++i) {
    double z = std::cos(pi * (static_cast<double>(i) - 0.25) / (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / static_cast<double>(j);
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    if (n % 2 == 1 && i == m) z = 0.0;
    rule.points[i - 1] = -z;
    rule.points[n - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i - 1] = w;
    rule.weights[n - i] = w;
  }
  return rule;
}

}  // namespace hyperrom

#endif
