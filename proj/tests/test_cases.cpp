// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hyperrom/cases.hpp"

using namespace hyperrom;

namespace {

// central finite difference of a derivative slot, one order lower in u
double fd_u(const CaseDefinition& c, const std::string& tag, int du, const MuIndex& dmu,
            double u, const ParamVec& mu, double h) {
  return (eval_nonlinear(c, tag, du - 1, dmu, u + h, mu) -
          eval_nonlinear(c, tag, du - 1, dmu, u - h, mu)) /
         (2.0 * h);
}

double fd_mu(const CaseDefinition& c, const std::string& tag, int du, MuIndex dmu, int comp,
             double u, ParamVec mu, double h) {
  dmu[comp] -= 1;
  ParamVec up = mu, dn = mu;
  up[comp] += h;
  dn[comp] -= h;
  return (eval_nonlinear(c, tag, du, dmu, u, up) - eval_nonlinear(c, tag, du, dmu, u, dn)) /
         (2.0 * h);
}

void check_all_derivatives(const CaseDefinition& c, const std::string& tag, double u,
                           const ParamVec& mu, double tol) {
  for (int du = 0; du <= 3; ++du) {
    for (int a = 0; a + du <= 3; ++a) {
      for (int b = 0; a + b + du <= 3; ++b) {
        if (c.n_param < 2 && b > 0) continue;
        const MuIndex dmu{a, b};
        const double v = eval_nonlinear(c, tag, du, dmu, u, mu);
        const double scale = std::max(1.0, std::abs(v));
        if (du >= 1) {
          const double fd = fd_u(c, tag, du, dmu, u, mu, 1e-5);
          REQUIRE(std::abs(v - fd) < tol * std::max(scale, std::abs(fd)));
        }
        if (a >= 1) {
          const double fd = fd_mu(c, tag, du, dmu, 0, u, mu, 1e-5);
          REQUIRE(std::abs(v - fd) < tol * std::max(scale, std::abs(fd)));
        }
        if (b >= 1) {
          const double fd = fd_mu(c, tag, du, dmu, 1, u, mu, 1e-5);
          REQUIRE(std::abs(v - fd) < tol * std::max(scale, std::abs(fd)));
        }
      }
    }
  }
}

}  // namespace

TEST_CASE("get_case knows exactly three cases") {
  REQUIRE(get_case("analytic1d").dim == 1);
  REQUIRE(get_case("elliptic2d").dim == 2);
  REQUIRE(get_case("cdr2d").dim == 2);
  REQUIRE_THROWS_AS(get_case("unknown"), UnknownCase);
}

TEST_CASE("case metadata matches the problem statements") {
  const CaseDefinition a = get_case("analytic1d");
  REQUIRE(a.n_param == 1);
  REQUIRE(a.domain_hi[0] == 2.0);
  REQUIRE(a.param_hi[0] == 10.0);
  REQUIRE(a.theta.empty());
  REQUIRE(a.has_g);
  REQUIRE(a.f.empty());
  REQUIRE(a.has_analytic_solution);

  const CaseDefinition e = get_case("elliptic2d");
  REQUIRE(e.n_param == 2);
  REQUIRE(e.theta.size() == 1);
  REQUIRE(e.theta[0]({3.0, 3.0}) == 1.0);
  REQUIRE(e.param_lo[0] == 1.0);
  REQUIRE(std::abs(e.param_hi[1] - 2.0 * 3.14159265358979323846) < 1e-14);
  REQUIRE(e.f.empty());
  REQUIRE(e.has_output);

  const CaseDefinition r = get_case("cdr2d");
  REQUIRE(r.param_lo[0] == 0.0);
  REQUIRE(r.param_hi[0] == 20.0);
  REQUIRE(r.f.size() == 2);
}

TEST_CASE("pointwise values match hand evaluation") {
  const CaseDefinition e = get_case("elliptic2d");
  // g(0, mu) = mu1 since sin(0) = 0
  REQUIRE(std::abs(eval_nonlinear(e, "g", 0, {0, 0}, 0.0, {2.0, 3.0}) - 2.0) < 1e-15);
  // g(u) = mu1 exp(sin(mu2 u))
  const double v = eval_nonlinear(e, "g", 0, {0, 0}, 0.7, {1.5, 2.0});
  REQUIRE(std::abs(v - 1.5 * std::exp(std::sin(1.4))) < 1e-14);
  REQUIRE(std::abs(e.load(0.25, 0.0) - 100.0) < 1e-12);

  const CaseDefinition r = get_case("cdr2d");
  const double two_pi = 6.28318530717958647692;
  REQUIRE(std::abs(eval_nonlinear(r, "g", 0, {0, 0}, 0.0, {5.0, 5.0}) + two_pi) < 1e-14);
  REQUIRE(std::abs(eval_nonlinear(r, "f1", 0, {0, 0}, 3.0, {5.0, 7.0}) + 45.0) < 1e-12);
  REQUIRE(std::abs(eval_nonlinear(r, "f2", 0, {0, 0}, 3.0, {5.0, 7.0}) + 63.0) < 1e-12);

  const CaseDefinition a = get_case("analytic1d");
  REQUIRE(eval_nonlinear(a, "g", 0, {0, 0}, 0.0, {1.0}) == 0.0);
  REQUIRE(std::abs(eval_nonlinear(a, "g", 0, {0, 0}, 1.0, {1.0}) - 0.75) < 1e-15);
}

TEST_CASE("derivatives are consistent with finite differences") {
  check_all_derivatives(get_case("analytic1d"), "g", 0.8, {4.0}, 2e-7);
  check_all_derivatives(get_case("elliptic2d"), "g", 0.6, {2.5, 3.5}, 2e-6);
  check_all_derivatives(get_case("cdr2d"), "g", 0.3, {6.0, 11.0}, 2e-6);
  check_all_derivatives(get_case("cdr2d"), "f1", 0.4, {6.0, 11.0}, 2e-7);
  check_all_derivatives(get_case("cdr2d"), "f2", -0.2, {6.0, 11.0}, 2e-7);
}

TEST_CASE("derivative orders above three are rejected") {
  const CaseDefinition e = get_case("elliptic2d");
  REQUIRE_THROWS_AS(eval_nonlinear(e, "g", 4, {0, 0}, 0.5, {2.0, 2.0}), DerivativeUnavailable);
  REQUIRE_THROWS_AS(eval_nonlinear(e, "g", 2, {1, 1}, 0.5, {2.0, 2.0}), DerivativeUnavailable);
  REQUIRE_THROWS_AS(eval_nonlinear(e, "f1", 0, {0, 0}, 0.5, {2.0, 2.0}), MissingSystem);
}

TEST_CASE("analytic 1d solution is stable across the whole box") {
  // u(x, mu) = x / ((mu+1)(1 + sqrt((mu+1)/exp(62.5)) exp(125 x^2/(mu+1))))
  REQUIRE(analytic_solution_1d(0.0, 5.0) == 0.0);
  // near x = 0 the exponential term is ~ exp(-31) and drops out
  REQUIRE(std::abs(analytic_solution_1d(0.1, 1.0) - 0.05) < 1e-8);
  // at the far corner the value underflows gracefully but stays finite
  const double far = analytic_solution_1d(2.0, 10.0);
  REQUIRE(far > 0.0);
  REQUIRE(far < 1e-6);
  REQUIRE(std::isfinite(far));
  // compare against the unfused formula where it is representable
  for (double x : {0.2, 0.5, 0.9, 1.3}) {
    for (double mu : {0.0, 2.0, 10.0}) {
      const double direct =
          x / ((mu + 1.0) * (1.0 + std::sqrt((mu + 1.0) / std::exp(62.5)) *
                                       std::exp(125.0 * x * x / (mu + 1.0))));
      REQUIRE(std::abs(analytic_solution_1d(x, mu) - direct) <
              1e-12 * std::max(direct, 1e-30));
    }
  }
  // monotone decay in mu at fixed x inside the transition region
  REQUIRE(analytic_solution_1d(0.6, 0.0) < analytic_solution_1d(0.6, 10.0));
}
