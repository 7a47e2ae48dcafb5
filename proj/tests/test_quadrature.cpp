#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "uip/quadrature.hpp"

using namespace uip;

namespace {

void check_moments(const QuadratureRule& rule, double tol) {
  double mass = 0.0;
  std::vector<double> first(rule.dim, 0.0);
  std::vector<double> second(rule.dim * rule.dim, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto z = rule.node(i);
    mass += rule.weights[i];
    for (std::size_t a = 0; a < rule.dim; ++a) {
      first[a] += rule.weights[i] * z[a];
      for (std::size_t b = 0; b < rule.dim; ++b) second[a * rule.dim + b] += rule.weights[i] * z[a] * z[b];
    }
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t a = 0; a < rule.dim; ++a) {
    CHECK(std::abs(first[a]) <= tol);
    for (std::size_t b = 0; b < rule.dim; ++b) CHECK(std::abs(second[a * rule.dim + b] - (a == b ? 1.0 : 0.0)) <= tol);
  }
}

}  // namespace

TEST_CASE("two-point Hermite rule") {
  const QuadratureRule r = build_gauss_hermite(2, 1);
  REQUIRE(r.size() == 2);
  CHECK(r.nodes[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r.nodes[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("rule moments") {
  for (int m : {2, 5, 16, 64}) check_moments(build_gauss_hermite(m, 1), 1e-10);
  check_moments(build_gauss_hermite(8, 3), 1e-10);
  check_moments(build_composite_normal(100, 4, 2), 1e-10);
  check_moments(default_rule(1), 1e-10);
}

TEST_CASE("Hermite rule is exact for high-degree polynomials") {
  // E[Z^8] = 105, needs m >= 5.
  const QuadratureRule r = build_gauss_hermite(5, 1);
  double v = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) v += r.weights[i] * std::pow(r.nodes[i], 8);
  CHECK(v == doctest::Approx(105.0).epsilon(1e-12));
}

TEST_CASE("kinked integrand: Hermite stalls, composite converges") {
  const double exact = oracle::call_unit(0.5);
  CHECK(exact == doctest::Approx(0.6977965).epsilon(1e-7));
  auto f = [](std::span<const double> z) { return std::max(z[0] + 0.5, 0.0); };
  const double hermite = integrate(build_gauss_hermite(64, 1), f);
  // The kink limits Gauss-Hermite to roughly 1e-4 accuracy at m = 64.
  CHECK(std::abs(hermite - exact) < 1e-3);
  CHECK(std::abs(hermite - exact) > 1e-6);
  CHECK(std::abs(integrate(default_rule(1), f) - exact) <= 1e-6);
}

TEST_CASE("node budget") {
  CHECK(error_code_of([] { build_gauss_hermite(64, 4); }) == ErrorCode::BudgetExceeded);
  CHECK(error_code_of([] { build_gauss_hermite(10, 6, 1000); }) == ErrorCode::BudgetExceeded);
}

TEST_CASE("antithetic rule is symmetric") {
  const QuadratureRule r = build_antithetic_mc(1000, 4, 5);
  CHECK(r.size() == 2000);
  for (std::size_t i = 0; i < r.size(); i += 2)
    for (std::size_t j = 0; j < 4; ++j) CHECK(r.node(i)[j] == -r.node(i + 1)[j]);
}

TEST_CASE("interval rule") {
  const QuadratureRule r = build_interval_rule(4, 6, 0.0, 2.0);
  double v = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) v += r.weights[i] * std::exp(r.nodes[i]);
  CHECK(v == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("integrate is backend independent") {
  const QuadratureRule r = build_composite_normal(50, 4, 2);
  auto f = [](std::span<const double> z) { return std::max(z[0] - 0.3 * z[1], 0.0) + std::sin(z[1]); };
  const double serial = integrate(r, f, Execution::serial());
  for (int w : {1, 2, 8}) CHECK(integrate(r, f, Execution::openmp(w)) == serial);
}
