#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "uip/market_model.hpp"
#include "uip/quadrature.hpp"

using namespace uip;

TEST_CASE("payoff_eval examples") {
  const Payoff call = atm_call();
  const double ten[] = {10.0};
  const double five[] = {5.0};
  CHECK(payoff_eval(call, ten) == 2.0);
  CHECK(payoff_eval(call, five) == 0.0);
  const Payoff spread = Payoff::basket_call({1.0, -1.0}, 0.0);
  const double x[] = {3.0, 1.0};
  CHECK(payoff_eval(spread, x) == 2.0);
  CHECK(spread.lipschitz_constant() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("model and parameter validation") {
  CHECK(error_code_of([] { BachelierModel::make({1.0}, {0.0}, make_spd(Matrix{{1.0}}), 0.0); }) ==
        ErrorCode::InvalidParameter);
  CHECK(error_code_of([] { BachelierModel::make({1.0, 2.0}, {0.0}, make_spd(Matrix{{1.0}}), 1.0); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(error_code_of([] { ImpactParams::make(0.0, 1.0); }) == ErrorCode::InvalidParameter);
  CHECK(ImpactParams::make(0.1, 1.0).alpha() == doctest::Approx(10.0));
  const TimeGrid grid = TimeGrid::make(3, 1.0);
  CHECK(grid.knot(0) == 0.0);
  CHECK(grid.knot(3) == 1.0);
}

TEST_CASE("simulated paths obey the affine price relation") {
  const BachelierModel model = BachelierModel::make({1.0, 2.0}, {0.3, -0.1}, random_spd(2, 3), 2.0);
  const TimeGrid grid = TimeGrid::make(50, model.T);
  const SimulatedPath path = simulate_path(model, grid, 9, 4);
  for (std::size_t j = 0; j < 2; ++j) CHECK(path.w_at(0)[j] == 0.0);
  for (std::size_t k = 0; k <= grid.n_steps; ++k) {
    const RowVec ws = row_vec_mul(path.w_at(k), model.sigma.entries());
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(path.s_at(k)[j] == doctest::Approx(model.s0[j] + model.mu[j] * grid.knot(k) + ws[j]).epsilon(1e-14));
    }
  }
}

TEST_CASE("terminal moments of one-step paths") {
  const SpdMatrix sigma = make_spd(Matrix{{1.0, 0.3}, {0.3, 0.8}});
  const BachelierModel model = BachelierModel::make({0.0, 0.0}, {0.0, 0.0}, sigma, 1.5);
  const TimeGrid grid = TimeGrid::make(1, model.T);
  const std::size_t n = 100000;
  const auto paths = simulate_paths(model, grid, n, 11, Execution::openmp());
  double m0 = 0, m1 = 0, c00 = 0, c01 = 0, c11 = 0;
  for (const auto& p : paths) {
    const auto s = p.s_at(1);
    m0 += s[0];
    m1 += s[1];
    c00 += s[0] * s[0];
    c01 += s[0] * s[1];
    c11 += s[1] * s[1];
  }
  m0 /= n;
  m1 /= n;
  const Matrix cov = model.T * (sigma.entries() * sigma.entries());
  CHECK(std::abs(m0) <= 3.0 * std::sqrt(cov(0, 0) / n));
  CHECK(std::abs(m1) <= 3.0 * std::sqrt(cov(1, 1) / n));
  // Sample second moments: SE of E[XY] is sqrt(var(XY) / n) <= sqrt(2 c c / n).
  CHECK(std::abs(c00 / n - cov(0, 0)) <= 3.0 * std::sqrt(2.0 * cov(0, 0) * cov(0, 0) / n));
  CHECK(std::abs(c11 / n - cov(1, 1)) <= 3.0 * std::sqrt(2.0 * cov(1, 1) * cov(1, 1) / n));
  CHECK(std::abs(c01 / n - cov(0, 1)) <= 3.0 * std::sqrt((cov(0, 0) * cov(1, 1) + cov(0, 1) * cov(0, 1)) / n));
}

TEST_CASE("drift shows up in the terminal mean") {
  const BachelierModel model = BachelierModel::make({8.0}, {2.0}, make_spd(Matrix{{1.0}}), 1.0);
  const auto paths = simulate_paths(model, TimeGrid::make(4, 1.0), 100000, 5);
  double mean = 0.0;
  for (const auto& p : paths) mean += p.s_at(4)[0];
  mean /= 100000.0;
  CHECK(std::abs(mean - 10.0) <= 3.0 / std::sqrt(100000.0));
}

TEST_CASE("fixed seed gives bit-identical paths") {
  const BachelierModel model = atm_model();
  const TimeGrid grid = TimeGrid::make(20, 1.0);
  const auto a = simulate_paths(model, grid, 64, 77, Execution::serial());
  const auto b = simulate_paths(model, grid, 64, 77, Execution::openmp(3));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].s == b[i].s);
  const auto c = simulate_paths(model, grid, 64, 78);
  CHECK(a[0].s != c[0].s);
}

TEST_CASE("sup-convolution closed form examples") {
  const SpdMatrix one = make_spd(Matrix{{1.0}});
  const double eight[] = {8.0};
  const double six[] = {6.0};
  CHECK(sup_convolve_g(atm_call(), 1.0, one, eight) == doctest::Approx(0.5));
  CHECK(sup_convolve_g(atm_call(), 1.0, one, six) == 0.0);
  CHECK(g_argmax(atm_call(), 1.0, one, eight, 1e-9)[0] == doctest::Approx(1.0));
  const Payoff zero = Payoff::generic([](std::span<const double>) { return 0.0; }, 0.0, "zero");
  CHECK(sup_convolve_g(zero, 3.0, one, eight) == 0.0);
  CHECK(g_argmax(zero, 3.0, one, eight, 1e-9)[0] == 0.0);
  const SpdMatrix d14 = make_spd(Matrix{{1.0, 0.0}, {0.0, 4.0}});
  const double x[] = {1.0, 1.0};
  const RowVec y = g_argmax(Payoff::basket_call({1.0, 0.0}, 0.0), 4.0, d14, x, 1e-9);
  CHECK(y[0] == doctest::Approx(2.0));
  CHECK(y[1] == doctest::Approx(0.0));
  CHECK(error_code_of([&] { sup_convolve_g(atm_call(), 0.0, one, eight); }) == ErrorCode::InvalidParameter);
  CHECK(error_code_of([&] { g_argmax(atm_call(), 1.0, one, eight, 0.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("generic search agrees with a brute-force scan") {
  const SpdMatrix s = make_spd(Matrix{{1.3}});
  // A non-concave Lipschitz payoff: two kinks plus a bump.
  auto f = [](double x) { return std::abs(x - 1.0) - 0.5 * std::abs(x + 2.0) + 0.3 * std::sin(x); };
  const Payoff payoff = Payoff::generic([f](std::span<const double> x) { return f(x[0]); }, 1.8, "bumpy");
  const SupConvolution sup(payoff, 0.7, s);
  for (double x = -5.0; x <= 5.0; x += 0.37) {
    const double xv[] = {x};
    const double ref = oracle::sup_convolution_1d(f, 0.7, 1.3, x, sup.search_radius());
    CHECK(sup.value(xv) == doctest::Approx(ref).epsilon(1e-6));
    const RowVec y = sup.argmax(xv);
    CHECK(sup.objective(xv, y) >= sup.value(xv) - 1e-12);
  }
}

TEST_CASE("sup-convolution properties on random samples") {
  const SpdMatrix sigma = random_spd(2, 21);
  const Payoff straddle = Payoff::generic(
      [](std::span<const double> x) { return std::abs(x[0] - 0.5 * x[1] + 0.2); }, std::sqrt(1.25), "straddle");
  CounterRng rng(3, 3);
  for (int i = 0; i < 200; ++i) {
    const double x[] = {4.0 * rng.normal(), 4.0 * rng.normal()};
    const double x2[] = {x[0] + rng.normal(), x[1] + rng.normal()};
    const double a1 = 0.1 + 3.0 * rng.uniform();
    const double a2 = a1 + 0.05 + rng.uniform();
    const SupConvolution g1(straddle, a1, sigma);
    const SupConvolution g2(straddle, a2, sigma);
    CHECK(g1.value(x) >= straddle(x) - 1e-12);
    CHECK(g1.value(x) <= g2.value(x) + 1e-9);
    const double dist = std::hypot(x[0] - x2[0], x[1] - x2[1]);
    CHECK(std::abs(g1.value(x) - g1.value(x2)) <= straddle.lipschitz_constant() * dist + 1e-6);
  }
}
