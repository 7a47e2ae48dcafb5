#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"
#include "uip/errors.hpp"
#include "uip/linalg_spd.hpp"

using namespace uip;

TEST_CASE("make_spd on diagonal and identity inputs") {
  const SpdMatrix id = make_spd(Matrix::identity(2));
  CHECK(id.eigenvalues()[0] == doctest::Approx(1.0));
  CHECK(id.eigenvalues()[1] == doctest::Approx(1.0));
  const SpdMatrix diag = make_spd(Matrix{{2, 0}, {0, 3}});
  CHECK(diag.eigenvalues()[0] == doctest::Approx(2.0));
  CHECK(diag.eigenvalues()[1] == doctest::Approx(3.0));
}

TEST_CASE("make_spd rejects indefinite and asymmetric input") {
  const auto [lo, hi] = oracle::eig2(1, 2, 1);
  CHECK(lo == doctest::Approx(-1.0));
  CHECK(hi == doctest::Approx(3.0));
  CHECK(error_code_of([] { make_spd(Matrix{{1, 2}, {2, 1}}); }) == ErrorCode::NotPositiveDefinite);
  CHECK(error_code_of([] { make_spd(Matrix{{1, 0.5}, {0.4, 1}}); }) == ErrorCode::NotSymmetric);
  CHECK(error_code_of([] { make_spd(Matrix{{1, 0}, {0, 0}}); }) == ErrorCode::NotPositiveDefinite);
}

TEST_CASE("eigen-decomposition matches the 2x2 formula") {
  const SpdMatrix m = make_spd(Matrix{{2, 0.7}, {0.7, 1.3}});
  const auto [lo, hi] = oracle::eig2(2, 0.7, 1.3);
  CHECK(m.eigenvalues()[0] == doctest::Approx(lo).epsilon(1e-13));
  CHECK(m.eigenvalues()[1] == doctest::Approx(hi).epsilon(1e-13));
}

TEST_CASE("spectral invariants on random SPD matrices") {
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const SpdMatrix m = random_spd(d, trial);
    const Matrix& q = m.eigenvectors();
    CHECK(max_abs_diff(transpose(q) * q, Matrix::identity(d)) <= 1e-10);
    const Matrix rebuilt = from_spectrum(m, m.eigenvalues());
    CHECK(max_abs_diff(rebuilt, m.entries()) <= 1e-10 * m.entries().max_abs());
    CHECK(max_abs_diff(inverse(m).entries() * m.entries(), Matrix::identity(d)) <= 1e-10);
  }
}

TEST_CASE("hyperbolic identity on random SPD matrices") {
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const SpdMatrix m = random_spd(d, 100 + trial);
    const Matrix ch = apply_scalar_function(m, [](double x) { return std::cosh(x); });
    const Matrix sh = apply_scalar_function(m, [](double x) { return std::sinh(x); });
    CHECK(max_abs_diff(ch * ch - sh * sh, Matrix::identity(d)) <= 1e-9);
  }
}

TEST_CASE("apply_scalar_function examples") {
  const SpdMatrix ln2 = make_spd(Matrix{{std::log(2.0), 0}, {0, std::log(2.0)}});
  CHECK(max_abs_diff(apply_scalar_function(ln2, [](double x) { return std::exp(x); }), Matrix{{2, 0}, {0, 2}}) <=
        1e-14);
  const SpdMatrix d12 = make_spd(Matrix{{1, 0}, {0, 2}});
  const Matrix sh = apply_scalar_function(d12, [](double x) { return std::sinh(x); });
  CHECK(sh(0, 0) == doctest::Approx(1.1752012).epsilon(1e-7));
  CHECK(sh(1, 1) == doctest::Approx(3.6268604).epsilon(1e-7));
  CHECK(error_code_of([&] { apply_scalar_function(d12, [](double x) { return std::exp(1000.0 * x); }); }) ==
        ErrorCode::NonFiniteResult);
}

TEST_CASE("cosh of the zero spectrum") {
  // A 1x1 SPD matrix cannot hold 0; use scale 0 instead.
  const SpdMatrix one = make_spd(Matrix{{1}});
  CHECK(ratio_function(one, {ScaledFunction::Kind::Cosh, 0.0}, {ScaledFunction::Kind::Exp, 0.0})(0, 0) ==
        doctest::Approx(1.0));
  CHECK(apply_scalar_function(one, [](double x) { return std::cosh(0.0 * x); })(0, 0) == 1.0);
}

TEST_CASE("ratio_function scalar examples and stability") {
  const SpdMatrix one = make_spd(Matrix{{1}});
  using K = ScaledFunction::Kind;
  CHECK(ratio_function(one, {K::Cosh, 0.0}, {K::Sinh, 1.0})(0, 0) ==
        doctest::Approx(std::cosh(0.0) / std::sinh(1.0)).epsilon(1e-14));
  CHECK(std::cosh(0.0) / std::sinh(1.0) == doctest::Approx(0.8509181).epsilon(1e-7));
  const double far = ratio_function(one, {K::Cosh, 400.0}, {K::Sinh, 420.0})(0, 0);
  CHECK(std::isfinite(far));
  CHECK(far == doctest::Approx(std::exp(-20.0)).epsilon(1e-12));
  CHECK(far == doctest::Approx(2.0612e-9).epsilon(1e-4));
  const SpdMatrix m = random_spd(3, 7);
  CHECK(max_abs_diff(ratio_function(m, {K::Sinh, 2.5}, {K::Sinh, 2.5}), Matrix::identity(3)) <= 1e-14);
  CHECK(error_code_of([&] { ratio_function(m, {K::Cosh, 1.0}, {K::Sinh, 0.0}); }) == ErrorCode::SingularDenominator);
}

TEST_CASE("ratio_function agrees with the direct product where it does not overflow") {
  using K = ScaledFunction::Kind;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 4;
    const SpdMatrix m = random_spd(d, 200 + trial);
    const double a = 0.3 + 0.1 * static_cast<double>(trial % 5);
    const double b = 0.9;
    const Matrix num = apply_scalar_function(m, [a](double x) { return std::cosh(a * x); });
    const Matrix den = apply_scalar_function(m, [b](double x) { return 1.0 / std::sinh(b * x); });
    CHECK(max_abs_diff(ratio_function(m, {K::Cosh, a}, {K::Sinh, b}), num * den) <= 1e-9);
  }
}

TEST_CASE("inverse, products and quadratic forms") {
  const SpdMatrix d24 = make_spd(Matrix{{2, 0}, {0, 4}});
  CHECK(max_abs_diff(inverse(d24).entries(), Matrix{{0.5, 0}, {0, 0.25}}) <= 1e-15);
  const double one_one[] = {1, 1};
  const double one_two[] = {1, 2};
  CHECK(quad_form(one_one, Matrix::identity(2)) == doctest::Approx(2.0));
  CHECK(quad_form(one_two, Matrix{{2, 1}, {1, 3}}) == doctest::Approx(18.0));
  const RowVec v = row_vec_mul(one_two, Matrix{{2, 1}, {1, 3}});
  CHECK(v[0] == doctest::Approx(4.0));
  CHECK(v[1] == doctest::Approx(7.0));
  const double three[] = {1, 2, 3};
  CHECK(error_code_of([&] { quad_form(three, Matrix::identity(2)); }) == ErrorCode::DimensionMismatch);
  CHECK(error_code_of([&] { row_vec_mul(three, Matrix::identity(2)); }) == ErrorCode::DimensionMismatch);
}
