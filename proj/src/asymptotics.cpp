#include "uip/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "uip/errors.hpp"
#include "uip/rng.hpp"

namespace uip {

namespace {

void check_kernel_times(double T, double t, double s) {
  if (!(0.0 <= s && s <= t && t <= T)) throw Error(ErrorCode::InvalidTime, "kernels need 0 <= s <= t <= T");
  if (!(s < T)) throw Error(ErrorCode::SingularDenominator, "kernel denominator vanishes at s = T");
}

double rate_of(double A, double lambda) {
  if (!(A > 0.0) || !(lambda > 0.0)) throw Error(ErrorCode::InvalidParameter, "A and Lambda must be positive");
  return std::sqrt(A) / lambda;
}

}  // namespace

CeEstimate log_mean_exp_estimate(std::span<const double> exponents, double lambda, double A) {
  if (exponents.empty()) throw Error(ErrorCode::InvalidParameter, "no exponents");
  const double top = *std::max_element(exponents.begin(), exponents.end());
  if (!std::isfinite(top)) throw Error(ErrorCode::OverflowGuard, "utility exponent is not finite");
  std::vector<double> shifted(exponents.size());
  for (std::size_t i = 0; i < exponents.size(); ++i) shifted[i] = std::exp(exponents[i] - top);
  const double n = static_cast<double>(exponents.size());
  const double mean = pairwise_sum(shifted) / n;
  for (double& v : shifted) v = (v - mean) * (v - mean);
  const double var = exponents.size() > 1 ? pairwise_sum(shifted) / (n - 1.0) : 0.0;

  CeEstimate est;
  est.lambda = lambda;
  est.a_risk = A;
  est.n_paths = exponents.size();
  est.value = lambda / A * (std::log(mean) + top);
  est.std_error = lambda / A * std::sqrt(var) / (mean * std::sqrt(n));
  if (!std::isfinite(est.value)) throw Error(ErrorCode::OverflowGuard, "certainty equivalent is not finite");
  return est;
}

CeEstimate certainty_equivalent_mc(double A, double lambda, const BachelierModel& model, const Payoff& payoff,
                                   std::span<const double> phi0, const MonteCarloSetup& setup,
                                   std::shared_ptr<const QuadratureRule> rule) {
  const ImpactParams impact = ImpactParams::make(lambda, A);
  if (setup.n_paths == 0) throw Error(ErrorCode::InvalidParameter, "n_paths must be >= 1");
  std::vector<std::string> warnings;
  if (impact.lambda < kLambdaFloor) {
    std::ostringstream msg;
    msg << "Lambda = " << lambda << " is below the desk-scale floor " << kLambdaFloor
        << "; exponential-moment variance grows quickly";
    warnings.push_back(msg.str());
  }
  std::size_t n_steps = setup.n_steps;
  if (n_steps == 0) {
    const StepResolution res = auto_steps(A, lambda, model);
    n_steps = res.n_steps;
    if (res.capped) warnings.push_back("auto step count capped at " + std::to_string(n_steps));
  }
  const Pricer pricer(A, model, payoff, std::move(rule));
  const TrackingHedger hedger(pricer, lambda, TimeGrid::make(n_steps, model.T));
  const auto outcomes = hedge_outcomes(hedger, model, phi0, setup.n_paths, setup.seed, setup.exec);
  std::vector<double> exponents(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) exponents[i] = outcomes[i].utility_exponent;
  CeEstimate est = log_mean_exp_estimate(exponents, lambda, A);
  est.n_steps = n_steps;
  est.warnings = std::move(warnings);
  return est;
}

CeEstimate indifference_price_mc(double A, double lambda, const BachelierModel& model, const Payoff& payoff,
                                 std::span<const double> phi0, const MonteCarloSetup& setup,
                                 std::shared_ptr<const QuadratureRule> rule) {
  CeEstimate with_claim = certainty_equivalent_mc(A, lambda, model, payoff, phi0, setup, std::move(rule));
  const CeEstimate without = certainty_equivalent_mc(A, lambda, model, Payoff::zero(model.dim()), phi0, setup);
  with_claim.value -= without.value;
  with_claim.std_error = std::hypot(with_claim.std_error, without.std_error);
  return with_claim;
}

DualSpec DualSpec::zero(std::size_t d) {
  DualSpec spec;
  spec.map = [d](std::span<const double>) { return RowVec(d, 0.0); };
  spec.shift = RowVec(d, 0.0);
  spec.bounded = true;
  spec.bound = 0.0;
  spec.name = "zero";
  return spec;
}

DualSpec DualSpec::constant(RowVec y) {
  DualSpec spec;
  const std::size_t d = y.size();
  spec.map = [d](std::span<const double>) { return RowVec(d, 0.0); };
  spec.bound = norm(y);
  spec.shift = std::move(y);
  spec.bounded = true;
  spec.name = "constant";
  return spec;
}

DualSpec DualSpec::random(std::size_t d, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  RowVec c(d);
  for (double& v : c) v = 2.0 * rng.uniform() - 1.0;
  Matrix m(d, d);
  double frob = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      m(i, j) = 2.0 * rng.uniform() - 1.0;
      frob += m(i, j) * m(i, j);
    }
  DualSpec spec;
  spec.map = [m, d](std::span<const double> w) {
    RowVec y(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double squashed = std::tanh(w[i]);
      for (std::size_t j = 0; j < d; ++j) y[j] += squashed * m(i, j);
    }
    return y;
  };
  spec.bound = norm(c) + std::sqrt(static_cast<double>(d) * frob);
  spec.shift = std::move(c);
  spec.bounded = true;
  spec.name = "random_" + std::to_string(index);
  return spec;
}

RowVec DualSpec::operator()(std::span<const double> w) const {
  RowVec y = map(w);
  if (!shift.empty()) {
    if (shift.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "dual shift dimension");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift[i];
  }
  return y;
}

DualEstimate dual_lower_bound(double A, const BachelierModel& model, const Payoff& payoff,
                              std::span<const double> phi0, const DualSpec& spec,
                              std::shared_ptr<const QuadratureRule> rule, const Execution& exec) {
  if (!(A > 0.0)) throw Error(ErrorCode::InvalidParameter, "A must be positive");
  const std::size_t d = model.dim();
  if (phi0.size() != d) throw Error(ErrorCode::DimensionMismatch, "Phi0 dimension");
  const Matrix& sigma = model.sigma.entries();
  const Matrix sigma_inv = inverse(model.sigma).entries();
  const double sqrt_t = std::sqrt(model.T);
  const double sqrt_a = std::sqrt(A);

  auto integrand = [&](std::span<const double> z) {
    RowVec w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = sqrt_t * z[i];
    const RowVec y = spec(w);
    if (y.size() != d) throw Error(ErrorCode::DimensionMismatch, "dual map output dimension");
    RowVec x = model.s0;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < d; ++i) x[j] += w[i] * sigma(i, j);
      x[j] -= y[j];
    }
    return payoff(x) + dot(phi0, y) - quad_form(y, sigma_inv) / (2.0 * sqrt_a);
  };

  const bool defaulted = !rule;
  if (defaulted) rule = std::make_shared<const QuadratureRule>(default_rule(d));
  if (rule->dim != d) throw Error(ErrorCode::DimensionMismatch, "quadrature rule dimension");

  DualEstimate est;
  est.method = rule->kind;
  if (rule->kind == "antithetic_mc") {
    // Pair averages are iid; their spread gives the standard error.
    const std::size_t pairs = rule->size() / 2;
    std::vector<double> pair_means(pairs);
    parallel_for(exec, pairs, [&](std::size_t i) {
      pair_means[i] = 0.5 * (integrand(rule->node(2 * i)) + integrand(rule->node(2 * i + 1)));
    });
    const double mean = pairwise_sum(pair_means) / static_cast<double>(pairs);
    for (double& v : pair_means) v = (v - mean) * (v - mean);
    const double var = pairs > 1 ? pairwise_sum(pair_means) / static_cast<double>(pairs - 1) : 0.0;
    est.value = mean;
    est.error = std::sqrt(var / static_cast<double>(pairs));
    return est;
  }
  est.value = integrate(*rule, integrand, exec);
  if (defaulted && d <= 3) {
    const int panels[] = {0, 500, 50, 12};
    const int points = d == 1 ? 8 : 4;
    const QuadratureRule coarse = build_composite_normal(panels[d], points, static_cast<int>(d));
    est.error = std::abs(est.value - integrate(coarse, integrand, exec));
  }
  return est;
}

DualSpec optimal_dual_Y(double A, const BachelierModel& model, const Payoff& payoff, std::span<const double> phi0,
                        double eps, SupConvolutionConfig cfg) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParameter, "eps must be positive");
  const std::size_t d = model.dim();
  if (phi0.size() != d) throw Error(ErrorCode::DimensionMismatch, "Phi0 dimension");
  auto sup = std::make_shared<const SupConvolution>(payoff, A, model.sigma, cfg);
  RowVec shift = row_vec_mul(phi0, model.sigma.entries());
  for (double& v : shift) v *= std::sqrt(A);
  RowVec base = model.s0;
  for (std::size_t i = 0; i < d; ++i) base[i] -= shift[i];
  const Matrix sigma = model.sigma.entries();

  DualSpec spec;
  spec.name = "optimal";
  spec.shift = shift;
  spec.map = [sup, base, sigma](std::span<const double> w) {
    RowVec x = base;
    for (std::size_t j = 0; j < x.size(); ++j)
      for (std::size_t i = 0; i < x.size(); ++i) x[j] += w[i] * sigma(i, j);
    RowVec y = sup->argmax(x);
    for (double& v : y) v = -v;
    return y;
  };
  spec.bounded = true;
  if (payoff.is_basket_call()) {
    spec.bound = std::sqrt(A) * norm(row_vec_mul(payoff.basket().a, sigma)) + norm(shift);
  } else {
    spec.bound = std::sqrt(static_cast<double>(d)) * sup->search_radius() + norm(shift);
  }
  return spec;
}

Matrix kernel_K(double A, double lambda, const SpdMatrix& sigma, double T, double t, double s) {
  check_kernel_times(T, t, s);
  const double c = rate_of(A, lambda);
  return ratio_function(sigma, {ScaledFunction::Kind::Cosh, c * (T - t)}, {ScaledFunction::Kind::Sinh, c * (T - s)});
}

Matrix kernel_G(double A, double lambda, const SpdMatrix& sigma, double T, double t) {
  check_kernel_times(T, t, 0.0);
  const double c = rate_of(A, lambda);
  return ratio_function(sigma, {ScaledFunction::Kind::Sinh, c * (T - t)}, {ScaledFunction::Kind::Sinh, c * T});
}

Matrix kernel_L(double A, double lambda, const SpdMatrix& sigma, double T, double t, double s) {
  check_kernel_times(T, t, s);
  const double c = rate_of(A, lambda);
  return ratio_function(sigma, {ScaledFunction::Kind::Sinh, c * (T - t)}, {ScaledFunction::Kind::Sinh, c * (T - s)});
}

Matrix kernel_limit_integral(double A, double lambda, const SpdMatrix& sigma, double T, double s, KernelKind which) {
  check_kernel_times(T, s, s);
  const double rate = rate_of(A, lambda);
  const double tau = T - s;
  std::vector<double> diag(sigma.dim());
  for (std::size_t i = 0; i < sigma.dim(); ++i) {
    const double c = rate * sigma.eigenvalues()[i];
    const double x = c * tau;
    // 1 - e^{-2x}, 1/sinh^2(x) and coth(x) without overflow.
    const double one_minus = -std::expm1(-2.0 * x);
    const double inv_sinh_sq = 4.0 * std::exp(-2.0 * x) / (one_minus * one_minus);
    const double coth = (2.0 - one_minus) / one_minus;
    const double boundary = 0.5 * tau * inv_sinh_sq;
    const double bulk = coth / (2.0 * c);
    diag[i] = (which == KernelKind::K ? bulk + boundary : bulk - boundary) / (2.0 * lambda);
    if (!std::isfinite(diag[i])) throw Error(ErrorCode::NonFiniteResult, "kernel integral overflow");
  }
  return from_spectrum(sigma, diag);
}

Matrix kernel_limit_target(double A, const SpdMatrix& sigma) {
  if (!(A > 0.0)) throw Error(ErrorCode::InvalidParameter, "A must be positive");
  return (1.0 / (4.0 * std::sqrt(A))) * inverse(sigma).entries();
}

}  // namespace uip
