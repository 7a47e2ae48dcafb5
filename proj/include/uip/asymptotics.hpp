#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "uip/hedger.hpp"
#include "uip/market_model.hpp"
#include "uip/pricer.hpp"
#include "uip/quadrature.hpp"

namespace uip {

// Below this Lambda the exponential-moment estimator loses its variance.
inline constexpr double kLambdaFloor = 0.02;

struct CeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  double lambda = 0.0;
  double a_risk = 0.0;
  std::size_t n_steps = 0;
  std::vector<std::string> warnings;
};

// (Lambda/A) log mean exp(e_i), shifted by max e for overflow safety, with
// delta-method standard error. All-equal exponents give std_error = 0.
CeEstimate log_mean_exp_estimate(std::span<const double> exponents, double lambda, double A);

struct MonteCarloSetup {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 0;  // 0: auto_steps
  std::uint64_t seed = 0;
  Execution exec{};
};

// (Lambda/A) log E[exp((A/Lambda)(f(S_T) - V_T))] along the tracking
// strategy for this Lambda.
CeEstimate certainty_equivalent_mc(double A, double lambda, const BachelierModel& model, const Payoff& payoff,
                                   std::span<const double> phi0, const MonteCarloSetup& setup,
                                   std::shared_ptr<const QuadratureRule> rule = nullptr);

// Certainty equivalent of f minus that of f == 0 on common random numbers,
// each along its own tracking strategy. The tracking family is only
// asymptotically optimal, so for finite Lambda this is an upper-bound proxy.
// The standard error adds both run errors in quadrature (ignores the
// positive correlation).
CeEstimate indifference_price_mc(double A, double lambda, const BachelierModel& model, const Payoff& payoff,
                                 std::span<const double> phi0, const MonteCarloSetup& setup,
                                 std::shared_ptr<const QuadratureRule> rule = nullptr);

// Y = map(W_T) + shift.
struct DualSpec {
  std::function<RowVec(std::span<const double>)> map;
  RowVec shift;
  bool bounded = true;
  double bound = 0.0;
  std::string name;

  static DualSpec zero(std::size_t d);
  static DualSpec constant(RowVec y);
  // Y = c + tanh(w) M with c in [-1, 1]^d and M entries in [-1, 1], drawn
  // from stream (seed, index). Bounded by |c| + sqrt(d) |M|_F.
  static DualSpec random(std::size_t d, std::uint64_t seed, std::uint64_t index);
  RowVec operator()(std::span<const double> w) const;
};

struct DualEstimate {
  double value = 0.0;
  // Standard error for Monte Carlo rules; for deterministic rules the gap
  // to the half-resolution default rule when that rule was used, else 0.
  double error = 0.0;
  std::string method;
};

// E[ f(s0 + W_T sigma - Y) + <Phi0, Y> - <Y, Y sigma^{-1}> / (2 sqrt(A)) ],
// a lower bound for the Lambda -> 0 limit of the certainty equivalent.
DualEstimate dual_lower_bound(double A, const BachelierModel& model, const Payoff& payoff,
                              std::span<const double> phi0, const DualSpec& spec,
                              std::shared_ptr<const QuadratureRule> rule = nullptr,
                              const Execution& exec = Execution::serial());

// w -> -argmax g^A(s0 - sqrt(A) Phi0 sigma + w sigma) + sqrt(A) Phi0 sigma,
// for which the dual bound attains the limit.
DualSpec optimal_dual_Y(double A, const BachelierModel& model, const Payoff& payoff, std::span<const double> phi0,
                        double eps, SupConvolutionConfig cfg = {});

// cosh(sqrt(A)(T-t) sigma/Lambda) sinh(sqrt(A)(T-s) sigma/Lambda)^{-1}
Matrix kernel_K(double A, double lambda, const SpdMatrix& sigma, double T, double t, double s);
// sinh(sqrt(A)(T-t) sigma/Lambda) sinh(sqrt(A) T sigma/Lambda)^{-1}
Matrix kernel_G(double A, double lambda, const SpdMatrix& sigma, double T, double t);
// sinh(sqrt(A)(T-t) sigma/Lambda) sinh(sqrt(A)(T-s) sigma/Lambda)^{-1}
Matrix kernel_L(double A, double lambda, const SpdMatrix& sigma, double T, double t, double s);

enum class KernelKind { K, L };

// (1 / (2 Lambda)) int_s^T kernel(t, s)^2 dt, per eigenvalue in closed form.
// Tends to sigma^{-1} / (4 sqrt(A)) as Lambda -> 0.
Matrix kernel_limit_integral(double A, double lambda, const SpdMatrix& sigma, double T, double s, KernelKind which);
Matrix kernel_limit_target(double A, const SpdMatrix& sigma);

}  // namespace uip
