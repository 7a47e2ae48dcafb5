#pragma once

#include <memory>
#include <span>

#include "uip/market_model.hpp"
#include "uip/quadrature.hpp"

namespace uip {

// Finite-difference steps for pde_residual: dt absolute, dx relative to
// (1 + |x|).
struct FdSteps {
  double dt = 1e-3;
  double dx_rel = 1e-3;
};

// Price of the modified claim g^A(S_T) in the frictionless Bachelier market,
//   u^A(t, x) = E[ g^A(x + W_{T-t} sigma) ],
// with its gradient and heat-equation residual. Basket calls use the
// closed-form Bachelier formula; generic payoffs integrate g^A against the
// quadrature rule.
class Pricer {
 public:
  Pricer(double A, BachelierModel model, Payoff payoff,
         std::shared_ptr<const QuadratureRule> rule = nullptr, SupConvolutionConfig sup_cfg = {},
         Execution exec = Execution::serial());

  double A() const noexcept { return A_; }
  const BachelierModel& model() const noexcept { return model_; }
  const Payoff& payoff() const noexcept { return sup_.payoff(); }
  const SupConvolution& sup_convolution() const noexcept { return sup_; }

  double price(double t, std::span<const double> x) const;
  // Quadrature route even for basket calls; used to cross-check the
  // closed form.
  double price_by_quadrature(double t, std::span<const double> x) const;

  // Central differences of price() with step fd_step (absolute). t < T.
  RowVec delta_fd(double t, std::span<const double> x, double fd_step) const;
  // a Phi(m~); basket calls only.
  RowVec delta_closed_form(double t, std::span<const double> x) const;
  // Closed form when available, central differences with the default step
  // otherwise. Writes into `out` (size d).
  void delta_into(double t, std::span<const double> x, std::span<double> out) const;
  double default_delta_step(double t, std::span<const double> x) const;

  // du/dt + tr(sigma^2 D^2 u) / 2 by finite differences.
  double pde_residual(double t, std::span<const double> x, FdSteps steps = {}) const;

  // u^A(0, s0 - sqrt(A) Phi0 sigma) + sqrt(A) <Phi0 sigma, Phi0> / 2
  double limit_value(std::span<const double> phi0) const;
  // u^A(0, s0 - sqrt(A) Phi0 sigma)
  double indifference_limit(std::span<const double> phi0) const;

 private:
  void check_time(double t, bool allow_maturity) const;
  std::shared_ptr<const QuadratureRule> rule() const;

  double A_;
  BachelierModel model_;
  SupConvolution sup_;
  std::shared_ptr<const QuadratureRule> rule_;
  Execution exec_;
  // Basket-call constants: a sigma, |a sigma|^2, b + sqrt(A)<a sigma, a>/2.
  RowVec a_sigma_;
  double a_sigma_sq_ = 0.0;
  double b_shifted_ = 0.0;
};

// Free-function forms.
double price_u(double A, const BachelierModel& model, const Payoff& payoff, double t, std::span<const double> x,
               std::shared_ptr<const QuadratureRule> rule = nullptr);
RowVec delta_u(double A, const BachelierModel& model, const Payoff& payoff, double t, std::span<const double> x,
               std::shared_ptr<const QuadratureRule> rule, double fd_step);
double pde_residual(double A, const BachelierModel& model, const Payoff& payoff, double t,
                    std::span<const double> x, std::shared_ptr<const QuadratureRule> rule = nullptr,
                    FdSteps steps = {});
double limit_value(double A, const BachelierModel& model, const Payoff& payoff, std::span<const double> phi0,
                   std::shared_ptr<const QuadratureRule> rule = nullptr);
double indifference_limit(double A, const BachelierModel& model, const Payoff& payoff,
                          std::span<const double> phi0, std::shared_ptr<const QuadratureRule> rule = nullptr);

}  // namespace uip
