#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "uip/linalg_spd.hpp"
#include "uip/parallel.hpp"

namespace uip {

// Arithmetic Brownian market S_t = s0 + mu t + W_t sigma (row vectors).
struct BachelierModel {
  RowVec s0;
  RowVec mu;
  SpdMatrix sigma;
  double T;

  // Validates dimensions and T > 0.
  static BachelierModel make(RowVec s0, RowVec mu, SpdMatrix sigma, double T);
  std::size_t dim() const noexcept { return s0.size(); }
};

// f(x) = (<a, x> + b)^+
struct BasketCall {
  RowVec a;
  double b = 0.0;
};

// Any Lipschitz payoff; `lipschitz` bounds |f(x) - f(y)| / |x - y|.
struct GenericLipschitz {
  std::function<double(std::span<const double>)> evaluate;
  double lipschitz = 0.0;
  std::string name;
};

class Payoff {
 public:
  static Payoff basket_call(RowVec a, double b);
  static Payoff generic(std::function<double(std::span<const double>)> fn, double lipschitz,
                        std::string name = "generic");
  // f == 0, stored as the basket call with a = 0, b = 0 so every
  // closed-form branch applies.
  static Payoff zero(std::size_t d);
  // The basket call routed through the generic machinery.
  static Payoff generic_basket_call(RowVec a, double b);

  bool is_basket_call() const noexcept { return std::holds_alternative<BasketCall>(v_); }
  const BasketCall& basket() const { return std::get<BasketCall>(v_); }
  const GenericLipschitz& generic_payoff() const { return std::get<GenericLipschitz>(v_); }
  double lipschitz_constant() const;
  double operator()(std::span<const double> x) const;

 private:
  explicit Payoff(std::variant<BasketCall, GenericLipschitz> v) : v_(std::move(v)) {}
  std::variant<BasketCall, GenericLipschitz> v_;
};

double payoff_eval(const Payoff& payoff, std::span<const double> x);

// Uniform knots t_k = k T / n.
struct TimeGrid {
  std::size_t n_steps;
  double T;

  static TimeGrid make(std::size_t n_steps, double T);
  double step() const noexcept { return T / static_cast<double>(n_steps); }
  double knot(std::size_t k) const noexcept {
    return k == n_steps ? T : T * static_cast<double>(k) / static_cast<double>(n_steps);
  }
};

// Brownian and price trajectories on the grid, row-major (n+1) x d.
struct SimulatedPath {
  TimeGrid grid;
  std::size_t dim;
  std::vector<double> w;
  std::vector<double> s;

  std::span<const double> w_at(std::size_t k) const {
    return std::span<const double>(w).subspan(k * dim, dim);
  }
  std::span<const double> s_at(std::size_t k) const {
    return std::span<const double>(s).subspan(k * dim, dim);
  }
};

struct ImpactParams {
  double lambda;
  double a_risk;

  static ImpactParams make(double lambda, double a_risk);
  double alpha() const noexcept { return a_risk / lambda; }
};

// Fills w and s ((n+1) x d each) for path `index` of the stream `seed`.
// Increments are exact N(0, h I) draws; s_k = s0 + mu t_k + w_k sigma.
void simulate_path_into(const BachelierModel& model, const TimeGrid& grid, std::uint64_t seed,
                        std::uint64_t index, std::span<double> w, std::span<double> s);
SimulatedPath simulate_path(const BachelierModel& model, const TimeGrid& grid, std::uint64_t seed,
                            std::uint64_t index);
std::vector<SimulatedPath> simulate_paths(const BachelierModel& model, const TimeGrid& grid,
                                          std::size_t n_paths, std::uint64_t seed,
                                          const Execution& exec = {});

struct SupConvolutionConfig {
  int grid_points = 41;  // per axis, odd so y = 0 is on the grid
  int refinement_rounds = 3;
  double shrink = 0.2;
};

// g^A(x) = sup_y [ f(x + y) - <y sigma^{-1}, y> / (2 sqrt(A)) ].
// Holds sigma^{-1} so repeated evaluations (quadrature loops) stay cheap.
class SupConvolution {
 public:
  SupConvolution(Payoff payoff, double A, const SpdMatrix& sigma, SupConvolutionConfig cfg = {});

  double value(std::span<const double> x) const;
  RowVec argmax(std::span<const double> x) const;
  // f(x + y) - penalty(y)
  double objective(std::span<const double> x, std::span<const double> y) const;
  double penalty(std::span<const double> y) const;

  const Payoff& payoff() const noexcept { return payoff_; }
  double A() const noexcept { return A_; }
  // Radius outside of which no y can beat y = 0.
  double search_radius() const noexcept { return radius_; }

 private:
  RowVec search(std::span<const double> x, double& best) const;

  Payoff payoff_;
  double A_;
  Matrix sigma_;
  Matrix sigma_inv_;
  double radius_;
  SupConvolutionConfig cfg_;
};

double sup_convolve_g(const Payoff& payoff, double A, const SpdMatrix& sigma, std::span<const double> x,
                      SupConvolutionConfig cfg = {});
RowVec g_argmax(const Payoff& payoff, double A, const SpdMatrix& sigma, std::span<const double> x,
                double eps, SupConvolutionConfig cfg = {});

}  // namespace uip
