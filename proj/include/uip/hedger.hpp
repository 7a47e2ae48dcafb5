#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uip/market_model.hpp"
#include "uip/pricer.hpp"

namespace uip {

struct HedgeResult {
  std::size_t dim = 0;
  std::size_t n_steps = 0;
  std::vector<double> phi_positions;  // (n+1) x d
  std::vector<double> phi_rates;      // n x d
  double terminal_wealth = 0.0;
  double payoff_value = 0.0;
  double utility_exponent = 0.0;  // (A / Lambda) (f(S_T) - V_T)
  double cost_integral = 0.0;     // (Lambda / 2) sum |phi_k|^2 h
  double sup_position_norm = 0.0;

  std::span<const double> position(std::size_t k) const {
    return std::span<const double>(phi_positions).subspan(k * dim, dim);
  }
  std::span<const double> rate(std::size_t k) const {
    return std::span<const double>(phi_rates).subspan(k * dim, dim);
  }
};

// Scalar outcome of one hedged path, used by the Monte Carlo kernels.
struct PathOutcome {
  double payoff_value = 0.0;
  double terminal_wealth = 0.0;
  double utility_exponent = 0.0;
  double cost_integral = 0.0;
  double sup_position_norm = 0.0;
  // log of the drift-corrected M(T) / M(0).
  double log_supermartingale_ratio = 0.0;
};

struct StepResolution {
  std::size_t n_steps;
  bool capped;
};

// max(1000, ceil(20 T sqrt(A) lambda_max(sigma) / Lambda)), capped at 1e5.
StepResolution auto_steps(double A, double lambda, const BachelierModel& model);

// Constant of the position bound: max(|Phi0|, L) + margin.
double position_bound(const Payoff& payoff, std::span<const double> phi0, double margin = 1.0);

// exp(-sqrt(A) tau sigma / Lambda)
Matrix relaxation_matrix(double A, double lambda, const SpdMatrix& sigma, double tau);

// Tracking ODE
//   dPhi/dt = (sqrt(A)/Lambda) (Theta_t - Phi_t) sigma,
//   Theta_t = D_x u^A(t, S_t - sqrt(A) Phi_t sigma),
// integrated with the exact step of the frozen-coefficient problem:
//   Phi_{k+1} = Theta_k + (Phi_k - Theta_k) exp(-sqrt(A) h sigma / Lambda).
class TrackingHedger {
 public:
  TrackingHedger(const Pricer& pricer, double lambda, TimeGrid grid);

  double lambda() const noexcept { return lambda_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const Matrix& step_relaxation() const noexcept { return relax_; }

  RowVec tracking_target(double t, std::span<const double> s_t, std::span<const double> phi_t) const;

  HedgeResult run(const SimulatedPath& path, std::span<const double> phi0) const;
  // Same arithmetic as run() without storing trajectories. `prices` is the
  // (n+1) x d price path.
  PathOutcome run_outcome(std::span<const double> prices, std::span<const double> phi0) const;

  // log of the drift-corrected M along the path, one value per knot.
  std::vector<double> supermartingale_exponent(const SimulatedPath& path, const HedgeResult& hedge) const;

 private:
  template <typename Recorder>
  PathOutcome integrate(std::span<const double> prices, std::span<const double> phi0, Recorder& rec) const;

  const Pricer& pricer_;
  double lambda_;
  TimeGrid grid_;
  Matrix relax_;
  Matrix sigma_;
  RowVec mu_sigma_inv_;
};

// Free-function forms.
RowVec tracking_target(const Pricer& pricer, double t, std::span<const double> s_t, std::span<const double> phi_t);
HedgeResult integrate_strategy(const Pricer& pricer, double lambda, const SimulatedPath& path,
                               std::span<const double> phi0);

// Recursive exponential steps on a given (frozen) n x d target path.
std::vector<double> integrate_frozen_targets(double A, double lambda, const SpdMatrix& sigma, const TimeGrid& grid,
                                             std::span<const double> theta_path, std::span<const double> phi0);

// Duhamel convolution
//   Phi_t = Phi0 e^{-sqrt(A) t sigma / Lambda}
//         + (sqrt(A)/Lambda) int_0^t Theta_v sigma e^{sqrt(A)(v - t) sigma / Lambda} dv
// for piecewise-constant Theta, evaluated knot by knot with directly
// computed matrix exponentials. Returns (n+1) x d positions.
std::vector<double> duhamel_solution(double A, double lambda, const SpdMatrix& sigma, const TimeGrid& grid,
                                     std::span<const double> theta_path, std::span<const double> phi0);

// V_T = sum_k <Phi_k, S_{k+1} - S_k> - (Lambda/2) sum_k |phi_k|^2 h
double wealth(const SimulatedPath& path, std::span<const double> positions, std::span<const double> rates,
              double lambda);
// V_T = <Phi0, S_T - s0> + sum_k (<phi_k, S_T - S_k> - (Lambda/2) |phi_k|^2) h
double wealth_by_parts(const SimulatedPath& path, std::span<const double> positions, std::span<const double> rates,
                       double lambda, std::span<const double> phi0);

// Largest sup_position_norm over the results.
double bound_check(std::span<const HedgeResult> results);

std::vector<double> supermartingale_exponent(const Pricer& pricer, double lambda, const SimulatedPath& path,
                                             const HedgeResult& hedge);

// Hedges paths 0..n_paths-1 of stream `seed`, one outcome per path.
std::vector<PathOutcome> hedge_outcomes(const TrackingHedger& hedger, const BachelierModel& model,
                                        std::span<const double> phi0, std::size_t n_paths, std::uint64_t seed,
                                        const Execution& exec);

}  // namespace uip
