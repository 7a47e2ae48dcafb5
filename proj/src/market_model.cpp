#include "uip/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uip/errors.hpp"
#include "uip/rng.hpp"

namespace uip {

BachelierModel BachelierModel::make(RowVec s0, RowVec mu, SpdMatrix sigma, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidParameter, "horizon T must be positive");
  if (s0.empty() || s0.size() != mu.size() || s0.size() != sigma.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "s0, mu and sigma must share dimension d");
  }
  return BachelierModel{std::move(s0), std::move(mu), std::move(sigma), T};
}

Payoff Payoff::basket_call(RowVec a, double b) {
  if (a.empty()) throw Error(ErrorCode::DimensionMismatch, "basket weights are empty");
  return Payoff(BasketCall{std::move(a), b});
}

Payoff Payoff::generic(std::function<double(std::span<const double>)> fn, double lipschitz, std::string name) {
  if (!(lipschitz >= 0.0)) throw Error(ErrorCode::InvalidParameter, "Lipschitz constant must be >= 0");
  if (!fn) throw Error(ErrorCode::InvalidParameter, "generic payoff needs a function");
  return Payoff(GenericLipschitz{std::move(fn), lipschitz, std::move(name)});
}

Payoff Payoff::zero(std::size_t d) { return basket_call(RowVec(d, 0.0), 0.0); }

Payoff Payoff::generic_basket_call(RowVec a, double b) {
  const double lip = norm(a);
  return generic(
      [a = std::move(a), b](std::span<const double> x) { return std::max(dot(a, x) + b, 0.0); }, lip,
      "basket_call_generic");
}

double Payoff::lipschitz_constant() const {
  if (is_basket_call()) return norm(basket().a);
  return generic_payoff().lipschitz;
}

double Payoff::operator()(std::span<const double> x) const {
  if (const auto* call = std::get_if<BasketCall>(&v_)) return std::max(dot(call->a, x) + call->b, 0.0);
  return std::get<GenericLipschitz>(v_).evaluate(x);
}

double payoff_eval(const Payoff& payoff, std::span<const double> x) { return payoff(x); }

TimeGrid TimeGrid::make(std::size_t n_steps, double T) {
  if (n_steps == 0) throw Error(ErrorCode::InvalidParameter, "time grid needs at least one step");
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidParameter, "time grid horizon must be positive");
  return TimeGrid{n_steps, T};
}

ImpactParams ImpactParams::make(double lambda, double a_risk) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidParameter, "impact Lambda must be positive");
  if (!(a_risk > 0.0)) throw Error(ErrorCode::InvalidParameter, "A must be positive");
  return ImpactParams{lambda, a_risk};
}

void simulate_path_into(const BachelierModel& model, const TimeGrid& grid, std::uint64_t seed,
                        std::uint64_t index, std::span<double> w, std::span<double> s) {
  const std::size_t d = model.dim();
  const std::size_t n = grid.n_steps;
  if (w.size() != (n + 1) * d || s.size() != (n + 1) * d) {
    throw Error(ErrorCode::DimensionMismatch, "path buffers must hold (n+1) x d values");
  }
  CounterRng rng(seed, index);
  const double sqrt_h = std::sqrt(grid.step());
  const Matrix& sigma = model.sigma.entries();
  for (std::size_t j = 0; j < d; ++j) w[j] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < d; ++j) w[(k + 1) * d + j] = w[k * d + j] + sqrt_h * rng.normal();
  }
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = grid.knot(k);
    for (std::size_t j = 0; j < d; ++j) {
      double v = model.s0[j] + model.mu[j] * t;
      for (std::size_t i = 0; i < d; ++i) v += w[k * d + i] * sigma(i, j);
      s[k * d + j] = v;
    }
  }
}

SimulatedPath simulate_path(const BachelierModel& model, const TimeGrid& grid, std::uint64_t seed,
                            std::uint64_t index) {
  const std::size_t d = model.dim();
  SimulatedPath path{grid, d, std::vector<double>((grid.n_steps + 1) * d),
                     std::vector<double>((grid.n_steps + 1) * d)};
  simulate_path_into(model, grid, seed, index, path.w, path.s);
  return path;
}

std::vector<SimulatedPath> simulate_paths(const BachelierModel& model, const TimeGrid& grid,
                                          std::size_t n_paths, std::uint64_t seed, const Execution& exec) {
  if (n_paths == 0) throw Error(ErrorCode::InvalidParameter, "n_paths must be >= 1");
  std::vector<SimulatedPath> paths(n_paths);
  parallel_for(exec, n_paths, [&](std::size_t i) { paths[i] = simulate_path(model, grid, seed, i); });
  return paths;
}

SupConvolution::SupConvolution(Payoff payoff, double A, const SpdMatrix& sigma, SupConvolutionConfig cfg)
    : payoff_(std::move(payoff)), A_(A), sigma_(sigma.entries()), cfg_(cfg) {
  if (!(A > 0.0) || !std::isfinite(A)) throw Error(ErrorCode::InvalidParameter, "A must be positive");
  if (cfg.grid_points < 3 || cfg.grid_points % 2 == 0) {
    throw Error(ErrorCode::InvalidParameter, "sup-convolution grid needs an odd number (>= 3) of points");
  }
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) throw Error(ErrorCode::InvalidParameter, "shrink must be in (0,1)");
  if (payoff_.is_basket_call() && payoff_.basket().a.size() != sigma.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "basket weights and sigma differ in dimension");
  }
  sigma_inv_ = inverse(sigma).entries();
  radius_ = 2.0 * std::sqrt(A) * sigma.max_eigenvalue() * payoff_.lipschitz_constant();
}

double SupConvolution::penalty(std::span<const double> y) const {
  return quad_form(y, sigma_inv_) / (2.0 * std::sqrt(A_));
}

double SupConvolution::objective(std::span<const double> x, std::span<const double> y) const {
  RowVec shifted(x.begin(), x.end());
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += y[i];
  return payoff_(shifted) - penalty(y);
}

RowVec SupConvolution::search(std::span<const double> x, double& best) const {
  const std::size_t d = x.size();
  RowVec best_y(d, 0.0);
  best = payoff_(x);
  if (radius_ == 0.0) return best_y;

  const int points = cfg_.grid_points;
  const double spacing = 2.0 * radius_ / (points - 1);

  // Coarse tensor grid over the ball's bounding box.
  std::vector<int> idx(d, 0);
  RowVec y(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) y[i] = -radius_ + spacing * idx[i];
    const double v = objective(x, y);
    if (v > best) {
      best = v;
      best_y = y;
    }
    std::size_t axis = 0;
    while (axis < d && ++idx[axis] == points) idx[axis++] = 0;
    if (axis == d) break;
  }

  // Coordinate-descent refinement on shrinking windows.
  double window = radius_;
  for (int round = 0; round < cfg_.refinement_rounds; ++round) {
    window *= cfg_.shrink;
    const double step = 2.0 * window / (points - 1);
    for (int sweep = 0; sweep < 50; ++sweep) {
      bool improved = false;
      for (std::size_t axis = 0; axis < d; ++axis) {
        const double center = best_y[axis];
        y = best_y;
        for (int p = 0; p < points; ++p) {
          y[axis] = center - window + step * p;
          const double v = objective(x, y);
          if (v > best) {
            best = v;
            best_y[axis] = y[axis];
            improved = true;
          }
        }
      }
      if (!improved || d == 1) break;
    }
  }

  // Pattern-search polish along axes and pairwise diagonals, so maxima
  // sitting on a kink of f are resolved well below the grid spacing.
  std::vector<RowVec> directions;
  for (std::size_t i = 0; i < d; ++i) {
    RowVec e(d, 0.0);
    e[i] = 1.0;
    directions.push_back(e);
    for (std::size_t j = i + 1; j < d; ++j) {
      for (double sign : {1.0, -1.0}) {
        RowVec diag(d, 0.0);
        diag[i] = 1.0;
        diag[j] = sign;
        directions.push_back(diag);
      }
    }
  }
  double step = 2.0 * window / (points - 1);
  const double tiny = 1e-10 * radius_;
  while (step > tiny) {
    bool improved = false;
    for (const RowVec& dir : directions) {
      for (double sign : {1.0, -1.0}) {
        for (std::size_t i = 0; i < d; ++i) y[i] = best_y[i] + sign * step * dir[i];
        const double v = objective(x, y);
        if (v > best) {
          best = v;
          best_y = y;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best_y;
}

double SupConvolution::value(std::span<const double> x) const {
  if (payoff_.is_basket_call()) {
    const BasketCall& call = payoff_.basket();
    const double a_sigma_a = quad_form(call.a, sigma_);
    return std::max(dot(call.a, x) + call.b + 0.5 * std::sqrt(A_) * a_sigma_a, 0.0);
  }
  double best = 0.0;
  search(x, best);
  return best;
}

RowVec SupConvolution::argmax(std::span<const double> x) const {
  if (payoff_.is_basket_call()) {
    const BasketCall& call = payoff_.basket();
    RowVec y_star = row_vec_mul(call.a, sigma_);
    for (double& v : y_star) v *= std::sqrt(A_);
    const double a_sigma_a = quad_form(call.a, sigma_);
    if (dot(call.a, x) + call.b + 0.5 * std::sqrt(A_) * a_sigma_a > 0.0) return y_star;
    const RowVec origin(x.size(), 0.0);
    return objective(x, y_star) > objective(x, origin) ? y_star : origin;
  }
  double best = 0.0;
  return search(x, best);
}

double sup_convolve_g(const Payoff& payoff, double A, const SpdMatrix& sigma, std::span<const double> x,
                      SupConvolutionConfig cfg) {
  return SupConvolution(payoff, A, sigma, cfg).value(x);
}

RowVec g_argmax(const Payoff& payoff, double A, const SpdMatrix& sigma, std::span<const double> x, double eps,
                SupConvolutionConfig cfg) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidParameter, "eps must be positive");
  return SupConvolution(payoff, A, sigma, cfg).argmax(x);
}

}  // namespace uip
