#include "uip/hedger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uip/errors.hpp"

namespace uip {

namespace {

constexpr std::size_t kMinSteps = 1000;
constexpr std::size_t kMaxSteps = 100000;

struct NoRecord {
  void position(std::size_t, std::span<const double>) {}
  void rate(std::size_t, std::span<const double>) {}
};

struct TrajectoryRecord {
  HedgeResult* out;
  void position(std::size_t k, std::span<const double> p) {
    std::copy(p.begin(), p.end(), out->phi_positions.begin() + static_cast<std::ptrdiff_t>(k * out->dim));
  }
  void rate(std::size_t k, std::span<const double> r) {
    std::copy(r.begin(), r.end(), out->phi_rates.begin() + static_cast<std::ptrdiff_t>(k * out->dim));
  }
};

// next = theta + (phi - theta) E
void exponential_step(std::span<const double> theta, std::span<const double> phi, const Matrix& relax,
                      std::span<double> next) {
  const std::size_t d = phi.size();
  for (std::size_t j = 0; j < d; ++j) {
    double v = theta[j];
    for (std::size_t i = 0; i < d; ++i) v += (phi[i] - theta[i]) * relax(i, j);
    next[j] = v;
  }
}

void check_path(const TimeGrid& grid, std::size_t d, std::size_t values) {
  if (values != (grid.n_steps + 1) * d) throw Error(ErrorCode::DimensionMismatch, "path length does not match grid");
}

}  // namespace

StepResolution auto_steps(double A, double lambda, const BachelierModel& model) {
  if (!(A > 0.0) || !(lambda > 0.0)) throw Error(ErrorCode::InvalidParameter, "A and Lambda must be positive");
  const double wanted = std::ceil(20.0 * model.T * std::sqrt(A) * model.sigma.max_eigenvalue() / lambda);
  if (wanted > static_cast<double>(kMaxSteps)) return {kMaxSteps, true};
  return {std::max(kMinSteps, static_cast<std::size_t>(wanted)), false};
}

double position_bound(const Payoff& payoff, std::span<const double> phi0, double margin) {
  return std::max(norm(phi0), payoff.lipschitz_constant()) + margin;
}

Matrix relaxation_matrix(double A, double lambda, const SpdMatrix& sigma, double tau) {
  const double rate = std::sqrt(A) * tau / lambda;
  return apply_scalar_function(sigma, [rate](double s) { return std::exp(-rate * s); });
}

TrackingHedger::TrackingHedger(const Pricer& pricer, double lambda, TimeGrid grid)
    : pricer_(pricer), lambda_(lambda), grid_(grid), sigma_(pricer.model().sigma.entries()) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidParameter, "Lambda must be positive");
  if (std::abs(grid.T - pricer.model().T) > 1e-14 * pricer.model().T) {
    throw Error(ErrorCode::InvalidParameter, "time grid horizon differs from the model horizon");
  }
  relax_ = relaxation_matrix(pricer.A(), lambda, pricer.model().sigma, grid.step());
  mu_sigma_inv_ = row_vec_mul(pricer.model().mu, inverse(pricer.model().sigma).entries());
}

RowVec TrackingHedger::tracking_target(double t, std::span<const double> s_t, std::span<const double> phi_t) const {
  return uip::tracking_target(pricer_, t, s_t, phi_t);
}

template <typename Recorder>
PathOutcome TrackingHedger::integrate(std::span<const double> prices, std::span<const double> phi0,
                                      Recorder& rec) const {
  const std::size_t d = pricer_.model().dim();
  const std::size_t n = grid_.n_steps;
  check_path(grid_, d, prices.size());
  if (phi0.size() != d) throw Error(ErrorCode::DimensionMismatch, "Phi0 dimension");

  const double sqrt_a = std::sqrt(pricer_.A());
  const double h = grid_.step();
  // Scratch for d <= 8 lives on the stack; larger d falls back to the heap.
  constexpr std::size_t kInline = 8;
  double inline_buf[5 * kInline];
  std::vector<double> heap_buf;
  double* buf = inline_buf;
  if (d > kInline) {
    heap_buf.resize(5 * d);
    buf = heap_buf.data();
  }
  std::span<double> phi(buf, d), next(buf + d, d), theta(buf + 2 * d, d), shifted(buf + 3 * d, d),
      rate(buf + 4 * d, d);
  std::copy(phi0.begin(), phi0.end(), phi.begin());
  rec.position(0, phi);

  PathOutcome out;
  out.sup_position_norm = norm(phi);
  double wealth = 0.0;
  double cost = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid_.knot(k);
    const double* s_k = prices.data() + k * d;
    const double* s_next = prices.data() + (k + 1) * d;
    for (std::size_t j = 0; j < d; ++j) {
      double v = s_k[j];
      for (std::size_t i = 0; i < d; ++i) v -= sqrt_a * phi[i] * sigma_(i, j);
      shifted[j] = v;
    }
    pricer_.delta_into(t, shifted, theta);
    exponential_step(theta, phi, relax_, next);
    double rate_sq = 0.0;
    double gain = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      rate[j] = (next[j] - phi[j]) / h;
      rate_sq += rate[j] * rate[j];
      gain += phi[j] * (s_next[j] - s_k[j]);
    }
    const double step_cost = 0.5 * lambda_ * rate_sq * h;
    wealth += gain - step_cost;
    cost += step_cost;
    rec.rate(k, rate);
    std::copy(next.begin(), next.end(), phi.begin());
    rec.position(k + 1, phi);
    out.sup_position_norm = std::max(out.sup_position_norm, norm(phi));
  }

  const std::span<const double> s_T = prices.subspan(n * d, d);
  out.payoff_value = pricer_.payoff()(s_T);
  out.terminal_wealth = wealth;
  out.cost_integral = cost;
  out.utility_exponent = pricer_.A() / lambda_ * (out.payoff_value - wealth);

  // log M(T) - log M(0) for the drift-corrected process; u^A(T, .) = g^A.
  for (std::size_t j = 0; j < d; ++j) {
    double v = s_T[j];
    for (std::size_t i = 0; i < d; ++i) v -= sqrt_a * phi[i] * sigma_(i, j);
    shifted[j] = v;
  }
  const double phi_sigma_phi = quad_form(phi, sigma_);
  const double log_m_T =
      pricer_.A() / lambda_ * (pricer_.sup_convolution().value(shifted) + 0.5 * sqrt_a * phi_sigma_phi - wealth);
  double drift = 0.0;
  for (std::size_t j = 0; j < d; ++j) drift += (phi[j] - phi0[j]) * mu_sigma_inv_[j];
  const double log_m_0 = pricer_.A() / lambda_ * pricer_.limit_value(phi0);
  out.log_supermartingale_ratio = log_m_T - sqrt_a * drift - log_m_0;
  return out;
}

HedgeResult TrackingHedger::run(const SimulatedPath& path, std::span<const double> phi0) const {
  const std::size_t d = pricer_.model().dim();
  HedgeResult result;
  result.dim = d;
  result.n_steps = grid_.n_steps;
  result.phi_positions.assign((grid_.n_steps + 1) * d, 0.0);
  result.phi_rates.assign(grid_.n_steps * d, 0.0);
  TrajectoryRecord rec{&result};
  const PathOutcome o = integrate(path.s, phi0, rec);
  result.terminal_wealth = o.terminal_wealth;
  result.payoff_value = o.payoff_value;
  result.utility_exponent = o.utility_exponent;
  result.cost_integral = o.cost_integral;
  result.sup_position_norm = o.sup_position_norm;
  return result;
}

PathOutcome TrackingHedger::run_outcome(std::span<const double> prices, std::span<const double> phi0) const {
  NoRecord rec;
  return integrate(prices, phi0, rec);
}

std::vector<double> TrackingHedger::supermartingale_exponent(const SimulatedPath& path,
                                                             const HedgeResult& hedge) const {
  const std::size_t d = pricer_.model().dim();
  const std::size_t n = grid_.n_steps;
  check_path(grid_, d, path.s.size());
  if (hedge.n_steps != n || hedge.dim != d) throw Error(ErrorCode::DimensionMismatch, "hedge does not match grid");
  const double sqrt_a = std::sqrt(pricer_.A());
  const double scale = pricer_.A() / lambda_;
  const double h = grid_.step();
  const std::span<const double> phi0 = hedge.position(0);

  std::vector<double> log_m(n + 1);
  RowVec shifted(d);
  double wealth = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const auto phi = hedge.position(k);
    const auto s_k = path.s_at(k);
    if (k > 0) {
      const auto phi_prev = hedge.position(k - 1);
      const auto s_prev = path.s_at(k - 1);
      const auto rate = hedge.rate(k - 1);
      double gain = 0.0;
      for (std::size_t j = 0; j < d; ++j) gain += phi_prev[j] * (s_k[j] - s_prev[j]);
      wealth += gain - 0.5 * lambda_ * dot(rate, rate) * h;
    }
    for (std::size_t j = 0; j < d; ++j) {
      double v = s_k[j];
      for (std::size_t i = 0; i < d; ++i) v -= sqrt_a * phi[i] * sigma_(i, j);
      shifted[j] = v;
    }
    const double u = pricer_.price(grid_.knot(k), shifted);
    double drift = 0.0;
    for (std::size_t j = 0; j < d; ++j) drift += (phi[j] - phi0[j]) * mu_sigma_inv_[j];
    const double value = scale * (u + 0.5 * sqrt_a * quad_form(phi, sigma_) - wealth) - sqrt_a * drift;
    if (!std::isfinite(value)) throw Error(ErrorCode::OverflowGuard, "log M is not finite");
    log_m[k] = value;
  }
  return log_m;
}

RowVec tracking_target(const Pricer& pricer, double t, std::span<const double> s_t, std::span<const double> phi_t) {
  const std::size_t d = pricer.model().dim();
  if (s_t.size() != d || phi_t.size() != d) throw Error(ErrorCode::DimensionMismatch, "tracking target inputs");
  if (!(t < pricer.model().T) || t < 0.0) throw Error(ErrorCode::InvalidTime, "tracking target needs 0 <= t < T");
  const RowVec phi_sigma = row_vec_mul(phi_t, pricer.model().sigma.entries());
  RowVec x(s_t.begin(), s_t.end());
  for (std::size_t j = 0; j < d; ++j) x[j] -= std::sqrt(pricer.A()) * phi_sigma[j];
  RowVec theta(d);
  pricer.delta_into(t, x, theta);
  return theta;
}

HedgeResult integrate_strategy(const Pricer& pricer, double lambda, const SimulatedPath& path,
                               std::span<const double> phi0) {
  return TrackingHedger(pricer, lambda, path.grid).run(path, phi0);
}

std::vector<double> integrate_frozen_targets(double A, double lambda, const SpdMatrix& sigma, const TimeGrid& grid,
                                             std::span<const double> theta_path, std::span<const double> phi0) {
  const std::size_t d = sigma.dim();
  const std::size_t n = grid.n_steps;
  if (theta_path.size() != n * d || phi0.size() != d) throw Error(ErrorCode::DimensionMismatch, "frozen targets");
  const Matrix relax = relaxation_matrix(A, lambda, sigma, grid.step());
  std::vector<double> positions((n + 1) * d);
  std::copy(phi0.begin(), phi0.end(), positions.begin());
  for (std::size_t k = 0; k < n; ++k) {
    exponential_step(theta_path.subspan(k * d, d), std::span<const double>(positions).subspan(k * d, d), relax,
                     std::span<double>(positions).subspan((k + 1) * d, d));
  }
  return positions;
}

std::vector<double> duhamel_solution(double A, double lambda, const SpdMatrix& sigma, const TimeGrid& grid,
                                     std::span<const double> theta_path, std::span<const double> phi0) {
  const std::size_t d = sigma.dim();
  const std::size_t n = grid.n_steps;
  if (theta_path.size() != n * d || phi0.size() != d) throw Error(ErrorCode::DimensionMismatch, "Duhamel inputs");
  // decay[m] = exp(-sqrt(A) (m h) sigma / Lambda)
  std::vector<Matrix> decay(n + 1);
  for (std::size_t m = 0; m <= n; ++m) decay[m] = relaxation_matrix(A, lambda, sigma, grid.knot(m));

  std::vector<double> positions((n + 1) * d, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    RowVec acc = row_vec_mul(phi0, decay[k]);
    // The forcing over [t_j, t_{j+1}] integrates to Theta_j (E(t_k - t_{j+1}) - E(t_k - t_j)).
    for (std::size_t j = 0; j < k; ++j) {
      const auto theta = theta_path.subspan(j * d, d);
      const Matrix& near = decay[k - j - 1];
      const Matrix& far = decay[k - j];
      for (std::size_t c = 0; c < d; ++c) {
        double v = 0.0;
        for (std::size_t r = 0; r < d; ++r) v += theta[r] * (near(r, c) - far(r, c));
        acc[c] += v;
      }
    }
    std::copy(acc.begin(), acc.end(), positions.begin() + static_cast<std::ptrdiff_t>(k * d));
  }
  return positions;
}

double wealth(const SimulatedPath& path, std::span<const double> positions, std::span<const double> rates,
              double lambda) {
  const std::size_t d = path.dim;
  const std::size_t n = path.grid.n_steps;
  if (positions.size() != (n + 1) * d || rates.size() != n * d) throw Error(ErrorCode::DimensionMismatch, "wealth");
  const double h = path.grid.step();
  double v = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double gain = 0.0;
    double rate_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      gain += positions[k * d + j] * (path.s[(k + 1) * d + j] - path.s[k * d + j]);
      rate_sq += rates[k * d + j] * rates[k * d + j];
    }
    v += gain - 0.5 * lambda * rate_sq * h;
  }
  return v;
}

double wealth_by_parts(const SimulatedPath& path, std::span<const double> positions, std::span<const double> rates,
                       double lambda, std::span<const double> phi0) {
  const std::size_t d = path.dim;
  const std::size_t n = path.grid.n_steps;
  if (positions.size() != (n + 1) * d || rates.size() != n * d || phi0.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "wealth_by_parts");
  }
  const double h = path.grid.step();
  const auto s_T = path.s_at(n);
  double v = 0.0;
  for (std::size_t j = 0; j < d; ++j) v += phi0[j] * (s_T[j] - path.s[j]);
  for (std::size_t k = 0; k < n; ++k) {
    double term = 0.0;
    double rate_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      term += rates[k * d + j] * (s_T[j] - path.s[k * d + j]);
      rate_sq += rates[k * d + j] * rates[k * d + j];
    }
    v += (term - 0.5 * lambda * rate_sq) * h;
  }
  return v;
}

double bound_check(std::span<const HedgeResult> results) {
  double worst = 0.0;
  for (const HedgeResult& r : results) worst = std::max(worst, r.sup_position_norm);
  return worst;
}

std::vector<double> supermartingale_exponent(const Pricer& pricer, double lambda, const SimulatedPath& path,
                                             const HedgeResult& hedge) {
  return TrackingHedger(pricer, lambda, path.grid).supermartingale_exponent(path, hedge);
}

std::vector<PathOutcome> hedge_outcomes(const TrackingHedger& hedger, const BachelierModel& model,
                                        std::span<const double> phi0, std::size_t n_paths, std::uint64_t seed,
                                        const Execution& exec) {
  if (n_paths == 0) throw Error(ErrorCode::InvalidParameter, "n_paths must be >= 1");
  const std::size_t values = (hedger.grid().n_steps + 1) * model.dim();
  std::vector<PathOutcome> outcomes(n_paths);
  parallel_for(exec, n_paths, [&](std::size_t i) {
    thread_local std::vector<double> w, s;
    w.resize(values);
    s.resize(values);
    simulate_path_into(model, hedger.grid(), seed, i, w, s);
    outcomes[i] = hedger.run_outcome(s, phi0);
  });
  return outcomes;
}

}  // namespace uip
