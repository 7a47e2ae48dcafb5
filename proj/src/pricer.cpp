#include "uip/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uip/errors.hpp"
#include "uip/normal.hpp"

namespace uip {

Pricer::Pricer(double A, BachelierModel model, Payoff payoff, std::shared_ptr<const QuadratureRule> rule,
               SupConvolutionConfig sup_cfg, Execution exec)
    : A_(A), model_(std::move(model)), sup_(std::move(payoff), A, model_.sigma, sup_cfg), rule_(std::move(rule)),
      exec_(exec) {
  if (rule_ && rule_->dim != model_.dim()) throw Error(ErrorCode::DimensionMismatch, "quadrature rule dimension");
  if (sup_.payoff().is_basket_call()) {
    const BasketCall& call = sup_.payoff().basket();
    a_sigma_ = row_vec_mul(call.a, model_.sigma.entries());
    a_sigma_sq_ = dot(a_sigma_, a_sigma_);
    b_shifted_ = call.b + 0.5 * std::sqrt(A_) * dot(a_sigma_, call.a);
  } else if (!rule_) {
    rule_ = std::make_shared<const QuadratureRule>(default_rule(model_.dim()));
  }
}

std::shared_ptr<const QuadratureRule> Pricer::rule() const {
  if (rule_) return rule_;
  return std::make_shared<const QuadratureRule>(default_rule(model_.dim()));
}

void Pricer::check_time(double t, bool allow_maturity) const {
  const bool ok = allow_maturity ? (t >= 0.0 && t <= model_.T) : (t >= 0.0 && t < model_.T);
  if (!ok) {
    throw Error(ErrorCode::InvalidTime, "t = " + std::to_string(t) + " outside [0, T" + (allow_maturity ? "]" : ")"));
  }
}

double Pricer::price(double t, std::span<const double> x) const {
  check_time(t, true);
  if (x.size() != model_.dim()) throw Error(ErrorCode::DimensionMismatch, "price point dimension");
  if (!sup_.payoff().is_basket_call()) return price_by_quadrature(t, x);
  const double z = dot(sup_.payoff().basket().a, x) + b_shifted_;
  const double spread = std::sqrt((model_.T - t) * a_sigma_sq_);
  if (spread == 0.0) return std::max(z, 0.0);
  return std::max(spread * bachelier_call_unit(z / spread), 0.0);
}

double Pricer::price_by_quadrature(double t, std::span<const double> x) const {
  check_time(t, true);
  const std::size_t d = model_.dim();
  if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, "price point dimension");
  if (t == model_.T) return sup_.value(x);
  const double scale = std::sqrt(model_.T - t);
  const Matrix& sigma = model_.sigma.entries();
  const auto nodes = rule();
  return integrate(
      *nodes,
      [&](std::span<const double> z) {
        RowVec point(x.begin(), x.end());
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t i = 0; i < d; ++i) point[j] += scale * z[i] * sigma(i, j);
        return sup_.value(point);
      },
      exec_);
}

RowVec Pricer::delta_fd(double t, std::span<const double> x, double fd_step) const {
  check_time(t, false);
  if (!(fd_step > 0.0)) throw Error(ErrorCode::InvalidParameter, "fd_step must be positive");
  const std::size_t d = model_.dim();
  RowVec out(d);
  RowVec bumped(x.begin(), x.end());
  for (std::size_t i = 0; i < d; ++i) {
    bumped[i] = x[i] + fd_step;
    const double up = price(t, bumped);
    bumped[i] = x[i] - fd_step;
    const double down = price(t, bumped);
    bumped[i] = x[i];
    out[i] = (up - down) / (2.0 * fd_step);
  }
  return out;
}

RowVec Pricer::delta_closed_form(double t, std::span<const double> x) const {
  check_time(t, false);
  if (!sup_.payoff().is_basket_call()) throw Error(ErrorCode::InvalidParameter, "closed-form delta needs a basket call");
  RowVec out(model_.dim());
  delta_into(t, x, out);
  return out;
}

double Pricer::default_delta_step(double t, std::span<const double> x) const {
  return 1e-4 * (1.0 + norm(x)) * std::max(std::sqrt(model_.T - t), 0.05);
}

void Pricer::delta_into(double t, std::span<const double> x, std::span<double> out) const {
  if (sup_.payoff().is_basket_call()) {
    const RowVec& a = sup_.payoff().basket().a;
    double z = b_shifted_;
    for (std::size_t i = 0; i < a.size(); ++i) z += a[i] * x[i];
    const double spread = std::sqrt((model_.T - t) * a_sigma_sq_);
    const double weight = spread > 0.0 ? normal_cdf(z / spread) : (z > 0.0 ? 1.0 : 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * weight;
    return;
  }
  const RowVec fd = delta_fd(t, x, default_delta_step(t, x));
  std::copy(fd.begin(), fd.end(), out.begin());
}

double Pricer::pde_residual(double t, std::span<const double> x, FdSteps steps) const {
  const std::size_t d = model_.dim();
  if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, "residual point dimension");
  if (!(steps.dt > 0.0) || !(steps.dx_rel > 0.0)) throw Error(ErrorCode::InvalidParameter, "fd steps must be positive");
  if (t < 0.0 || t > model_.T - 10.0 * steps.dt) {
    throw Error(ErrorCode::InvalidTime, "pde_residual needs 0 <= t <= T - 10 dt");
  }
  double u_t = 0.0;
  if (t >= steps.dt) {
    u_t = (price(t + steps.dt, x) - price(t - steps.dt, x)) / (2.0 * steps.dt);
  } else {
    u_t = (-3.0 * price(t, x) + 4.0 * price(t + steps.dt, x) - price(t + 2.0 * steps.dt, x)) / (2.0 * steps.dt);
  }

  const double h = steps.dx_rel * (1.0 + norm(x));
  const Matrix sigma_sq = model_.sigma.entries() * model_.sigma.entries();
  const double center = price(t, x);
  RowVec p(x.begin(), x.end());
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    p[i] = x[i] + h;
    const double up = price(t, p);
    p[i] = x[i] - h;
    const double down = price(t, p);
    p[i] = x[i];
    trace += sigma_sq(i, i) * (up - 2.0 * center + down) / (h * h);
    for (std::size_t j = i + 1; j < d; ++j) {
      if (sigma_sq(i, j) == 0.0) continue;
      double cross = 0.0;
      for (int si = -1; si <= 1; si += 2) {
        for (int sj = -1; sj <= 1; sj += 2) {
          p[i] = x[i] + si * h;
          p[j] = x[j] + sj * h;
          cross += si * sj * price(t, p);
        }
      }
      p[i] = x[i];
      p[j] = x[j];
      trace += 2.0 * sigma_sq(i, j) * cross / (4.0 * h * h);
    }
  }
  return u_t + 0.5 * trace;
}

double Pricer::indifference_limit(std::span<const double> phi0) const {
  const std::size_t d = model_.dim();
  if (phi0.size() != d) throw Error(ErrorCode::DimensionMismatch, "Phi0 dimension");
  const RowVec shift = row_vec_mul(phi0, model_.sigma.entries());
  RowVec x0 = model_.s0;
  for (std::size_t i = 0; i < d; ++i) x0[i] -= std::sqrt(A_) * shift[i];
  return price(0.0, x0);
}

double Pricer::limit_value(std::span<const double> phi0) const {
  const RowVec shift = row_vec_mul(phi0, model_.sigma.entries());
  return indifference_limit(phi0) + 0.5 * std::sqrt(A_) * dot(shift, phi0);
}

double price_u(double A, const BachelierModel& model, const Payoff& payoff, double t, std::span<const double> x,
               std::shared_ptr<const QuadratureRule> rule) {
  return Pricer(A, model, payoff, std::move(rule)).price(t, x);
}

RowVec delta_u(double A, const BachelierModel& model, const Payoff& payoff, double t, std::span<const double> x,
               std::shared_ptr<const QuadratureRule> rule, double fd_step) {
  return Pricer(A, model, payoff, std::move(rule)).delta_fd(t, x, fd_step);
}

double pde_residual(double A, const BachelierModel& model, const Payoff& payoff, double t,
                    std::span<const double> x, std::shared_ptr<const QuadratureRule> rule, FdSteps steps) {
  return Pricer(A, model, payoff, std::move(rule)).pde_residual(t, x, steps);
}

double limit_value(double A, const BachelierModel& model, const Payoff& payoff, std::span<const double> phi0,
                   std::shared_ptr<const QuadratureRule> rule) {
  return Pricer(A, model, payoff, std::move(rule)).limit_value(phi0);
}

double indifference_limit(double A, const BachelierModel& model, const Payoff& payoff,
                          std::span<const double> phi0, std::shared_ptr<const QuadratureRule> rule) {
  return Pricer(A, model, payoff, std::move(rule)).indifference_limit(phi0);
}

}  // namespace uip
