#include "uip/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "uip/asymptotics.hpp"
#include "uip/errors.hpp"
#include "uip/hedger.hpp"
#include "uip/rng.hpp"

namespace uip {

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

void CsvWriter::meta(const std::string& key, const std::string& value) { out_ << "# " << key << "=" << value << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::separator() {
  if (row_started_) out_ << ",";
  row_started_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
  separator();
  out_ << format_number(v, precision_);
  return *this;
}

CsvWriter& CsvWriter::cell(std::size_t v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  out_ << "\n";
  row_started_ = false;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void common_meta(CsvWriter& csv, const ExperimentConfig& cfg, const std::string& command) {
  csv.meta("command", command);
  csv.meta("config_hash", hex(config_hash(cfg)));
  csv.meta("seed", std::to_string(cfg.seed));
}

std::size_t resolve_steps(const ExperimentConfig& cfg, const BachelierModel& model, double lambda, bool& capped) {
  capped = false;
  if (cfg.n_steps != 0) return cfg.n_steps;
  const StepResolution res = auto_steps(cfg.A, lambda, model);
  capped = res.capped;
  return res.n_steps;
}

std::string lambda_key(double lambda) { return "n_steps[lambda=" + format_number(lambda, 9) + "]"; }

double slack_bound(const ExperimentConfig& cfg, const BachelierModel& model, const Payoff& payoff, double lambda) {
  const RowVec mu_sigma_inv = row_vec_mul(cfg.mu, inverse(model.sigma).entries());
  const double c = position_bound(payoff, cfg.phi0);
  return lambda / std::sqrt(cfg.A) * 2.0 * c * model.T * norm(mu_sigma_inv);
}

void floor_warnings(const ExperimentConfig& cfg, std::vector<std::string>& warnings) {
  for (double lambda : cfg.lambdas) {
    if (lambda < kLambdaFloor) {
      warnings.push_back("Lambda = " + format_number(lambda, 6) + " is below the floor " +
                         format_number(kLambdaFloor, 6) + "; Monte Carlo estimates lose their variance");
    }
  }
}

std::vector<DualSpec> dual_specs(const ExperimentConfig& cfg, const BachelierModel& model, const Payoff& payoff) {
  std::vector<DualSpec> specs;
  for (const auto& name : cfg.dual_specs) {
    if (name == "zero") {
      specs.push_back(DualSpec::zero(cfg.d));
    } else if (name == "optimal") {
      specs.push_back(optimal_dual_Y(cfg.A, model, payoff, cfg.phi0, 1e-6));
    } else if (name == "constant") {
      specs.push_back(DualSpec::constant(cfg.dual_constant));
    } else {
      const std::size_t count = std::stoull(name.substr(7));
      for (std::size_t i = 0; i < count; ++i) specs.push_back(DualSpec::random(cfg.d, cfg.seed, i));
    }
  }
  return specs;
}

}  // namespace

int cmd_price(const ExperimentConfig& cfg, CommandContext& ctx) {
  const BachelierModel model = build_model(cfg);
  const Payoff payoff = build_payoff(cfg);
  const auto rule = build_rule(cfg);
  const Execution exec = build_execution(cfg);
  const FdSteps steps{cfg.fd_dt, cfg.fd_dx_rel};
  const double t = cfg.price_t;

  CsvWriter csv(ctx.csv, cfg.precision);
  common_meta(csv, cfg, "price");
  std::vector<std::string> columns{"A", "t"};
  for (std::size_t i = 0; i < cfg.d; ++i) columns.push_back("x" + std::to_string(i));
  columns.push_back("u_value");
  for (std::size_t i = 0; i < cfg.d; ++i) columns.push_back("delta" + std::to_string(i));
  columns.push_back("pde_residual");
  csv.header(columns);

  for (double A : cfg.A_grid) {
    const Pricer pricer(A, model, payoff, rule, {}, exec);
    for (const auto& x : cfg.price_points) {
      csv.cell(A).cell(t);
      for (double v : x) csv.cell(v);
      csv.cell(pricer.price(t, x));
      RowVec delta(cfg.d, std::nan(""));
      if (t < model.T) pricer.delta_into(t, x, delta);
      for (double v : delta) csv.cell(v);
      const bool interior = t <= model.T - 10.0 * steps.dt;
      csv.cell(interior ? pricer.pde_residual(t, x, steps) : std::nan(""));
      csv.end_row();
    }
  }
  return kExitOk;
}

int cmd_figure(const ExperimentConfig& cfg, CommandContext& ctx) {
  const BachelierModel model = build_model(cfg);
  const Payoff payoff = build_payoff(cfg);
  const auto rule = build_rule(cfg);
  const Execution exec = build_execution(cfg);

  CsvWriter csv(ctx.csv, cfg.precision);
  common_meta(csv, cfg, "figure");
  csv.header({"A", "indifference_limit"});
  for (double A : cfg.A_grid) {
    const Pricer pricer(A, model, payoff, rule, {}, exec);
    csv.cell(A).cell(pricer.indifference_limit(cfg.phi0));
    csv.end_row();
  }
  return kExitOk;
}

int cmd_hedge(const ExperimentConfig& cfg, CommandContext& ctx) {
  const BachelierModel model = build_model(cfg);
  const Payoff payoff = build_payoff(cfg);
  const auto rule = build_rule(cfg);
  const Execution exec = build_execution(cfg);
  const Pricer pricer(cfg.A, model, payoff, rule, {}, exec);

  CsvWriter csv(ctx.csv, cfg.precision);
  common_meta(csv, cfg, "hedge");
  std::vector<std::size_t> steps;
  for (double lambda : cfg.lambdas) {
    bool capped = false;
    steps.push_back(resolve_steps(cfg, model, lambda, capped));
    csv.meta(lambda_key(lambda), std::to_string(steps.back()) + (capped ? " (capped)" : ""));
  }
  csv.header({"lambda", "path", "payoff", "wealth", "exponent", "cost", "sup_norm", "log_m_ratio"});
  for (std::size_t l = 0; l < cfg.lambdas.size(); ++l) {
    const double lambda = cfg.lambdas[l];
    if (!ctx.quiet) ctx.log << "hedge: Lambda = " << lambda << ", " << steps[l] << " steps\n";
    const TrackingHedger hedger(pricer, lambda, TimeGrid::make(steps[l], model.T));
    const auto outcomes = hedge_outcomes(hedger, model, cfg.phi0, cfg.n_paths, cfg.seed, exec);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const PathOutcome& o = outcomes[i];
      csv.cell(lambda).cell(i).cell(o.payoff_value).cell(o.terminal_wealth).cell(o.utility_exponent);
      csv.cell(o.cost_integral).cell(o.sup_position_norm).cell(o.log_supermartingale_ratio);
      csv.end_row();
    }
  }
  return kExitOk;
}

int cmd_converge(const ExperimentConfig& cfg, CommandContext& ctx) {
  const BachelierModel model = build_model(cfg);
  const Payoff payoff = build_payoff(cfg);
  const auto rule = build_rule(cfg);
  const Execution exec = build_execution(cfg);
  const double limit = Pricer(cfg.A, model, payoff, rule, {}, exec).limit_value(cfg.phi0);

  CsvWriter csv(ctx.csv, cfg.precision);
  common_meta(csv, cfg, "converge");
  std::vector<std::size_t> steps;
  for (double lambda : cfg.lambdas) {
    bool capped = false;
    steps.push_back(resolve_steps(cfg, model, lambda, capped));
    csv.meta(lambda_key(lambda), std::to_string(steps.back()) + (capped ? " (capped)" : ""));
  }
  std::vector<std::string> warnings;
  floor_warnings(cfg, warnings);
  for (const auto& w : warnings) {
    csv.meta("warning", w);
    ctx.log << "warning: " << w << "\n";
  }
  csv.header({"lambda", "n_steps", "ce_value", "ce_se", "limit", "slack_bound"});
  for (std::size_t l = 0; l < cfg.lambdas.size(); ++l) {
    const double lambda = cfg.lambdas[l];
    if (!ctx.quiet) ctx.log << "converge: Lambda = " << lambda << ", " << steps[l] << " steps\n";
    MonteCarloSetup setup;
    setup.n_paths = cfg.n_paths;
    setup.n_steps = steps[l];
    setup.seed = cfg.seed;
    setup.exec = exec;
    const CeEstimate ce = certainty_equivalent_mc(cfg.A, lambda, model, payoff, cfg.phi0, setup, rule);
    csv.cell(lambda).cell(steps[l]).cell(ce.value).cell(ce.std_error).cell(limit);
    csv.cell(slack_bound(cfg, model, payoff, lambda));
    csv.end_row();
  }
  return kExitOk;
}

int cmd_dual(const ExperimentConfig& cfg, CommandContext& ctx) {
  const BachelierModel model = build_model(cfg);
  const Payoff payoff = build_payoff(cfg);
  const auto rule = build_rule(cfg);
  const Execution exec = build_execution(cfg);
  const double limit = Pricer(cfg.A, model, payoff, rule, {}, exec).limit_value(cfg.phi0);

  CsvWriter csv(ctx.csv, cfg.precision);
  common_meta(csv, cfg, "dual");
  csv.meta("limit_value", format_number(limit, cfg.precision));
  csv.header({"spec_name", "lower_bound", "se_or_tol"});
  for (const DualSpec& spec : dual_specs(cfg, model, payoff)) {
    const DualEstimate est = dual_lower_bound(cfg.A, model, payoff, cfg.phi0, spec, rule, exec);
    csv.cell(spec.name).cell(est.value).cell(est.error);
    csv.end_row();
  }
  return kExitOk;
}

std::vector<CheckItem> run_invariant_suite(const ExperimentConfig& cfg, std::vector<std::string>& warnings) {
  const BachelierModel model = build_model(cfg);
  const Payoff payoff = build_payoff(cfg);
  const auto rule = build_rule(cfg);
  const Execution exec = build_execution(cfg);
  const Pricer pricer(cfg.A, model, payoff, rule, {}, exec);
  const std::size_t d = cfg.d;
  const double A = cfg.A;
  const double T = model.T;
  const Matrix eye = Matrix::identity(d);
  std::vector<CheckItem> items;
  auto add = [&](std::string name, bool ok, double value, double tol) {
    items.push_back({std::move(name), ok, "value=" + format_number(value, 6) + " tol=" + format_number(tol, 6)});
  };
  floor_warnings(cfg, warnings);

  // cosh^2 - sinh^2 = I and coth tanh = I on the spectrum of sigma.
  {
    double worst = 0.0;
    for (double lambda : cfg.lambdas) {
      const double c = std::min(std::sqrt(A) * T / lambda, 5.0 / model.sigma.max_eigenvalue());
      const Matrix ch = apply_scalar_function(model.sigma, [c](double x) { return std::cosh(c * x); });
      const Matrix sh = apply_scalar_function(model.sigma, [c](double x) { return std::sinh(c * x); });
      worst = std::max(worst, max_abs_diff(ch * ch - sh * sh, eye));
      const double full = std::sqrt(A) * T / lambda;
      const Matrix coth = ratio_function(model.sigma, {ScaledFunction::Kind::Cosh, full}, {ScaledFunction::Kind::Sinh, full});
      const Matrix tanh = ratio_function(model.sigma, {ScaledFunction::Kind::Sinh, full}, {ScaledFunction::Kind::Cosh, full});
      worst = std::max(worst, max_abs_diff(coth * tanh, eye));
    }
    add("hyperbolic_identity", worst <= 1e-8, worst, 1e-8);
  }

  // Heat-equation residual at random interior points.
  {
    double worst = 0.0;
    const FdSteps steps{cfg.fd_dt, cfg.fd_dx_rel};
    for (std::size_t i = 0; i < 25; ++i) {
      CounterRng rng(cfg.seed, 0x9de0000 + i);
      const double t = 0.9 * T * rng.uniform();
      RowVec z(d);
      for (double& v : z) v = rng.normal() * std::sqrt(T);
      RowVec x = row_vec_mul(z, model.sigma.entries());
      for (std::size_t j = 0; j < d; ++j) x[j] += model.s0[j];
      worst = std::max(worst, std::abs(pricer.pde_residual(t, x, steps)));
    }
    add("pde_residual", worst <= 1e-3, worst, 1e-3);
  }

  // (sqrt(A)/Lambda) int_0^T K(t, 0) dt = sigma^{-1}.
  {
    const Matrix sigma_inv = inverse(model.sigma).entries();
    const QuadratureRule t_rule = build_interval_rule(400, 8, 0.0, T);
    double worst = 0.0;
    for (double lambda : cfg.lambdas) {
      Matrix total(d, d);
      for (std::size_t k = 0; k < t_rule.size(); ++k) {
        total = total + t_rule.weights[k] * kernel_K(A, lambda, model.sigma, T, t_rule.nodes[k], 0.0);
      }
      worst = std::max(worst, max_abs_diff((std::sqrt(A) / lambda) * total, sigma_inv) / sigma_inv.max_abs());
    }
    add("kernel_identity", worst <= 1e-8, worst, 1e-8);
  }

  // Squared-kernel integrals approach sigma^{-1} / (4 sqrt(A)) as Lambda falls.
  {
    std::vector<double> lambdas = cfg.lambdas;
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    const Matrix target = kernel_limit_target(A, model.sigma);
    bool ok = true;
    double previous = INFINITY;
    double last = 0.0;
    for (double lambda : lambdas) {
      for (KernelKind kind : {KernelKind::K, KernelKind::L}) {
        const double err = max_abs_diff(kernel_limit_integral(A, lambda, model.sigma, T, 0.0, kind), target);
        if (kind == KernelKind::K) {
          ok = ok && err <= previous * (1.0 + 1e-12);
          previous = err;
          last = err;
        }
      }
    }
    // Deep in the small-Lambda regime nothing may overflow.
    const Matrix deep = kernel_limit_integral(A, 1e-3, model.sigma, T, 0.0, KernelKind::K);
    ok = ok && std::isfinite(deep.max_abs());
    add("kernel_limit", ok, last, 0.0);
  }

  // Wealth identities, position bound and the supermartingale property.
  {
    const std::size_t n_hedge = std::min<std::size_t>(cfg.n_paths, 50);
    const std::size_t n_mart = std::min<std::size_t>(cfg.n_paths, 2000);
    double worst_identity = 0.0;
    double worst_gap = 0.0;
    double worst_norm = 0.0;
    bool mart_ok = true;
    double worst_excess = -INFINITY;
    for (double lambda : cfg.lambdas) {
      bool capped = false;
      const TimeGrid grid = TimeGrid::make(resolve_steps(cfg, model, lambda, capped), T);
      const TrackingHedger hedger(pricer, lambda, grid);
      double gap_sq = 0.0;
      std::vector<HedgeResult> results;
      for (std::size_t i = 0; i < n_hedge; ++i) {
        const SimulatedPath path = simulate_path(model, grid, cfg.seed, i);
        HedgeResult hedge = hedger.run(path, cfg.phi0);
        const double left = wealth(path, hedge.phi_positions, hedge.phi_rates, lambda);
        const double parts = wealth_by_parts(path, hedge.phi_positions, hedge.phi_rates, lambda, cfg.phi0);
        // Summation by parts: left - parts = -sum <Phi_{k+1} - Phi_k, S_{k+1} - S_k>.
        double covariation = 0.0;
        for (std::size_t k = 0; k < grid.n_steps; ++k) {
          for (std::size_t j = 0; j < d; ++j) {
            covariation += (hedge.position(k + 1)[j] - hedge.position(k)[j]) * (path.s_at(k + 1)[j] - path.s_at(k)[j]);
          }
        }
        worst_identity = std::max(worst_identity, std::abs(left - parts + covariation) / (1.0 + std::abs(left)));
        gap_sq += (left - parts) * (left - parts);
        results.push_back(std::move(hedge));
      }
      worst_gap = std::max(worst_gap, std::sqrt(gap_sq / static_cast<double>(n_hedge)));
      worst_norm = std::max(worst_norm, bound_check(results));

      const auto outcomes = hedge_outcomes(hedger, model, cfg.phi0, n_mart, cfg.seed, exec);
      std::vector<double> ratios(outcomes.size());
      for (std::size_t i = 0; i < outcomes.size(); ++i) ratios[i] = std::exp(outcomes[i].log_supermartingale_ratio);
      const double n = static_cast<double>(ratios.size());
      const double mean = pairwise_sum(ratios) / n;
      std::vector<double> dev(ratios.size());
      for (std::size_t i = 0; i < ratios.size(); ++i) dev[i] = (ratios[i] - mean) * (ratios[i] - mean);
      const double se = n > 1 ? std::sqrt(pairwise_sum(dev) / (n - 1.0) / n) : 0.0;
      if (!std::isfinite(mean)) throw Error(ErrorCode::OverflowGuard, "supermartingale ratio is not finite");
      mart_ok = mart_ok && mean <= 1.0 + 3.0 * se;
      worst_excess = std::max(worst_excess, mean - 1.0 - 3.0 * se);
    }
    add("wealth_by_parts_identity", worst_identity <= 1e-9, worst_identity, 1e-9);
    items.push_back({"wealth_gap_rms", std::isfinite(worst_gap), "value=" + format_number(worst_gap, 6)});
    const double bound = position_bound(payoff, cfg.phi0);
    add("position_bound", worst_norm <= bound, worst_norm, bound);
    add("supermartingale", mart_ok, worst_excess, 0.0);
  }

  // Sandwich: dual bounds <= limit, tracking CE <= limit + slack + 3 se.
  {
    const double limit = pricer.limit_value(cfg.phi0);
    const DualEstimate zero = dual_lower_bound(A, model, payoff, cfg.phi0, DualSpec::zero(d), rule, exec);
    const DualEstimate best =
        dual_lower_bound(A, model, payoff, cfg.phi0, optimal_dual_Y(A, model, payoff, cfg.phi0, 1e-6), rule, exec);
    const double tol = std::max(1e-5, 3.0 * best.error);
    add("dual_optimal_attains_limit", std::abs(best.value - limit) <= tol, std::abs(best.value - limit), tol);
    const double zero_tol = std::max(1e-5, 3.0 * zero.error);
    add("dual_zero_below_limit", zero.value <= limit + zero_tol, zero.value - limit, zero_tol);

    bool ok = true;
    double worst = -INFINITY;
    for (double lambda : cfg.lambdas) {
      MonteCarloSetup setup;
      setup.n_paths = std::min<std::size_t>(cfg.n_paths, 5000);
      setup.n_steps = cfg.n_steps;
      setup.seed = cfg.seed;
      setup.exec = exec;
      const CeEstimate ce = certainty_equivalent_mc(A, lambda, model, payoff, cfg.phi0, setup, rule);
      const double excess = ce.value - (limit + slack_bound(cfg, model, payoff, lambda) + 3.0 * ce.std_error);
      ok = ok && excess <= 0.0;
      worst = std::max(worst, excess);
    }
    add("ce_upper_bound", ok, worst, 0.0);
  }
  return items;
}

int cmd_check(const ExperimentConfig& cfg, CommandContext& ctx) {
  std::vector<std::string> warnings;
  const auto items = run_invariant_suite(cfg, warnings);
  CsvWriter csv(ctx.csv, cfg.precision);
  common_meta(csv, cfg, "check");
  for (const auto& w : warnings) {
    csv.meta("warning", w);
    ctx.log << "warning: " << w << "\n";
  }
  csv.header({"item", "status", "detail"});
  bool all = true;
  for (const auto& item : items) {
    csv.cell(item.name).cell(std::string(item.passed ? "PASS" : "FAIL")).cell(item.detail);
    csv.end_row();
    all = all && item.passed;
  }
  return all ? kExitOk : kExitInvalid;
}

int run_command(const std::string& name, const ExperimentConfig& cfg, CommandContext& ctx) {
  try {
    if (name == "price") return cmd_price(cfg, ctx);
    if (name == "figure") return cmd_figure(cfg, ctx);
    if (name == "hedge") return cmd_hedge(cfg, ctx);
    if (name == "converge") return cmd_converge(cfg, ctx);
    if (name == "dual") return cmd_dual(cfg, ctx);
    if (name == "check") return cmd_check(cfg, ctx);
    ctx.log << "error: unknown command " << name << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    ctx.log << "error: " << e.what() << "\n";
    const bool numeric = e.code() == ErrorCode::OverflowGuard || e.code() == ErrorCode::NonFiniteResult;
    return numeric ? kExitNumeric : kExitInvalid;
  }
}

}  // namespace uip
