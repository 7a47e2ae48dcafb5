#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "uip/asymptotics.hpp"
#include "uip/market_model.hpp"
#include "uip/pricer.hpp"
#include "uip/quadrature.hpp"

namespace uip {

// Flat `section.key = value` text; `#` starts a comment. Lists are comma
// separated, price points are separated by `;`. Unknown keys are errors.
struct ExperimentConfig {
  // model
  std::size_t d = 1;
  RowVec s0{8.0};
  RowVec mu{0.0};
  std::vector<double> sigma{1.0};  // row-major d x d
  double T = 1.0;
  // payoff: basket_call | basket_call_generic | zero | straddle
  std::string payoff_kind = "basket_call";
  RowVec a{1.0};
  double b = -8.0;
  // impact
  double A = 1.0;
  std::vector<double> A_grid{0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> lambdas{0.4, 0.2, 0.1, 0.05};
  RowVec phi0{0.0};
  // numerics
  std::size_t n_paths = 100000;
  std::size_t n_steps = 0;  // 0: auto
  std::string quadrature = "default";  // default | composite | hermite
  int quad_m = 64;
  double fd_dt = 1e-3;
  double fd_dx_rel = 1e-3;
  std::uint64_t seed = 42;
  int workers = 0;
  // price
  double price_t = 0.0;
  std::vector<RowVec> price_points{{8.0}};
  // dual: zero | optimal | constant | random:<count>
  std::vector<std::string> dual_specs{"zero", "optimal", "constant"};
  RowVec dual_constant{0.5};
  // output
  std::string csv;
  int precision = 9;
};

// Parses and validates. `require_seed` enforces an explicit numerics.seed.
ExperimentConfig parse_config(std::string_view text, bool require_seed = true);
ExperimentConfig load_config(const std::string& path);
// Canonical text; parse_config(emit_config(c)) reproduces c.
std::string emit_config(const ExperimentConfig& cfg);
// FNV-1a of the canonical text, ignoring numerics.workers.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Throws on any module-level precondition violation.
void validate(const ExperimentConfig& cfg);

BachelierModel build_model(const ExperimentConfig& cfg);
Payoff build_payoff(const ExperimentConfig& cfg);
// nullptr selects the library default rule.
std::shared_ptr<const QuadratureRule> build_rule(const ExperimentConfig& cfg);
Execution build_execution(const ExperimentConfig& cfg);

}  // namespace uip
