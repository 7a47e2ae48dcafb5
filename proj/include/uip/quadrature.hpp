#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uip/parallel.hpp"

namespace uip {

// Nodes and weights for expectations under N(0, I_d). Nodes are row-major.
struct QuadratureRule {
  std::size_t dim = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::string kind;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return std::span<const double>(nodes).subspan(i * dim, dim);
  }
};

inline constexpr std::size_t kDefaultNodeBudget = 1'000'000;

// Tensorized Gauss-Hermite for the standard normal weight.
// Throws BudgetExceeded if m^d > budget.
QuadratureRule build_gauss_hermite(int m, int d, std::size_t budget = kDefaultNodeBudget);

// Tensorized composite Gauss-Legendre on [-half_width, half_width] against
// the normal density, renormalized to unit mass. Converges for integrands
// with kinks, where Gauss-Hermite stalls.
QuadratureRule build_composite_normal(int panels, int points_per_panel, int d, double half_width = 10.0,
                                      std::size_t budget = kDefaultNodeBudget);

// 2 * n_pairs equally weighted samples {z, -z}.
QuadratureRule build_antithetic_mc(std::size_t n_pairs, int d, std::uint64_t seed);

// Composite Gauss-Legendre on [lo, hi] (plain Lebesgue weight, d = 1).
QuadratureRule build_interval_rule(int panels, int points_per_panel, double lo, double hi);

// Default rule by dimension: composite rules for d <= 3, antithetic
// Monte Carlo with 10^6 samples beyond.
QuadratureRule default_rule(std::size_t d);

// Order-independent summation (pairwise).
double pairwise_sum(std::span<const double> values);

// sum_i w_i f(z_i). Node values are computed per index and summed in index
// order, so the result does not depend on the backend.
template <typename Fn>
double integrate(const QuadratureRule& rule, Fn&& f, const Execution& exec = Execution::serial()) {
  std::vector<double> terms(rule.size());
  parallel_for(exec, rule.size(), [&](std::size_t i) { terms[i] = rule.weights[i] * f(rule.node(i)); });
  return pairwise_sum(terms);
}

}  // namespace uip
