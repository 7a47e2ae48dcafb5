#include "uip/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "uip/errors.hpp"
#include "uip/rng.hpp"

namespace uip {

namespace {

struct Rule1d {
  std::vector<double> x;
  std::vector<double> w;
};

// Physicists' Gauss-Hermite by Newton iteration on the orthonormal
// recurrence, converted to the N(0,1) weight.
Rule1d hermite_1d(int m) {
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  std::vector<double> x(m), w(m);
  double z = 0.0;
  for (int i = 0; i < (m + 1) / 2; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * m + 1.0) - 1.85575 * std::pow(2.0 * m + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(m), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * m) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[m - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[m - 1 - i] = w[i];
  }
  Rule1d r;
  r.x.resize(m);
  r.w.resize(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    r.x[i] = std::numbers::sqrt2 * x[m - 1 - i];
    r.w[i] = w[m - 1 - i] / std::sqrt(std::numbers::pi);
    total += r.w[i];
  }
  for (double& v : r.w) v /= total;
  return r;
}

// Gauss-Legendre on [-1, 1].
Rule1d legendre_1d(int m) {
  Rule1d r;
  r.x.resize(m);
  r.w.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = m * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-16) break;
    }
    r.x[i] = -z;
    r.x[m - 1 - i] = z;
    r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[m - 1 - i] = r.w[i];
  }
  return r;
}

std::size_t checked_size(std::size_t per_axis, int d, std::size_t budget) {
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    if (total > budget / per_axis) {
      throw Error(ErrorCode::BudgetExceeded, std::to_string(per_axis) + "^" + std::to_string(d) +
                                                 " nodes exceed budget " + std::to_string(budget));
    }
    total *= per_axis;
  }
  return total;
}

QuadratureRule tensorize(const Rule1d& r, int d, std::string kind, std::size_t budget) {
  const std::size_t m = r.x.size();
  const std::size_t total = checked_size(m, d, budget);
  QuadratureRule rule;
  rule.dim = static_cast<std::size_t>(d);
  rule.kind = std::move(kind);
  rule.nodes.resize(total * rule.dim);
  rule.weights.resize(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    double weight = 1.0;
    for (std::size_t axis = 0; axis < rule.dim; ++axis) {
      const std::size_t i = rest % m;
      rest /= m;
      rule.nodes[flat * rule.dim + axis] = r.x[i];
      weight *= r.w[i];
    }
    rule.weights[flat] = weight;
  }
  return rule;
}

}  // namespace

QuadratureRule build_gauss_hermite(int m, int d, std::size_t budget) {
  if (m < 2 || d < 1) throw Error(ErrorCode::InvalidParameter, "Gauss-Hermite needs m >= 2, d >= 1");
  return tensorize(hermite_1d(m), d, "gauss_hermite", budget);
}

QuadratureRule build_composite_normal(int panels, int points_per_panel, int d, double half_width,
                                      std::size_t budget) {
  if (panels < 2 || panels % 2 != 0 || points_per_panel < 1 || d < 1 || !(half_width > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "composite rule needs an even panel count >= 2");
  }
  checked_size(static_cast<std::size_t>(panels) * points_per_panel, d, budget);
  const Rule1d gl = legendre_1d(points_per_panel);
  const double width = 2.0 * half_width / panels;
  Rule1d r;
  for (int p = 0; p < panels; ++p) {
    const double left = -half_width + width * p;
    for (int q = 0; q < points_per_panel; ++q) {
      const double x = left + 0.5 * width * (gl.x[q] + 1.0);
      r.x.push_back(x);
      r.w.push_back(0.5 * width * gl.w[q] * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi));
    }
  }
  const double total = pairwise_sum(r.w);
  for (double& v : r.w) v /= total;
  // Exact mirror symmetry of the abscissae.
  const std::size_t n = r.x.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    r.x[n - 1 - i] = -r.x[i];
    r.w[n - 1 - i] = r.w[i];
  }
  return tensorize(r, d, "composite_normal", budget);
}

QuadratureRule build_antithetic_mc(std::size_t n_pairs, int d, std::uint64_t seed) {
  if (n_pairs == 0 || d < 1) throw Error(ErrorCode::InvalidParameter, "Monte Carlo rule needs samples");
  QuadratureRule rule;
  rule.dim = static_cast<std::size_t>(d);
  rule.kind = "antithetic_mc";
  rule.nodes.resize(2 * n_pairs * rule.dim);
  rule.weights.assign(2 * n_pairs, 1.0 / static_cast<double>(2 * n_pairs));
  for (std::size_t i = 0; i < n_pairs; ++i) {
    CounterRng rng(seed, i);
    for (std::size_t axis = 0; axis < rule.dim; ++axis) {
      const double z = rng.normal();
      rule.nodes[(2 * i) * rule.dim + axis] = z;
      rule.nodes[(2 * i + 1) * rule.dim + axis] = -z;
    }
  }
  return rule;
}

QuadratureRule build_interval_rule(int panels, int points_per_panel, double lo, double hi) {
  if (panels < 1 || points_per_panel < 1 || !(hi > lo)) {
    throw Error(ErrorCode::InvalidParameter, "interval rule needs panels, points >= 1 and hi > lo");
  }
  const Rule1d base = legendre_1d(points_per_panel);
  const double width = (hi - lo) / panels;
  QuadratureRule rule;
  rule.dim = 1;
  rule.kind = "gauss_legendre";
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    for (int i = 0; i < points_per_panel; ++i) {
      rule.nodes.push_back(mid + 0.5 * width * base.x[i]);
      rule.weights.push_back(0.5 * width * base.w[i]);
    }
  }
  return rule;
}

QuadratureRule default_rule(std::size_t d) {
  switch (d) {
    case 1: return build_composite_normal(1000, 8, 1);
    case 2: return build_composite_normal(100, 4, 2);
    case 3: return build_composite_normal(24, 4, 3);
    default: return build_antithetic_mc(500'000, static_cast<int>(d), 0x5eed);
  }
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace uip
