#pragma once

// Reference computations for the tests. Nothing here calls into the
// library, so agreement is evidence rather than a tautology.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double x) { return 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2)); }

// E[(Z + m)^+] for Z ~ N(0, 1).
inline double call_unit(double m) { return m * Phi(m) + phi(m); }

// u^A(0, x) for a one-dimensional basket call (a x + b)^+ with volatility s.
inline double basket_price_1d(double A, double a, double b, double s, double tau, double x) {
  const double spread = std::abs(a * s) * std::sqrt(tau);
  const double shifted = a * x + b + 0.5 * std::sqrt(A) * a * a * s;
  return spread * call_unit(shifted / spread);
}

// Eigenvalues of [[a, b], [b, c]], ascending.
inline std::pair<double, double> eig2(double a, double b, double c) {
  const double r = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
  return {0.5 * (a + c - r), 0.5 * (a + c + r)};
}

namespace detail {
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                        int depth = 50) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return detail::simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

// sup_y [ f(x + y) - y^2 / (2 sqrt(A) s) ] in one dimension by a dense scan
// followed by golden-section polishing around the best node.
inline double sup_convolution_1d(const std::function<double(double)>& f, double A, double s, double x,
                                 double radius) {
  auto obj = [&](double y) { return f(x + y) - y * y / (2.0 * std::sqrt(A) * s); };
  const int n = 20001;
  double best_y = 0.0;
  double best = obj(0.0);
  for (int i = 0; i < n; ++i) {
    const double y = -radius + 2.0 * radius * i / (n - 1);
    const double v = obj(y);
    if (v > best) {
      best = v;
      best_y = y;
    }
  }
  const double step = 2.0 * radius / (n - 1);
  double lo = best_y - step;
  double hi = best_y + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double c = hi - g * (hi - lo);
    const double d = lo + g * (hi - lo);
    if (obj(c) > obj(d)) {
      hi = d;
    } else {
      lo = c;
    }
  }
  return std::max(best, obj(0.5 * (lo + hi)));
}

// Explicit Euler for dPhi/dt = k (theta - Phi), scalar.
inline std::vector<double> explicit_euler(double k, double theta, double phi0, double h, int n) {
  std::vector<double> out{phi0};
  for (int i = 0; i < n; ++i) out.push_back(out.back() + h * k * (theta - out.back()));
  return out;
}

}  // namespace oracle
