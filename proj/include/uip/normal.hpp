#pragma once

#include <cmath>
#include <numbers>

namespace uip {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// E[(Z + m)^+] for Z ~ N(0,1): the normalized Bachelier call.
inline double bachelier_call_unit(double m) { return m * normal_cdf(m) + normal_pdf(m); }

}  // namespace uip
