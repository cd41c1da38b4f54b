#pragma once

#include <cmath>

namespace anisobound {

/// |t|^p with exact fast paths for the small integer exponents that dominate
/// the test problems.
inline double abs_pow(double t, double p) {
  const double a = std::abs(t);
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (p == 3.0) return a * a * a;
  if (p == 4.0) {
    const double a2 = a * a;
    return a2 * a2;
  }
  if (a == 0.0) return 0.0;
  return std::pow(a, p);
}

/// d/dt |t|^p = p |t|^(p-2) t, for p > 1.
inline double abs_pow_derivative(double t, double p) {
  if (p == 2.0) return 2.0 * t;
  if (t == 0.0) return 0.0;
  if (p == 3.0) return 3.0 * std::abs(t) * t;
  return p * std::pow(std::abs(t), p - 1.0) * (t > 0.0 ? 1.0 : -1.0);
}

}  // namespace anisobound
