#pragma once

#include <cmath>

namespace wfl {

namespace detail {

// E(s) = e^{-1/s} for s > 0, else 0.
inline double flat_exp(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace detail

/// Smooth step g(s) = E(1-s) / (E(s) + E(1-s)): 1 for s <= 0, 0 for s >= 1,
/// C-infinity and nonincreasing; g(1/2) = 1/2.
inline double smooth_step(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double p = detail::flat_exp(s);
  const double q = detail::flat_exp(1.0 - s);
  return q / (p + q);
}

/// g'(s), using E'(s) = E(s) / s^2.
inline double smooth_step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double p = detail::flat_exp(s);
  const double q = detail::flat_exp(1.0 - s);
  const double dp = p / (s * s);
  const double dq = -q / ((1.0 - s) * (1.0 - s));
  return (dq * (p + q) - q * (dp + dq)) / ((p + q) * (p + q));
}

/// Radial bump: 1 for r <= inner, 0 for r >= 2 inner, smooth in between.
inline double radial_bump(double r, double inner) { return smooth_step((r - inner) / inner); }

}  // namespace wfl
