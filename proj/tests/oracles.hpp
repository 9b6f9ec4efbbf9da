#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the engine.

#include <cmath>
#include <stdexcept>

namespace oracle {

// Follower velocity of the velocity projected example while it is held at
// x = x0 (v < 0): v' = a(1 - s0^2/(eps + t^2)^2), leader accelerating with
// u = 2 from rest, so the gap is eps + t^2.
inline double projected_example_velocity(double a, double s0, double eps, double t) {
  const double se = std::sqrt(eps);
  return a * t - a * s0 * s0 * (se * t / (eps + t * t) + std::atan(t / se)) / (2.0 * eps * se);
}

// First positive root of the expression above, by bracketing and bisection.
inline double projected_example_recovery(double a, double s0, double eps) {
  double lo = 1e-9;
  if (projected_example_velocity(a, s0, eps, lo) >= 0.0) return 0.0;
  double hi = 1.0;
  while (projected_example_velocity(a, s0, eps, hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("no recovery");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (projected_example_velocity(a, s0, eps, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Exact delta* and both eps0* forms written out term by term.
struct Bounds {
  double delta_star, statement, proof;
};

inline Bounds hand_bounds(double a, double s0, double v_max) {
  const double v4 = std::pow(v_max, 4);
  const double delta_star = (-3.0 * v_max * v_max + std::sqrt(9.0 * v4 + 4.0 * a * a * s0 * s0)) / (2.0 * a);
  const double num = a * s0 * s0 * delta_star;
  const double den = a * delta_star + 2.0 * v_max * v_max;
  return {delta_star, num / (8.0 * den), std::sqrt(num / (4.0 * den))};
}

}  // namespace oracle
