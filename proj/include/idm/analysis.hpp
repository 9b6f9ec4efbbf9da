#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "idm/integrator.hpp"
#include "idm/types.hpp"

namespace idm {

struct TheoreticalBounds {
  double v_max = 0.0;
  double delta_star = 0.0;
  double eps0_star = 0.0;                ///< theorem statement form
  double eps0_star_proof_variant = 0.0;  ///< form derived in the proof
  bool safe_distancing_ok = false;
  bool global_wellposed_ok = false;

  /// The smaller of the two gap bounds; the only one invariant checks rely on.
  double conservative_eps0() const { return std::min(eps0_star, eps0_star_proof_variant); }
};

struct GapBounds {
  double delta_star;
  double eps0_star;
  double eps0_star_proof_variant;
};

GapBounds gap_bounds(double a, double s0, double v_max);

/// v_max is the largest initial velocity in the platoon or v_free, whichever is bigger.
TheoreticalBounds compute_bounds(const ModelParams& p, const PlatoonState& initial);

/// As above, but accounts for the acceleration-projected variant, whose
/// velocity is only capped by v0 + a T.
TheoreticalBounds compute_bounds(const Scenario& s);

/// s0 - (v0 - v_l0)^2 / (2a) > 0 for every consecutive pair.
bool safe_distancing(const ModelParams& p, const PlatoonState& initial);

struct RunMetrics {
  double avg_gap = 0.0;
  double gap_variance = 0.0;
  double min_gap = 0.0;
  double min_velocity = 0.0;
  std::optional<double> t_first_negative_v;
  std::optional<double> t_blowup_est;
  std::optional<double> t_recover_positive_v;
};

class EmptyTrajectory : public std::invalid_argument {
 public:
  EmptyTrajectory() : std::invalid_argument("trajectory has no samples") {}
};

struct VehiclePair {
  std::size_t leader = 0;
  std::size_t follower = 1;
};

/// Gap statistics are exact moments of the piecewise linear interpolant of the
/// samples, so they do not depend on how densely the solver sampled.
RunMetrics compute_metrics(const Trajectory& tr, VehiclePair pair = {});

struct Classification {
  // Conditions on the input.
  bool initial_gap_below_s0 = false;
  bool safe_distancing_ok = false;
  bool global_wellposed_ok = false;
  bool equilibrium_hypotheses = false;  ///< v0 > v_l0 > 0, gap = s0, free-flow leader, safe distancing
  bool gap_bound_hypotheses = false;    ///< classic model, every initial gap above the bound, leader never reversing

  // Observations.
  bool negative_velocity_observed = false;
  double min_gap_observed = 0.0;
  std::optional<bool> gap_bound_held;       ///< only set when gap_bound_hypotheses hold
  std::optional<double> equilibrium_time;   ///< only set when equilibrium_hypotheses hold
};

Classification classify_run(const Scenario& s, const Trajectory& tr, const TheoreticalBounds& b);

struct SweepPoint {
  double eps = 0.0;
  RunMetrics metrics;
};

/// Reruns `base` with the first follower placed at net gap eps behind the
/// leader, for each eps. Runs execute concurrently; output follows input order.
/// A run that never goes below zero speed reports t_recover_positive_v = 0.
std::vector<SweepPoint> epsilon_sweep(const Scenario& base, const std::vector<double>& eps_values);

/// Latest time the blow-up can happen once v(t_star) = v_star < -1 is seen in
/// the analytic blow-up configuration.
double blowup_time_upper_bound(double t_star, double v_star);

/// Position increments of the follower over the last `window` samples are
/// finite and shrink from the first half of the window to the second.
bool position_converges(const Trajectory& tr, std::size_t follower, std::size_t window = 10);

}  // namespace idm
