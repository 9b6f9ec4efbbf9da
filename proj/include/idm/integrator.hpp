#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "idm/types.hpp"

namespace idm {

enum class EventKind { VelocityZeroCrossing, GapReachesS0, GapCollapse, BlowupDetected, LeaderVelocityNegative };

std::string to_string(EventKind kind);

struct Event {
  EventKind kind;
  std::size_t vehicle = 0;  ///< 0-based platoon index (0 = leader)
  double t = 0.0;
  PlatoonState state_at_event;  ///< located state, before any mode update
};

struct Sample {
  PlatoonState state;
  std::vector<double> accel;  ///< dv/dt per vehicle at this state

  double t() const { return state.t; }
};

enum class TerminationKind { Completed, Blowup, GapCollapse, LeaderVelocityNegative, StepLimitReached };

std::string to_string(TerminationKind kind);

struct Termination {
  TerminationKind kind = TerminationKind::Completed;
  /// Horizon for Completed; t_est for Blowup; the located time otherwise.
  double t = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<Event> events;
  Termination termination;
  double vehicle_length = 0.0;

  std::size_t vehicle_count() const { return samples.empty() ? 0 : samples.front().state.vehicles.size(); }
};

/// Adaptive Dormand-Prince integration with event location and blow-up
/// detection. Throws InvalidScenario when the scenario fails validation.
Trajectory integrate(const Scenario& s);

/// Classical fixed-step RK4 with post-step mode handling; the brute force
/// oracle for the adaptive integrator.
Trajectory reference_integrate(const Scenario& s, double dt);

class NoSignChange : public std::invalid_argument {
 public:
  NoSignChange(double t_lo, double t_hi);
};

/// Bisection on a bracketing interval. Returns the left end when f(t_lo) == 0,
/// otherwise a point within `tol` of the root on the side where f has left the
/// sign of f(t_lo).
double locate_event(const std::function<double(double)>& f, double t_lo, double t_hi, double tol);

}  // namespace idm
