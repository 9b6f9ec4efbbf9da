#pragma once

#include <span>
#include <vector>

#include "idm/types.hpp"

namespace idm {

struct VehicleDerivative {
  double dx = 0.0;
  double dv = 0.0;
};

struct RhsEvaluation {
  std::vector<VehicleDerivative> derivatives;
  std::vector<Mode> active_modes;
  /// False when some consecutive pair has left the domain (net gap <= 0) or a
  /// derivative is not finite. Signaled in-band so step control can reject.
  bool domain_ok = true;
};

/// Leader acceleration at time t for leader velocity v_l.
double leader_accel(const LeaderProfile& profile, const ModelParams& p, double t, double v_l);

/// Times in (0, horizon) where the leader acceleration jumps, ascending.
std::vector<double> leader_breakpoints(const LeaderProfile& profile, double horizon);

/// True when the dynamics stay defined after a net gap collapse.
bool tolerates_collapse(const Scenario& s);

/// Right-hand side of the whole platoon at `state`.
RhsEvaluation eval_rhs(const Scenario& s, const PlatoonState& state);

/// Discrete mode transitions of the discontinuous variant; identity otherwise.
PlatoonState update_modes(const Scenario& s, const PlatoonState& state);

/// Flat-state kernel shared by the integrators. y = [x_1, v_1, x_2, v_2, ...].
/// Piecewise constant leader profiles are evaluated at `profile_time`, which
/// lets a step that ends exactly on a breakpoint stay on one piece.
bool eval_rhs_flat(const Scenario& s, double profile_time, std::span<const double> y, std::span<const Mode> modes,
                   std::span<double> dy);

std::vector<double> flatten(const PlatoonState& state);
PlatoonState unflatten(double t, std::span<const double> y, std::span<const Mode> modes);

}  // namespace idm
