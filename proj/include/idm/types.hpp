#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace idm {

/// The seven IDM parameters, SI units throughout.
struct ModelParams {
  double a = 0.0;       ///< maximum acceleration [m/s^2]
  double b = 0.0;       ///< comfortable deceleration [m/s^2]
  double v_free = 0.0;  ///< desired velocity [m/s]
  double tau = 0.0;     ///< desired time headway [s]
  double s0 = 0.0;      ///< minimum spacing (net, bumper to bumper) [m]
  double l = 0.0;       ///< vehicle length [m]
  double delta = 0.0;   ///< acceleration exponent

  bool operator==(const ModelParams&) const = default;
};

// Model variants. Each carries only the extra parameter it needs.
struct Classic {
  bool operator==(const Classic&) const = default;
};
struct VelocityProjected {
  bool operator==(const VelocityProjected&) const = default;
};
struct AccelerationProjected {
  double a_min = 0.0;  ///< deceleration bound [m/s^2]
  bool operator==(const AccelerationProjected&) const = default;
};
struct VelocityRegularized {
  double eps_v = 0.0;  ///< saturation width [m/s]
  bool operator==(const VelocityRegularized&) const = default;
};
struct DistanceRegularized {
  double eps_d = 0.0;  ///< saturation floor gap [m], 0 < eps_d < s0
  bool operator==(const DistanceRegularized&) const = default;
};
struct Discontinuous {
  bool operator==(const Discontinuous&) const = default;
};

using VariantKind = std::variant<Classic, VelocityProjected, AccelerationProjected,
                                 VelocityRegularized, DistanceRegularized, Discontinuous>;

struct VariantConfig {
  VariantKind kind = Classic{};
  /// Replace (|v|/v_free)^delta by sgn(v)(|v|/v_free)^delta.
  bool signed_power_term = false;

  bool operator==(const VariantConfig&) const = default;
};

/// Kebab-case identifier used by the CLI and config files.
std::string variant_name(const VariantKind& kind);

/// Velocity projected and acceleration projected variants integrate max{v,0} as dx/dt.
bool projects_velocity(const VariantKind& kind);

enum class Mode { Moving, Stopped };

struct VehicleState {
  double x = 0.0;
  double v = 0.0;
  Mode mode = Mode::Moving;

  bool operator==(const VehicleState&) const = default;
};

/// vehicles[0] is the leader; larger indices are further upstream.
struct PlatoonState {
  double t = 0.0;
  std::vector<VehicleState> vehicles;

  bool operator==(const PlatoonState&) const = default;
};

// Leader acceleration profiles.
struct ConstantAccel {
  double u = 0.0;
  bool operator==(const ConstantAccel&) const = default;
};
struct FreeFlow {
  bool operator==(const FreeFlow&) const = default;
};
struct PiecewiseConstant {
  /// (t_start, accel) pairs sorted by t_start; accel is 0 before the first entry.
  std::vector<std::pair<double, double>> schedule;
  bool operator==(const PiecewiseConstant&) const = default;
};
/// u(t) = A 1{sin(t/d) >= th} - A 1{sin(t/d) <= -th}
struct StopAndGoSine {
  double amplitude = 0.0;
  double threshold = 0.8;
  double angular_divisor = 4.0;
  bool operator==(const StopAndGoSine&) const = default;
};

using LeaderProfile = std::variant<ConstantAccel, FreeFlow, PiecewiseConstant, StopAndGoSine>;

std::string leader_profile_name(const LeaderProfile& profile);

struct SolverSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double dt_init = 1e-3;
  double dt_min = 1e-13;
  double dt_max = 0.05;
  /// Follower speed below -threshold declares a blow-up. Defaults to 50 v_free.
  std::optional<double> blowup_speed_threshold;
  double event_tol = 1e-9;
  long max_steps = 5'000'000;
  /// Leader velocity below -tolerance aborts the run.
  double leader_velocity_tol = 1e-9;
  /// Keep integrating through a net gap collapse. Only honored by the
  /// acceleration projected variant, whose right-hand side stays bounded there.
  bool continue_after_collapse = false;

  bool operator==(const SolverSettings&) const = default;
};

double effective_blowup_threshold(const SolverSettings& solver, const ModelParams& p);

struct Scenario {
  std::string name;
  ModelParams params;
  VariantConfig variant;
  LeaderProfile leader = FreeFlow{};
  PlatoonState initial;
  double horizon = 0.0;
  SolverSettings solver;

  bool operator==(const Scenario&) const = default;
};

inline double net_gap(const VehicleState& leader, const VehicleState& follower, double length) {
  return leader.x - follower.x - length;
}

}  // namespace idm
