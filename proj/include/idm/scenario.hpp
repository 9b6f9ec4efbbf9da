#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "idm/types.hpp"

namespace idm {

enum class ViolationKind {
  NonPositiveParameter,
  DeltaNotGreaterThanOne,
  GapNotExceedingLength,
  NegativeInitialVelocity,
  TauExceedsHorizon,
  InvalidVariantParameter,
  InvalidLeaderProfile,
  InvalidSolverSettings,
  EmptyPlatoon,
  NonFiniteValue,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

class InvalidScenario : public std::runtime_error {
 public:
  explicit InvalidScenario(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Every violated invariant, in a stable order. Empty means valid.
std::vector<Violation> check_scenario(const Scenario& s);

/// Returns the scenario unchanged, or throws InvalidScenario carrying the full list.
Scenario validate_scenario(Scenario s);

/// Catalog of the reproduction setups, keyed by name.
const std::map<std::string, Scenario>& builtin_scenarios();

/// Throws std::out_of_range with the known names when `name` is missing.
const Scenario& builtin_scenario(const std::string& name);

/// Parameters from the commonly cited calibration (a=0.73, b=1.67, 120 km/h, ...).
ModelParams table_params();

/// The parameter set of the counterexample figures (a=1, b=2, v_free=1, tau=1.6, l=4, s0=2, delta=4).
ModelParams counterexample_params();

/// Two-vehicle datum: leader at x_l0, follower at x_l0 - l - gap.
PlatoonState leader_follower(const ModelParams& p, double gap, double v_follower, double v_leader,
                             double x_leader = 0.0);

}  // namespace idm
