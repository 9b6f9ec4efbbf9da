#pragma once

#include <stdexcept>

#include "idm/types.hpp"

namespace idm {

/// Follower/leader pair evaluated by the acceleration functions.
struct AccelInput {
  double x = 0.0;    ///< follower position
  double v = 0.0;    ///< follower velocity
  double x_l = 0.0;  ///< leader position
  double v_l = 0.0;  ///< leader velocity

  double gap(double length) const { return x_l - x - length; }
};

/// Raised when the net gap x_l - x - l is not strictly positive.
class DomainViolation : public std::domain_error {
 public:
  explicit DomainViolation(double gap);
  double gap() const { return gap_; }

 private:
  double gap_;
};

/// (|v|/v_free)^delta, or sgn(v)(|v|/v_free)^delta when `signed_power`. 0^delta = 0, sgn(0) = 0.
double power_term(const ModelParams& p, double v, bool signed_power);

/// ((2 sqrt(ab)(s0 + v tau) + v(v - v_l)) / (2 sqrt(ab) gap))^2
double interaction_term(const ModelParams& p, double v, double v_l, double gap);

/// Classic IDM acceleration a(1 - power - interaction).
double idm_accel(const ModelParams& p, const AccelInput& in, bool signed_power = false);

/// a(1 - (|v|/v_free)^delta).
double free_flow_accel(const ModelParams& p, double v);

/// Piecewise linear ramp: 0 for v <= 0, v/eps_v on [0, eps_v], 1 above.
double h_saturation(double eps_v, double v);

/// eps_d/s0 for gap <= eps_d, linear up to 1 at gap = s0, 1 beyond.
double h_tilde_saturation(double eps_d, double s0, double gap);

/// Acceleration of the configured variant. `mode` only matters for Discontinuous.
double variant_accel(const ModelParams& p, const VariantConfig& cfg, const AccelInput& in,
                     Mode mode = Mode::Moving);

/// Which branch of the discontinuous model applies at (v, gap).
enum class DiscontinuousBranch { PositiveVelocity, ZeroVelocityFarGap, ZeroVelocityNearGap, NegativeVelocity };

DiscontinuousBranch discontinuous_branch(const ModelParams& p, double v, double gap);

/// The acceleration projected right-hand side on the whole real line of gaps,
/// including gap <= 0 after the follower has run into the leader. At gap == 0
/// the interaction term is unbounded and the clamp -a_min binds.
double projected_accel_through_collapse(const ModelParams& p, double a_min, const AccelInput& in,
                                        bool signed_power = false);

}  // namespace idm
