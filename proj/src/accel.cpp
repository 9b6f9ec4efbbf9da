#include "idm/accel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace idm {

namespace {

std::string gap_message(double gap) {
  std::ostringstream os;
  os << "net gap " << gap << " is not strictly positive";
  return os.str();
}

double checked_gap(const ModelParams& p, const AccelInput& in) {
  const double gap = in.gap(p.l);
  if (!(gap > 0.0)) throw DomainViolation(gap);
  return gap;
}

}  // namespace

DomainViolation::DomainViolation(double gap) : std::domain_error(gap_message(gap)), gap_(gap) {}

double power_term(const ModelParams& p, double v, bool signed_power) {
  const double r = std::abs(v) / p.v_free;
  const double mag = r == 0.0 ? 0.0 : std::exp(p.delta * std::log(r));
  if (!signed_power) return mag;
  return v > 0.0 ? mag : (v < 0.0 ? -mag : 0.0);
}

double interaction_term(const ModelParams& p, double v, double v_l, double gap) {
  const double two_sqrt_ab = 2.0 * std::sqrt(p.a * p.b);
  const double ratio = (two_sqrt_ab * (p.s0 + v * p.tau) + v * (v - v_l)) / (two_sqrt_ab * gap);
  return ratio * ratio;
}

double idm_accel(const ModelParams& p, const AccelInput& in, bool signed_power) {
  const double gap = checked_gap(p, in);
  return p.a * (1.0 - power_term(p, in.v, signed_power) - interaction_term(p, in.v, in.v_l, gap));
}

double free_flow_accel(const ModelParams& p, double v) { return p.a * (1.0 - power_term(p, v, false)); }

double h_saturation(double eps_v, double v) {
  if (v <= 0.0) return 0.0;
  if (v >= eps_v) return 1.0;
  return v / eps_v;
}

double h_tilde_saturation(double eps_d, double s0, double gap) {
  const double floor = eps_d / s0;
  if (gap <= eps_d) return floor;
  if (gap >= s0) return 1.0;
  return floor + (gap - eps_d) * (1.0 - floor) / (s0 - eps_d);
}

DiscontinuousBranch discontinuous_branch(const ModelParams& p, double v, double gap) {
  if (v > 0.0) return DiscontinuousBranch::PositiveVelocity;
  if (v < 0.0) return DiscontinuousBranch::NegativeVelocity;
  return gap >= p.s0 ? DiscontinuousBranch::ZeroVelocityFarGap : DiscontinuousBranch::ZeroVelocityNearGap;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double variant_accel(const ModelParams& p, const VariantConfig& cfg, const AccelInput& in, Mode mode) {
  const double gap = checked_gap(p, in);
  const bool sp = cfg.signed_power_term;
  auto regularized = [&](double weight) {
    return p.a * (1.0 - power_term(p, in.v, sp) - weight * interaction_term(p, in.v, in.v_l, gap));
  };
  return std::visit(
      overloaded{
          [&](const Classic&) { return idm_accel(p, in, sp); },
          [&](const VelocityProjected&) {
            AccelInput projected = in;
            projected.v = std::max(in.v, 0.0);
            return idm_accel(p, projected, sp);
          },
          [&](const AccelerationProjected& ap) {
            AccelInput projected = in;
            projected.v = std::max(in.v, 0.0);
            return std::max(idm_accel(p, projected, sp), -ap.a_min);
          },
          [&](const VelocityRegularized& vr) { return regularized(h_saturation(vr.eps_v, in.v)); },
          [&](const DistanceRegularized& dr) { return regularized(h_tilde_saturation(dr.eps_d, p.s0, gap)); },
          [&](const Discontinuous&) {
            if (mode == Mode::Stopped) return 0.0;
            if (discontinuous_branch(p, in.v, gap) == DiscontinuousBranch::ZeroVelocityNearGap) return 0.0;
            return idm_accel(p, in, sp);
          },
      },
      cfg.kind);
}

double projected_accel_through_collapse(const ModelParams& p, double a_min, const AccelInput& in, bool signed_power) {
  const double v = std::max(in.v, 0.0);
  const double gap = in.gap(p.l);
  if (gap == 0.0) return -a_min;
  const double raw = p.a * (1.0 - power_term(p, v, signed_power) - interaction_term(p, v, in.v_l, gap));
  return std::max(raw, -a_min);
}

}  // namespace idm
