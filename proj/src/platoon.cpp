#include "idm/platoon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "idm/accel.hpp"

namespace idm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

double leader_accel(const LeaderProfile& profile, const ModelParams& p, double t, double v_l) {
  return std::visit(overloaded{
                        [](const ConstantAccel& c) { return c.u; },
                        [&](const FreeFlow&) { return free_flow_accel(p, v_l); },
                        [&](const PiecewiseConstant& pc) {
                          double u = 0.0;
                          for (const auto& [start, accel] : pc.schedule) {
                            if (t < start) break;
                            u = accel;
                          }
                          return u;
                        },
                        [&](const StopAndGoSine& sg) {
                          const double s = std::sin(t / sg.angular_divisor);
                          if (s >= sg.threshold) return sg.amplitude;
                          if (s <= -sg.threshold) return -sg.amplitude;
                          return 0.0;
                        },
                    },
                    profile);
}

std::vector<double> leader_breakpoints(const LeaderProfile& profile, double horizon) {
  std::vector<double> out;
  if (const auto* pc = std::get_if<PiecewiseConstant>(&profile)) {
    for (const auto& [start, _] : pc->schedule)
      if (start > 0.0 && start < horizon) out.push_back(start);
  } else if (const auto* sg = std::get_if<StopAndGoSine>(&profile)) {
    const double d = sg->angular_divisor;
    const double phi = std::asin(sg->threshold);
    constexpr double pi = std::numbers::pi;
    const double phases[] = {phi, pi - phi, pi + phi, 2.0 * pi - phi};
    for (int k = 0;; ++k) {
      const double base = 2.0 * pi * k;
      if (d * (base + phases[0]) >= horizon) break;
      for (double ph : phases) {
        const double t = d * (base + ph);
        if (t > 0.0 && t < horizon) out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool tolerates_collapse(const Scenario& s) {
  return s.solver.continue_after_collapse && std::holds_alternative<AccelerationProjected>(s.variant.kind);
}

bool eval_rhs_flat(const Scenario& s, double profile_time, std::span<const double> y, std::span<const Mode> modes,
                   std::span<double> dy) {
  const auto& p = s.params;
  const std::size_t n = modes.size();
  const bool project = projects_velocity(s.variant.kind);
  const bool through_collapse = tolerates_collapse(s);
  bool ok = true;

  dy[0] = y[1];
  dy[1] = leader_accel(s.leader, p, profile_time, y[1]);

  for (std::size_t i = 1; i < n; ++i) {
    const double x = y[2 * i];
    const double v = y[2 * i + 1];
    if (modes[i] == Mode::Stopped) {
      dy[2 * i] = 0.0;
      dy[2 * i + 1] = 0.0;
      continue;
    }
    dy[2 * i] = project ? std::max(v, 0.0) : v;
    const AccelInput in{x, v, y[2 * (i - 1)], y[2 * (i - 1) + 1]};
    const double gap = in.gap(p.l);
    if (gap > 0.0) {
      dy[2 * i + 1] = variant_accel(p, s.variant, in, modes[i]);
    } else if (through_collapse) {
      dy[2 * i + 1] = projected_accel_through_collapse(p, std::get<AccelerationProjected>(s.variant.kind).a_min, in,
                                                       s.variant.signed_power_term);
    } else {
      dy[2 * i + 1] = std::numeric_limits<double>::quiet_NaN();
      ok = false;
    }
  }
  for (std::size_t k = 0; k < 2 * n; ++k)
    if (!std::isfinite(dy[k])) ok = false;
  return ok;
}

std::vector<double> flatten(const PlatoonState& state) {
  std::vector<double> y;
  y.reserve(2 * state.vehicles.size());
  for (const auto& veh : state.vehicles) {
    y.push_back(veh.x);
    y.push_back(veh.v);
  }
  return y;
}

PlatoonState unflatten(double t, std::span<const double> y, std::span<const Mode> modes) {
  PlatoonState st;
  st.t = t;
  st.vehicles.resize(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) st.vehicles[i] = {y[2 * i], y[2 * i + 1], modes[i]};
  return st;
}

RhsEvaluation eval_rhs(const Scenario& s, const PlatoonState& state) {
  std::vector<Mode> modes;
  modes.reserve(state.vehicles.size());
  for (const auto& veh : state.vehicles) modes.push_back(veh.mode);
  const auto y = flatten(state);
  std::vector<double> dy(y.size());
  RhsEvaluation out;
  out.domain_ok = eval_rhs_flat(s, state.t, y, modes, dy);
  out.active_modes = std::move(modes);
  out.derivatives.resize(state.vehicles.size());
  for (std::size_t i = 0; i < state.vehicles.size(); ++i) out.derivatives[i] = {dy[2 * i], dy[2 * i + 1]};
  return out;
}

PlatoonState update_modes(const Scenario& s, const PlatoonState& state) {
  if (!std::holds_alternative<Discontinuous>(s.variant.kind)) return state;
  const auto& p = s.params;
  PlatoonState next = state;
  for (std::size_t i = 1; i < next.vehicles.size(); ++i) {
    auto& veh = next.vehicles[i];
    const double gap = net_gap(next.vehicles[i - 1], veh, p.l);
    if (veh.mode == Mode::Moving && veh.v <= 0.0) {
      // Reaching zero speed inside s0 latches the standstill branch; otherwise
      // only the overshoot of the located crossing is removed.
      veh.v = 0.0;
      if (gap < p.s0) veh.mode = Mode::Stopped;
    } else if (veh.mode == Mode::Stopped && gap >= p.s0) {
      const AccelInput at_rest{veh.x, 0.0, next.vehicles[i - 1].x, next.vehicles[i - 1].v};
      if (idm_accel(p, at_rest, s.variant.signed_power_term) > 0.0) veh.mode = Mode::Moving;
    }
  }
  return next;
}

}  // namespace idm
