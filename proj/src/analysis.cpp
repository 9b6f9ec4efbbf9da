#include "idm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "idm/integrator.hpp"

namespace idm {

GapBounds gap_bounds(double a, double s0, double v_max) {
  const double v2 = v_max * v_max;
  // (-3v^2 + sqrt(9v^4 + 4a^2 s0^2)) / (2a), rationalized to avoid cancellation at large v.
  const double delta_star = 2.0 * a * s0 * s0 / (3.0 * v2 + std::sqrt(9.0 * v2 * v2 + 4.0 * a * a * s0 * s0));
  const double core = a * s0 * s0 * delta_star / (a * delta_star + 2.0 * v2);
  return {delta_star, core / 8.0, std::sqrt(core / 4.0)};
}

bool safe_distancing(const ModelParams& p, const PlatoonState& initial) {
  for (std::size_t i = 1; i < initial.vehicles.size(); ++i) {
    const double dv = initial.vehicles[i].v - initial.vehicles[i - 1].v;
    if (!(p.s0 - dv * dv / (2.0 * p.a) > 0.0)) return false;
  }
  return true;
}

namespace {

TheoreticalBounds bounds_for(const ModelParams& p, const PlatoonState& initial, double v_max) {
  const auto g = gap_bounds(p.a, p.s0, v_max);
  TheoreticalBounds b;
  b.v_max = v_max;
  b.delta_star = g.delta_star;
  b.eps0_star = g.eps0_star;
  b.eps0_star_proof_variant = g.eps0_star_proof_variant;
  b.safe_distancing_ok = safe_distancing(p, initial);
  b.global_wellposed_ok = p.s0 <= g.eps0_star;
  return b;
}

double initial_speed_cap(const ModelParams& p, const PlatoonState& initial) {
  double v_max = p.v_free;
  for (const auto& veh : initial.vehicles) v_max = std::max(v_max, veh.v);
  return v_max;
}

}  // namespace

TheoreticalBounds compute_bounds(const ModelParams& p, const PlatoonState& initial) {
  return bounds_for(p, initial, initial_speed_cap(p, initial));
}

TheoreticalBounds compute_bounds(const Scenario& s) {
  double v_max = initial_speed_cap(s.params, s.initial);
  if (std::holds_alternative<AccelerationProjected>(s.variant.kind)) {
    for (std::size_t i = 1; i < s.initial.vehicles.size(); ++i)
      v_max = std::max(v_max, s.initial.vehicles[i].v + s.params.a * s.horizon);
  }
  return bounds_for(s.params, s.initial, v_max);
}

namespace {

double gap_at(const Sample& smp, VehiclePair pair, double l) {
  return net_gap(smp.state.vehicles[pair.leader], smp.state.vehicles[pair.follower], l);
}

// Time where the linear interpolant between (t0, v0) and (t1, v1) hits zero.
double zero_between(double t0, double v0, double t1, double v1) {
  if (v0 == v1) return t0;
  return t0 + (t1 - t0) * v0 / (v0 - v1);
}

}  // namespace

RunMetrics compute_metrics(const Trajectory& tr, VehiclePair pair) {
  const auto& smp = tr.samples;
  if (smp.empty()) throw EmptyTrajectory();
  const double l = tr.vehicle_length;
  RunMetrics m;

  const double t_begin = std::min(smp.front().t(), smp.back().t());
  const double t_end = std::max(smp.front().t(), smp.back().t());
  const double duration = t_end - t_begin;
  if (duration > 0.0) {
    double first = 0.0;
    for (std::size_t k = 1; k < smp.size(); ++k)
      first += std::abs(smp[k].t() - smp[k - 1].t()) * (gap_at(smp[k - 1], pair, l) + gap_at(smp[k], pair, l)) / 2.0;
    m.avg_gap = first / duration;
    double second = 0.0;
    for (std::size_t k = 1; k < smp.size(); ++k) {
      const double d0 = gap_at(smp[k - 1], pair, l) - m.avg_gap;
      const double d1 = gap_at(smp[k], pair, l) - m.avg_gap;
      second += std::abs(smp[k].t() - smp[k - 1].t()) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    }
    m.gap_variance = second / duration;
  } else {
    m.avg_gap = gap_at(smp.front(), pair, l);
  }

  m.min_gap = std::numeric_limits<double>::infinity();
  m.min_velocity = std::numeric_limits<double>::infinity();
  for (const auto& s : smp) {
    m.min_gap = std::min(m.min_gap, gap_at(s, pair, l));
    m.min_velocity = std::min(m.min_velocity, s.state.vehicles[pair.follower].v);
  }
  // Time-weighted averages can sit above the sampled minimum only by rounding.
  m.avg_gap = std::max(m.avg_gap, m.min_gap);

  auto v_at = [&](std::size_t k) { return smp[k].state.vehicles[pair.follower].v; };
  auto stopped_at = [&](std::size_t k) { return smp[k].state.vehicles[pair.follower].mode == Mode::Stopped; };

  std::optional<std::size_t> halt;  // first sample of a non-positive phase
  for (std::size_t k = 0; k < smp.size(); ++k) {
    if (v_at(k) < 0.0) {
      m.t_first_negative_v = k == 0 ? smp[0].t() : zero_between(smp[k - 1].t(), v_at(k - 1), smp[k].t(), v_at(k));
      if (!halt) halt = k;
      break;
    }
    if (!halt && stopped_at(k)) halt = k;
  }
  if (halt) {
    for (std::size_t k = *halt + 1; k < smp.size(); ++k) {
      if (v_at(k) > 0.0 && !stopped_at(k)) {
        m.t_recover_positive_v = zero_between(smp[k - 1].t(), v_at(k - 1), smp[k].t(), v_at(k));
        break;
      }
    }
  }
  if (tr.termination.kind == TerminationKind::Blowup) m.t_blowup_est = tr.termination.t;
  return m;
}

Classification classify_run(const Scenario& s, const Trajectory& tr, const TheoreticalBounds& b) {
  const auto& p = s.params;
  const auto& veh = s.initial.vehicles;
  Classification c;
  c.safe_distancing_ok = b.safe_distancing_ok;
  c.global_wellposed_ok = b.global_wellposed_ok;

  bool gaps_above_bound = true;
  for (std::size_t i = 1; i < veh.size(); ++i) {
    const double gap = net_gap(veh[i - 1], veh[i], p.l);
    if (gap < p.s0) c.initial_gap_below_s0 = true;
    if (!(gap > b.conservative_eps0())) gaps_above_bound = false;
  }

  c.min_gap_observed = std::numeric_limits<double>::infinity();
  bool leader_reversed = false;
  for (const auto& smp : tr.samples) {
    const auto& vs = smp.state.vehicles;
    if (vs[0].v < 0.0) leader_reversed = true;
    for (std::size_t i = 1; i < vs.size(); ++i) {
      if (vs[i].v < 0.0) c.negative_velocity_observed = true;
      c.min_gap_observed = std::min(c.min_gap_observed, net_gap(vs[i - 1], vs[i], p.l));
    }
  }

  c.gap_bound_hypotheses = std::holds_alternative<Classic>(s.variant.kind) && gaps_above_bound && !leader_reversed;
  if (c.gap_bound_hypotheses) c.gap_bound_held = c.min_gap_observed >= b.conservative_eps0();

  if (veh.size() == 2) {
    const double v0 = veh[1].v;
    const double vl0 = veh[0].v;
    const double gap = net_gap(veh[0], veh[1], p.l);
    const double gap_tol = 1e-12 * std::max(1.0, p.s0);
    c.equilibrium_hypotheses = v0 > vl0 && vl0 > 0.0 && std::abs(gap - p.s0) <= gap_tol &&
                               std::holds_alternative<FreeFlow>(s.leader) && b.safe_distancing_ok;
  }
  if (c.equilibrium_hypotheses) {
    const auto& smp = tr.samples;
    auto rel = [&](std::size_t k) { return smp[k].state.vehicles[1].v - smp[k].state.vehicles[0].v; };
    for (std::size_t k = 1; k < smp.size(); ++k) {
      if (rel(k) <= 0.0) {
        c.equilibrium_time = zero_between(smp[k - 1].t(), rel(k - 1), smp[k].t(), rel(k));
        break;
      }
    }
  }
  return c;
}

std::vector<SweepPoint> epsilon_sweep(const Scenario& base, const std::vector<double>& eps_values) {
  std::vector<std::future<RunMetrics>> runs;
  runs.reserve(eps_values.size());
  for (double eps : eps_values) {
    Scenario s = base;
    auto& follower = s.initial.vehicles.at(1);
    follower.x = s.initial.vehicles[0].x - s.params.l - eps;
    runs.push_back(std::async(std::launch::async, [s = std::move(s)] {
      auto m = compute_metrics(integrate(s));
      if (!m.t_first_negative_v) m.t_recover_positive_v = 0.0;
      return m;
    }));
  }
  std::vector<SweepPoint> out;
  out.reserve(eps_values.size());
  for (std::size_t i = 0; i < eps_values.size(); ++i) out.push_back({eps_values[i], runs[i].get()});
  return out;
}

double blowup_time_upper_bound(double t_star, double v_star) {
  return t_star + 0.5 * std::log((v_star - 1.0) / (v_star + 1.0));
}

bool position_converges(const Trajectory& tr, std::size_t follower, std::size_t window) {
  const auto& smp = tr.samples;
  if (window < 2 || smp.size() < window + 1) return false;
  const std::size_t start = smp.size() - window - 1;
  double first = 0.0;
  double second = 0.0;
  for (std::size_t k = start + 1; k < smp.size(); ++k) {
    const double dx = std::abs(smp[k].state.vehicles[follower].x - smp[k - 1].state.vehicles[follower].x);
    if (!std::isfinite(dx)) return false;
    (k - start <= window / 2 ? first : second) += dx;
  }
  return std::isfinite(first + second) && second <= first;
}

}  // namespace idm
