#include "idm/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "idm/dopri5.hpp"
#include "idm/platoon.hpp"
#include "idm/scenario.hpp"

namespace idm {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::VelocityZeroCrossing: return "VelocityZeroCrossing";
    case EventKind::GapReachesS0: return "GapReachesS0";
    case EventKind::GapCollapse: return "GapCollapse";
    case EventKind::BlowupDetected: return "BlowupDetected";
    case EventKind::LeaderVelocityNegative: return "LeaderVelocityNegative";
  }
  return "Unknown";
}

std::string to_string(TerminationKind kind) {
  switch (kind) {
    case TerminationKind::Completed: return "Completed";
    case TerminationKind::Blowup: return "Blowup";
    case TerminationKind::GapCollapse: return "GapCollapse";
    case TerminationKind::LeaderVelocityNegative: return "LeaderVelocityNegative";
    case TerminationKind::StepLimitReached: return "StepLimitReached";
  }
  return "Unknown";
}

namespace {

std::string bracket_message(double lo, double hi) {
  std::ostringstream os;
  os << "no sign change on [" << lo << ", " << hi << "]";
  return os.str();
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

NoSignChange::NoSignChange(double t_lo, double t_hi) : std::invalid_argument(bracket_message(t_lo, t_hi)) {}

double locate_event(const std::function<double(double)>& f, double t_lo, double t_hi, double tol) {
  const double f_lo = f(t_lo);
  if (f_lo == 0.0) return t_lo;
  const double f_hi = f(t_hi);
  if (sign(f_hi) == sign(f_lo)) throw NoSignChange(t_lo, t_hi);
  const int s_lo = sign(f_lo);
  while (t_hi - t_lo > tol) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (mid <= t_lo || mid >= t_hi) break;
    const double fm = f(mid);
    if (sign(fm) == s_lo) {
      t_lo = mid;
    } else {
      t_hi = mid;
    }
  }
  return t_hi;
}

namespace {

enum class Direction { Down, Up, Both };

bool crosses(double prev, double cur, Direction dir) {
  switch (dir) {
    case Direction::Down: return prev > 0.0 && cur <= 0.0;
    case Direction::Up: return prev < 0.0 && cur >= 0.0;
    case Direction::Both: return (prev > 0.0 && cur <= 0.0) || (prev < 0.0 && cur >= 0.0);
  }
  return false;
}

struct Watch {
  EventKind kind;
  std::size_t vehicle;
  Direction dir;
};

std::vector<double> accelerations(const Scenario& s, double t, std::span<const double> y, std::span<const Mode> modes) {
  std::vector<double> dy(y.size());
  eval_rhs_flat(s, t, y, modes, dy);
  std::vector<double> acc(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) acc[i] = dy[2 * i + 1];
  return acc;
}

Sample make_sample(const Scenario& s, double t, std::span<const double> y, std::span<const Mode> modes) {
  return Sample{unflatten(t, y, modes), accelerations(s, t, y, modes)};
}

double max_follower_accel(const std::vector<double>& acc) {
  double m = 0.0;
  for (std::size_t i = 1; i < acc.size(); ++i) m = std::max(m, std::abs(acc[i]));
  return m;
}

std::vector<Mode> modes_of(const PlatoonState& st) {
  std::vector<Mode> m;
  for (const auto& v : st.vehicles) m.push_back(v.mode);
  return m;
}

class AdaptiveRun {
 public:
  explicit AdaptiveRun(const Scenario& s)
      : s_(s),
        n_(s.initial.vehicles.size()),
        stepper_(2 * n_),
        threshold_(effective_blowup_threshold(s.solver, s.params)),
        collapsed_(n_, false),
        scratch_(2 * n_) {}

  Trajectory run() {
    const auto& sol = s_.solver;
    tr_.vehicle_length = s_.params.l;
    const PlatoonState start = update_modes(s_, s_.initial);
    y_ = flatten(start);
    modes_ = modes_of(start);
    t_ = 0.0;
    push_sample();
    const double horizon = s_.horizon;
    if (horizon == 0.0) return finish(TerminationKind::Completed, 0.0);

    const auto breakpoints = leader_breakpoints(s_.leader, horizon);
    std::size_t next_bp = 0;
    double h = sol.dt_init;
    long steps = 0;
    double prev_accel = max_follower_accel(tr_.samples.back().accel);

    while (true) {
      while (next_bp < breakpoints.size() && breakpoints[next_bp] <= t_) ++next_bp;
      const double stop = next_bp < breakpoints.size() ? breakpoints[next_bp] : horizon;
      const double remaining = stop - t_;
      if (remaining <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(stop))) {
        t_ = stop;
        if (stop >= horizon) return finish(TerminationKind::Completed, horizon);
        continue;
      }
      if (++steps > sol.max_steps) return finish(TerminationKind::StepLimitReached, t_);

      h = std::min(h, sol.dt_max);
      const bool hits_stop = h >= remaining;
      if (hits_stop) h = remaining;
      const double profile_time = t_ + 0.5 * h;
      const DormandPrince45::Rhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
        return eval_rhs_flat(s_, profile_time, y, modes_, dy);
      };
      const auto trial = stepper_.attempt(rhs, t_, y_, h, sol.rel_tol, sol.abs_tol);

      if (!trial.rhs_ok || trial.error_norm > 1.0) {
        const double h_new = trial.rhs_ok ? h * step_factor(trial.error_norm) : 0.25 * h;
        if (h_new < sol.dt_min) return step_collapse(trial.rhs_ok, prev_accel);
        h = h_new;
        continue;
      }

      const double t_end = hits_stop ? stop : t_ + h;
      const double h_next = h * step_factor(trial.error_norm);

      if (auto hit = first_event(t_end)) {
        if (auto term = handle_event(*hit)) return *term;
      } else {
        const auto y_new = stepper_.solution();
        std::copy(y_new.begin(), y_new.end(), y_.begin());
        t_ = t_end;
        push_sample();
        if (t_ >= horizon) return finish(TerminationKind::Completed, horizon);
      }
      prev_accel = max_follower_accel(tr_.samples.back().accel);
      h = std::max(h_next, sol.dt_min);
    }
  }

 private:
  struct Hit {
    Watch watch;
    double t;
  };

  void push_sample() { tr_.samples.push_back(make_sample(s_, t_, y_, modes_)); }

  Trajectory finish(TerminationKind kind, double t) {
    tr_.termination = {kind, t};
    return std::move(tr_);
  }

  Trajectory step_collapse(bool rhs_ok, double prev_accel) {
    const auto& p = s_.params;
    if (!rhs_ok) {
      for (std::size_t i = 1; i < n_; ++i) {
        const double gap = y_[2 * (i - 1)] - y_[2 * i] - p.l;
        if (!collapsed_[i] && gap < s_.params.s0 * 1e-3) return finish(TerminationKind::GapCollapse, t_);
      }
    }
    const double accel_now = max_follower_accel(tr_.samples.back().accel);
    if (!rhs_ok || accel_now >= prev_accel) return finish(TerminationKind::Blowup, t_);
    return finish(TerminationKind::StepLimitReached, t_);
  }

  std::vector<Watch> watches() const {
    std::vector<Watch> w;
    const bool discontinuous = std::holds_alternative<Discontinuous>(s_.variant.kind);
    w.push_back({EventKind::LeaderVelocityNegative, 0, Direction::Down});
    for (std::size_t i = 1; i < n_; ++i) {
      if (modes_[i] == Mode::Moving) {
        w.push_back({EventKind::VelocityZeroCrossing, i, Direction::Both});
      } else if (discontinuous) {
        w.push_back({EventKind::GapReachesS0, i, Direction::Up});
      }
      if (!collapsed_[i]) w.push_back({EventKind::GapCollapse, i, Direction::Down});
      w.push_back({EventKind::BlowupDetected, i, Direction::Down});
    }
    return w;
  }

  double watch_value(const Watch& w, std::span<const double> y) const {
    const auto& p = s_.params;
    const std::size_t i = w.vehicle;
    switch (w.kind) {
      case EventKind::LeaderVelocityNegative: return y[1] + s_.solver.leader_velocity_tol;
      case EventKind::VelocityZeroCrossing: return y[2 * i + 1];
      case EventKind::GapReachesS0: return y[2 * (i - 1)] - y[2 * i] - p.l - p.s0;
      case EventKind::GapCollapse: return y[2 * (i - 1)] - y[2 * i] - p.l;
      case EventKind::BlowupDetected: return y[2 * i + 1] + threshold_;
    }
    return 0.0;
  }

  // Earliest event inside the accepted trial step [t_, t_end], or none.
  std::optional<Hit> first_event(double t_end) {
    const double t0 = t_;
    const double h = t_end - t0;
    auto state_at = [&](double t) -> std::span<const double> {
      if (t >= t_end) {
        const auto sol = stepper_.solution();
        std::copy(sol.begin(), sol.end(), scratch_.begin());
      } else {
        stepper_.dense((t - t0) / stepper_.step_size(), scratch_);
      }
      return scratch_;
    };
    constexpr int kChecks = 4;
    std::optional<Hit> best;
    for (const auto& w : watches()) {
      auto g = [&](double t) { return watch_value(w, state_at(t)); };
      double prev_t = t0;
      double prev = watch_value(w, y_);
      for (int j = 1; j <= kChecks; ++j) {
        const double tj = j == kChecks ? t_end : t0 + h * j / kChecks;
        if (best && prev_t >= best->t) break;
        const double cur = g(tj);
        if (prev != 0.0 && crosses(prev, cur, w.dir)) {
          const double te = locate_event(g, prev_t, tj, s_.solver.event_tol);
          if (!best || te < best->t) best = Hit{w, te};
          break;
        }
        if (cur != 0.0 || prev == 0.0) {
          prev = cur;
          prev_t = tj;
        }
      }
    }
    return best;
  }

  // Advances to the event and applies its consequence. Returns the finished
  // trajectory for terminal events.
  std::optional<Trajectory> handle_event(const Hit& hit) {
    const auto located = state_at_time(hit.t);
    std::copy(located.begin(), located.end(), y_.begin());
    t_ = hit.t;
    tr_.events.push_back(Event{hit.watch.kind, hit.watch.vehicle, t_, unflatten(t_, y_, modes_)});

    switch (hit.watch.kind) {
      case EventKind::VelocityZeroCrossing:
      case EventKind::GapReachesS0: {
        const auto next = update_modes(s_, unflatten(t_, y_, modes_));
        y_ = flatten(next);
        modes_ = modes_of(next);
        push_sample();
        return std::nullopt;
      }
      case EventKind::GapCollapse:
        push_sample();
        if (tolerates_collapse(s_)) {
          collapsed_[hit.watch.vehicle] = true;
          return std::nullopt;
        }
        return finish(TerminationKind::GapCollapse, t_);
      case EventKind::BlowupDetected:
        push_sample();
        return finish(TerminationKind::Blowup, t_);
      case EventKind::LeaderVelocityNegative:
        push_sample();
        return finish(TerminationKind::LeaderVelocityNegative, t_);
    }
    return std::nullopt;
  }

  std::vector<double> state_at_time(double t) const {
    std::vector<double> out(2 * n_);
    stepper_.dense((t - stepper_.step_start()) / stepper_.step_size(), out);
    return out;
  }

  const Scenario& s_;
  std::size_t n_;
  DormandPrince45 stepper_;
  double threshold_;
  std::vector<bool> collapsed_;
  std::vector<double> scratch_;
  std::vector<double> y_;
  std::vector<Mode> modes_;
  double t_ = 0.0;
  Trajectory tr_;
};

}  // namespace

Trajectory integrate(const Scenario& s) {
  const Scenario valid = validate_scenario(s);
  return AdaptiveRun(valid).run();
}

Trajectory reference_integrate(const Scenario& scenario, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("reference_integrate: dt must be > 0");
  const Scenario s = validate_scenario(scenario);
  const auto& p = s.params;
  const std::size_t n = s.initial.vehicles.size();
  const double threshold = effective_blowup_threshold(s.solver, p);
  const bool through_collapse = tolerates_collapse(s);

  Trajectory tr;
  tr.vehicle_length = p.l;
  PlatoonState st = update_modes(s, s.initial);
  std::vector<double> y = flatten(st);
  std::vector<Mode> modes = modes_of(st);
  tr.samples.push_back(make_sample(s, 0.0, y, modes));
  if (s.horizon == 0.0) {
    tr.termination = {TerminationKind::Completed, 0.0};
    return tr;
  }

  const auto steps = static_cast<long>(std::ceil(s.horizon / dt - 1e-9));
  std::vector<double> k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);
  for (long k = 0; k < steps; ++k) {
    const double t = k * dt;
    const double t_next = k + 1 == steps ? s.horizon : (k + 1) * dt;
    const double h = t_next - t;
    const double pt = t + 0.5 * h;
    auto f = [&](std::span<const double> yy, std::vector<double>& out) {
      return eval_rhs_flat(s, pt, yy, modes, out);
    };
    bool ok = f(y, k1);
    for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    ok = f(tmp, k2) && ok;
    for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    ok = f(tmp, k3) && ok;
    for (std::size_t i = 0; i < 2 * n; ++i) tmp[i] = y[i] + h * k3[i];
    ok = f(tmp, k4) && ok;
    if (!ok) {
      tr.termination = {TerminationKind::GapCollapse, t};
      return tr;
    }
    for (std::size_t i = 0; i < 2 * n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    st = update_modes(s, unflatten(t_next, y, modes));
    y = flatten(st);
    modes = modes_of(st);
    tr.samples.push_back(make_sample(s, t_next, y, modes));

    if (y[1] < -s.solver.leader_velocity_tol) {
      tr.termination = {TerminationKind::LeaderVelocityNegative, t_next};
      return tr;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double v = y[2 * i + 1];
      if (!std::isfinite(v) || v < -threshold) {
        tr.termination = {TerminationKind::Blowup, t_next};
        return tr;
      }
      if (!through_collapse && !(y[2 * (i - 1)] - y[2 * i] - p.l > 0.0)) {
        tr.termination = {TerminationKind::GapCollapse, t_next};
        return tr;
      }
    }
  }
  tr.termination = {TerminationKind::Completed, s.horizon};
  return tr;
}

}  // namespace idm
