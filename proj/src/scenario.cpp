#include "idm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace idm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string variant_name(const VariantKind& kind) {
  return std::visit(overloaded{
                        [](const Classic&) { return std::string("classic"); },
                        [](const VelocityProjected&) { return std::string("velocity-projected"); },
                        [](const AccelerationProjected&) { return std::string("acceleration-projected"); },
                        [](const VelocityRegularized&) { return std::string("velocity-regularized"); },
                        [](const DistanceRegularized&) { return std::string("distance-regularized"); },
                        [](const Discontinuous&) { return std::string("discontinuous"); },
                    },
                    kind);
}

bool projects_velocity(const VariantKind& kind) {
  return std::holds_alternative<VelocityProjected>(kind) ||
         std::holds_alternative<AccelerationProjected>(kind);
}

std::string leader_profile_name(const LeaderProfile& profile) {
  return std::visit(overloaded{
                        [](const ConstantAccel&) { return std::string("constant-accel"); },
                        [](const FreeFlow&) { return std::string("free-flow"); },
                        [](const PiecewiseConstant&) { return std::string("piecewise-constant"); },
                        [](const StopAndGoSine&) { return std::string("stop-and-go-sine"); },
                    },
                    profile);
}

double effective_blowup_threshold(const SolverSettings& solver, const ModelParams& p) {
  return solver.blowup_speed_threshold.value_or(50.0 * p.v_free);
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NonPositiveParameter: return "NonPositiveParameter";
    case ViolationKind::DeltaNotGreaterThanOne: return "DeltaNotGreaterThanOne";
    case ViolationKind::GapNotExceedingLength: return "GapNotExceedingLength";
    case ViolationKind::NegativeInitialVelocity: return "NegativeInitialVelocity";
    case ViolationKind::TauExceedsHorizon: return "TauExceedsHorizon";
    case ViolationKind::InvalidVariantParameter: return "InvalidVariantParameter";
    case ViolationKind::InvalidLeaderProfile: return "InvalidLeaderProfile";
    case ViolationKind::InvalidSolverSettings: return "InvalidSolverSettings";
    case ViolationKind::EmptyPlatoon: return "EmptyPlatoon";
    case ViolationKind::NonFiniteValue: return "NonFiniteValue";
  }
  return "Unknown";
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "invalid scenario (" << violations.size() << " violation" << (violations.size() == 1 ? "" : "s")
     << ")";
  for (const auto& v : violations) os << "\n  " << to_string(v.kind) << ": " << v.detail;
  return os.str();
}

void require_positive(std::vector<Violation>& out, const char* name, double value) {
  if (!std::isfinite(value)) {
    out.push_back({ViolationKind::NonFiniteValue, std::string(name) + " is not finite"});
  } else if (!(value > 0.0)) {
    std::ostringstream os;
    os << name << " = " << value << " must be > 0";
    out.push_back({ViolationKind::NonPositiveParameter, os.str()});
  }
}

void check_params(const ModelParams& p, std::vector<Violation>& out) {
  require_positive(out, "a", p.a);
  require_positive(out, "b", p.b);
  require_positive(out, "v_free", p.v_free);
  require_positive(out, "tau", p.tau);
  require_positive(out, "s0", p.s0);
  require_positive(out, "l", p.l);
  if (!std::isfinite(p.delta)) {
    out.push_back({ViolationKind::NonFiniteValue, "delta is not finite"});
  } else if (!(p.delta > 1.0)) {
    std::ostringstream os;
    os << "delta = " << p.delta << " must be > 1";
    out.push_back({ViolationKind::DeltaNotGreaterThanOne, os.str()});
  }
}

void check_variant(const VariantConfig& cfg, const ModelParams& p, std::vector<Violation>& out) {
  std::visit(overloaded{
                 [&](const AccelerationProjected& v) {
                   if (!(v.a_min > 0.0) || !std::isfinite(v.a_min))
                     out.push_back({ViolationKind::InvalidVariantParameter, "a_min must be > 0"});
                 },
                 [&](const VelocityRegularized& v) {
                   if (!(v.eps_v > 0.0) || !std::isfinite(v.eps_v))
                     out.push_back({ViolationKind::InvalidVariantParameter, "eps_v must be > 0"});
                 },
                 [&](const DistanceRegularized& v) {
                   if (!(v.eps_d > 0.0 && v.eps_d < p.s0))
                     out.push_back({ViolationKind::InvalidVariantParameter, "eps_d must lie in (0, s0)"});
                 },
                 [](const auto&) {},
             },
             cfg.kind);
}

void check_leader(const LeaderProfile& profile, std::vector<Violation>& out) {
  std::visit(overloaded{
                 [&](const ConstantAccel& c) {
                   if (!std::isfinite(c.u))
                     out.push_back({ViolationKind::InvalidLeaderProfile, "constant acceleration is not finite"});
                 },
                 [&](const PiecewiseConstant& pc) {
                   for (std::size_t i = 0; i < pc.schedule.size(); ++i) {
                     const auto& [t, u] = pc.schedule[i];
                     if (!std::isfinite(t) || !std::isfinite(u)) {
                       out.push_back({ViolationKind::InvalidLeaderProfile, "schedule entry is not finite"});
                     } else if (i > 0 && !(t > pc.schedule[i - 1].first)) {
                       out.push_back({ViolationKind::InvalidLeaderProfile,
                                      "schedule start times must be strictly increasing"});
                     }
                   }
                 },
                 [&](const StopAndGoSine& sg) {
                   if (!(sg.amplitude >= 0.0) || !std::isfinite(sg.amplitude))
                     out.push_back({ViolationKind::InvalidLeaderProfile, "amplitude must be >= 0"});
                   if (!(sg.threshold > 0.0 && sg.threshold < 1.0))
                     out.push_back({ViolationKind::InvalidLeaderProfile, "threshold must lie in (0, 1)"});
                   if (!(sg.angular_divisor > 0.0) || !std::isfinite(sg.angular_divisor))
                     out.push_back({ViolationKind::InvalidLeaderProfile, "angular_divisor must be > 0"});
                 },
                 [](const FreeFlow&) {},
             },
             profile);
}

void check_solver(const SolverSettings& s, std::vector<Violation>& out) {
  auto bad = [&](const std::string& msg) { out.push_back({ViolationKind::InvalidSolverSettings, msg}); };
  if (!(s.rel_tol > 0.0) || !(s.abs_tol > 0.0)) bad("tolerances must be > 0");
  if (!(s.dt_min > 0.0 && s.dt_min <= s.dt_init && s.dt_init <= s.dt_max))
    bad("step bounds must satisfy 0 < dt_min <= dt_init <= dt_max");
  if (s.blowup_speed_threshold && !(*s.blowup_speed_threshold > 0.0))
    bad("blowup_speed_threshold must be > 0");
  if (!(s.event_tol > 0.0)) bad("event_tol must be > 0");
  if (s.max_steps <= 0) bad("max_steps must be > 0");
  if (!(s.leader_velocity_tol >= 0.0)) bad("leader_velocity_tol must be >= 0");
}

void check_initial(const PlatoonState& st, const ModelParams& p, std::vector<Violation>& out) {
  if (st.vehicles.empty()) {
    out.push_back({ViolationKind::EmptyPlatoon, "the platoon needs at least a leader"});
    return;
  }
  for (std::size_t i = 0; i < st.vehicles.size(); ++i) {
    const auto& veh = st.vehicles[i];
    if (!std::isfinite(veh.x) || !std::isfinite(veh.v)) {
      out.push_back({ViolationKind::NonFiniteValue, "vehicle " + std::to_string(i + 1) + " state is not finite"});
      continue;
    }
    if (veh.v < 0.0) {
      std::ostringstream os;
      os << "vehicle " << i + 1 << " has initial velocity " << veh.v;
      out.push_back({ViolationKind::NegativeInitialVelocity, os.str()});
    }
  }
  for (std::size_t i = 1; i < st.vehicles.size(); ++i) {
    const double spacing = st.vehicles[i - 1].x - st.vehicles[i].x;
    if (std::isfinite(spacing) && std::isfinite(p.l) && !(spacing > p.l)) {
      std::ostringstream os;
      os << "vehicles " << i << "-" << i + 1 << ": x_l - x = " << spacing << " does not exceed l = " << p.l;
      out.push_back({ViolationKind::GapNotExceedingLength, os.str()});
    }
  }
}

}  // namespace

InvalidScenario::InvalidScenario(std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

std::vector<Violation> check_scenario(const Scenario& s) {
  std::vector<Violation> out;
  check_params(s.params, out);
  if (!std::isfinite(s.horizon) || s.horizon < 0.0) {
    out.push_back({ViolationKind::NonFiniteValue, "horizon must be finite and >= 0"});
  } else if (s.horizon > 0.0 && std::isfinite(s.params.tau) && !(s.params.tau < s.horizon)) {
    // A zero horizon only evaluates the initial datum, so the headway bound is not applied.
    std::ostringstream os;
    os << "tau = " << s.params.tau << " must be < horizon T = " << s.horizon;
    out.push_back({ViolationKind::TauExceedsHorizon, os.str()});
  }
  check_variant(s.variant, s.params, out);
  check_leader(s.leader, out);
  check_initial(s.initial, s.params, out);
  check_solver(s.solver, out);
  return out;
}

Scenario validate_scenario(Scenario s) {
  auto violations = check_scenario(s);
  if (!violations.empty()) throw InvalidScenario(std::move(violations));
  return s;
}

ModelParams table_params() {
  return ModelParams{.a = 0.73, .b = 1.67, .v_free = 120.0 / 3.6, .tau = 1.6, .s0 = 2.0, .l = 5.0, .delta = 4.0};
}

ModelParams counterexample_params() {
  return ModelParams{.a = 1.0, .b = 2.0, .v_free = 1.0, .tau = 1.6, .s0 = 2.0, .l = 4.0, .delta = 4.0};
}

PlatoonState leader_follower(const ModelParams& p, double gap, double v_follower, double v_leader,
                             double x_leader) {
  PlatoonState st;
  st.t = 0.0;
  st.vehicles.push_back({x_leader, v_leader, Mode::Moving});
  st.vehicles.push_back({x_leader - p.l - gap, v_follower, Mode::Moving});
  return st;
}

namespace {

Scenario make(std::string name, ModelParams p, VariantConfig variant, LeaderProfile leader, PlatoonState initial,
              double horizon) {
  Scenario s;
  s.name = std::move(name);
  s.params = p;
  s.variant = variant;
  s.leader = std::move(leader);
  s.initial = std::move(initial);
  s.horizon = horizon;
  return s;
}

std::map<std::string, Scenario> build_catalog() {
  std::map<std::string, Scenario> cat;
  const ModelParams ce = counterexample_params();

  // Follower starts 0 with leader at x_l0 = l + gap (follower at the origin).
  auto at_origin = [](const ModelParams& p, double gap, double v0, double vl0) {
    return leader_follower(p, gap, v0, vl0, p.l + gap);
  };

  cat.emplace("neg-velocity", make("neg-velocity", ce, {}, FreeFlow{}, at_origin(ce, 1.5, 0.0, 0.0), 3.0));
  cat.emplace("safe-gap", make("safe-gap", ce, {}, FreeFlow{}, at_origin(ce, 2.0, 0.0, 0.0), 3.0));
  cat.emplace("blowup", make("blowup", ce, {}, FreeFlow{}, at_origin(ce, 1.0, 0.0, 0.0), 3.0));

  {
    // b = 1/(4a) makes 2 sqrt(ab) = 1, so the interaction numerator is (4 + v)^2.
    ModelParams p{.a = 1.0, .b = 0.25, .v_free = 1.0, .tau = 8.0, .s0 = 16.0, .l = 4.0, .delta = 4.0};
    cat.emplace("analytic-blowup",
                make("analytic-blowup", p, {}, ConstantAccel{0.0}, leader_follower(p, 0.5, 0.0, 0.0, 0.0), 10.0));
  }

  const ModelParams sg{.a = 0.73, .b = 1.67, .v_free = 120.0 / 36.0, .tau = 1.6, .s0 = 2.0, .l = 4.0, .delta = 4.0};
  cat.emplace("stop-and-go", make("stop-and-go", sg, {}, StopAndGoSine{.amplitude = sg.a},
                                  at_origin(sg, 1.0, 0.0, 0.0), 100.0));

  {
    auto s = make("overtake", ce, VariantConfig{AccelerationProjected{1.0}}, FreeFlow{},
                  at_origin(ce, 1.5, 5.0, 0.0), 3.0);
    s.solver.continue_after_collapse = true;
    cat.emplace("overtake", std::move(s));
  }

  cat.emplace("eps-sweep", make("eps-sweep", ce, VariantConfig{VelocityProjected{}}, ConstantAccel{2.0},
                                at_origin(ce, 1.0, 0.0, 0.0), 50.0));

  cat.emplace("velocity-equilibrium",
              make("velocity-equilibrium", ce, {}, FreeFlow{}, at_origin(ce, ce.s0, 0.9, 0.5), 10.0));

  {
    PlatoonState st;
    double x = 0.0;
    for (int i = 0; i < 5; ++i) {
      st.vehicles.push_back({x, 0.0, Mode::Moving});
      x -= sg.l + 1.0;
    }
    cat.emplace("platoon-5",
                make("platoon-5", sg, VariantConfig{VelocityRegularized{0.1}}, StopAndGoSine{.amplitude = sg.a},
                     std::move(st), 100.0));
  }
  return cat;
}

}  // namespace

const std::map<std::string, Scenario>& builtin_scenarios() {
  static const std::map<std::string, Scenario> catalog = build_catalog();
  return catalog;
}

const Scenario& builtin_scenario(const std::string& name) {
  static const std::map<std::string, std::string> aliases = {
      {"case1", "neg-velocity"}, {"case2", "blowup"}, {"case3", "stop-and-go"}};
  const auto& cat = builtin_scenarios();
  auto alias = aliases.find(name);
  auto it = cat.find(alias == aliases.end() ? name : alias->second);
  if (it == cat.end()) {
    std::string known;
    for (const auto& [k, _] : cat) known += (known.empty() ? "" : ", ") + k;
    throw std::out_of_range("unknown scenario '" + name + "' (known: " + known + ", case1, case2, case3)");
  }
  return it->second;
}

}  // namespace idm
