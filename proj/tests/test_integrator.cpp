#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "idm/dopri5.hpp"
#include "idm/integrator.hpp"
#include "idm/scenario.hpp"

using namespace idm;

namespace {

double min_follower_velocity(const Trajectory& tr) {
  double m = INFINITY;
  for (const auto& s : tr.samples) m = std::min(m, s.state.vehicles[1].v);
  return m;
}

// Linear interpolation of a sampled follower velocity crossing zero upward after t_after.
double upward_zero(const Trajectory& tr, double t_after) {
  const auto& smp = tr.samples;
  for (std::size_t k = 1; k < smp.size(); ++k) {
    const double v0 = smp[k - 1].state.vehicles[1].v, v1 = smp[k].state.vehicles[1].v;
    if (smp[k].t() > t_after && v0 < 0.0 && v1 >= 0.0)
      return smp[k - 1].t() + (smp[k].t() - smp[k - 1].t()) * v0 / (v0 - v1);
  }
  return NAN;
}

}  // namespace

TEST_SUITE("integrator") {
  TEST_CASE("one Dormand-Prince step on y' = y matches the stability polynomial") {
    // R(z) = 1 + z + z^2/2 + z^3/6 + z^4/24 + z^5/120 + z^6/600, z = 0.5
    DormandPrince45 dp(1);
    const std::vector<double> y0{1.0};
    const auto trial = dp.attempt([](double, std::span<const double> y, std::span<double> dy) {
      dy[0] = y[0];
      return true;
    }, 0.0, y0, 0.5, 1e-6, 1e-9);
    CHECK(trial.rhs_ok);
    CHECK(dp.solution()[0] == doctest::Approx(1.6487239583333333).epsilon(1e-15));
  }

  TEST_CASE("dense output is exact for quartic solutions") {
    DormandPrince45 dp(1);
    const std::vector<double> y0{0.0};
    dp.attempt([](double t, std::span<const double>, std::span<double> dy) {
      dy[0] = 4.0 * t * t * t;
      return true;
    }, 1.0, y0, 0.8, 1e-6, 1e-9);
    std::vector<double> out(1);
    for (double th : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      dp.dense(th, out);
      const double t = 1.0 + 0.8 * th;
      CHECK(out[0] == doctest::Approx(std::pow(t, 4) - 1.0).epsilon(1e-13));
    }
    CHECK(dp.solution()[0] == doctest::Approx(std::pow(1.8, 4) - 1.0).epsilon(1e-14));
  }

  TEST_CASE("step factor is clamped") {
    CHECK(step_factor(0.0) == 5.0);
    CHECK(step_factor(1e-12) == 5.0);
    CHECK(step_factor(1e12) == 0.2);
    CHECK(step_factor(1.0) == doctest::Approx(0.9));
  }

  TEST_CASE("failed right-hand side marks the trial") {
    DormandPrince45 dp(1);
    const std::vector<double> y0{0.0};
    const auto trial = dp.attempt([](double, std::span<const double>, std::span<double> dy) {
      dy[0] = 0.0;
      return false;
    }, 0.0, y0, 0.1, 1e-6, 1e-9);
    CHECK_FALSE(trial.rhs_ok);
  }

  TEST_CASE("locate_event on a linear root") {
    CHECK(locate_event([](double t) { return t - 1.0; }, 0.0, 2.0, 1e-9) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("locate_event returns the left end for an identically zero function") {
    CHECK(locate_event([](double) { return 0.0; }, 0.3, 2.0, 1e-9) == 0.3);
  }

  TEST_CASE("locate_event needs a sign change") {
    CHECK_THROWS_AS(locate_event([](double t) { return t + 1.0; }, 0.0, 2.0, 1e-9), NoSignChange);
  }

  TEST_CASE("safe-gap completes without negative velocity") {
    const auto tr = integrate(builtin_scenario("safe-gap"));
    CHECK(tr.termination.kind == TerminationKind::Completed);
    CHECK(tr.termination.t == 3.0);
    CHECK(tr.samples.back().t() == 3.0);
    CHECK(min_follower_velocity(tr) >= -1e-12);
  }

  TEST_CASE("neg-velocity completes with a negative velocity phase") {
    const auto tr = integrate(builtin_scenario("neg-velocity"));
    CHECK(tr.termination.kind == TerminationKind::Completed);
    CHECK(min_follower_velocity(tr) < 0.0);
    CHECK(tr.samples.front().accel[1] == doctest::Approx(-7.0 / 9.0).epsilon(1e-14));
  }

  TEST_CASE("neg-velocity recovery crossing matches fixed-step RK4 at dt = 1e-5") {
    const auto& s = builtin_scenario("neg-velocity");
    const auto tr = integrate(s);
    const auto it = std::find_if(tr.events.begin(), tr.events.end(),
                                 [](const Event& e) { return e.kind == EventKind::VelocityZeroCrossing; });
    REQUIRE(it != tr.events.end());
    const double reference = upward_zero(reference_integrate(s, 1e-5), 0.1);
    CHECK(it->t == doctest::Approx(reference).epsilon(1e-3));
    CHECK(std::abs(it->state_at_event.vehicles[1].v) < 1e-8);
  }

  TEST_CASE("zero horizon yields the initial sample only") {
    Scenario s = builtin_scenario("safe-gap");
    s.horizon = 0.0;
    const auto tr = integrate(s);
    CHECK(tr.samples.size() == 1);
    CHECK(tr.termination.kind == TerminationKind::Completed);
    CHECK(reference_integrate(s, 1e-3).samples.size() == 1);
  }

  TEST_CASE("invalid scenarios are rejected before integration") {
    Scenario s = builtin_scenario("safe-gap");
    s.params.delta = 1.0;
    CHECK_THROWS_AS(integrate(s), InvalidScenario);
    CHECK_THROWS_AS(reference_integrate(s, 1e-3), InvalidScenario);
    CHECK_THROWS_AS(reference_integrate(builtin_scenario("safe-gap"), 0.0), std::invalid_argument);
  }

  TEST_CASE("analytic blow-up is detected") {
    const auto tr = integrate(builtin_scenario("analytic-blowup"));
    CHECK(tr.termination.kind == TerminationKind::Blowup);
    CHECK(tr.termination.t < 1.0);
    CHECK(tr.samples.back().state.vehicles[1].v <= -50.0 + 1e-6);
  }

  TEST_CASE("overtaking continues through the gap collapse") {
    const auto tr = integrate(builtin_scenario("overtake"));
    CHECK(tr.termination.kind == TerminationKind::Completed);
    const auto it = std::find_if(tr.events.begin(), tr.events.end(),
                                 [](const Event& e) { return e.kind == EventKind::GapCollapse; });
    REQUIRE(it != tr.events.end());
    const auto& st = tr.samples.back().state;
    CHECK(net_gap(st.vehicles[0], st.vehicles[1], 4.0) < 0.0);
  }

  TEST_CASE("collapse terminates variants that do not tolerate it") {
    Scenario s = builtin_scenario("overtake");
    s.solver.continue_after_collapse = false;
    const auto tr = integrate(s);
    CHECK(tr.termination.kind == TerminationKind::GapCollapse);
    const auto& st = tr.samples.back().state;
    CHECK(std::abs(net_gap(st.vehicles[0], st.vehicles[1], 4.0)) < 1e-6);
  }

  TEST_CASE("a reversing leader stops the run") {
    Scenario s = builtin_scenario("safe-gap");
    s.leader = ConstantAccel{-1.0};
    s.initial.vehicles[0].v = 0.5;
    const auto tr = integrate(s);
    CHECK(tr.termination.kind == TerminationKind::LeaderVelocityNegative);
    CHECK(tr.termination.t == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("step limit surfaces as termination") {
    Scenario s = builtin_scenario("stop-and-go");
    s.solver.max_steps = 10;
    CHECK(integrate(s).termination.kind == TerminationKind::StepLimitReached);
  }

  TEST_CASE("discontinuous stop-and-go latches and releases without reversing") {
    Scenario s = builtin_scenario("stop-and-go");
    s.variant.kind = Discontinuous{};
    const auto tr = integrate(s);
    CHECK(tr.termination.kind == TerminationKind::Completed);
    CHECK(min_follower_velocity(tr) >= 0.0);
    const bool stopped = std::any_of(tr.samples.begin(), tr.samples.end(),
                                     [](const Sample& x) { return x.state.vehicles[1].mode == Mode::Stopped; });
    CHECK(stopped);
    CHECK(tr.samples.back().state.vehicles[1].mode == Mode::Moving);
  }

  TEST_CASE("samples land on leader breakpoints") {
    const auto tr = integrate(builtin_scenario("stop-and-go"));
    const double bp = 4.0 * std::asin(0.8);
    const bool hit = std::any_of(tr.samples.begin(), tr.samples.end(), [&](const Sample& x) { return x.t() == bp; });
    CHECK(hit);
  }

  TEST_CASE("reference RK4 agrees with the adaptive run on safe-gap") {
    const auto& s = builtin_scenario("safe-gap");
    const auto ref = reference_integrate(s, 1e-3);
    const auto ada = integrate(s);
    CHECK(ref.termination.kind == TerminationKind::Completed);
    CHECK(ref.samples.back().t() == 3.0);
    CHECK(ref.samples.back().state.vehicles[1].x ==
          doctest::Approx(ada.samples.back().state.vehicles[1].x).epsilon(1e-8));
  }
}

TEST_SUITE("properties") {
  TEST_CASE("integrate is deterministic") {
    for (const char* name : {"neg-velocity", "stop-and-go", "platoon-5", "overtake"}) {
      INFO(name);
      const auto a = integrate(builtin_scenario(name));
      const auto b = integrate(builtin_scenario(name));
      REQUIRE(a.samples.size() == b.samples.size());
      bool same = a.termination.kind == b.termination.kind && a.termination.t == b.termination.t;
      for (std::size_t k = 0; k < a.samples.size(); ++k) {
        same = same && a.samples[k].state == b.samples[k].state;
        for (std::size_t i = 0; i < a.samples[k].accel.size(); ++i)
          same = same && std::memcmp(&a.samples[k].accel[i], &b.samples[k].accel[i], sizeof(double)) == 0;
      }
      CHECK(same);
    }
  }

  TEST_CASE("sample times are strictly increasing except at event restarts") {
    for (const auto& [name, s] : builtin_scenarios()) {
      INFO(name);
      const auto tr = integrate(s);
      for (std::size_t k = 1; k < tr.samples.size(); ++k) CHECK(tr.samples[k].t() >= tr.samples[k - 1].t());
      CHECK(tr.samples.back().t() <= s.horizon);
    }
  }
}
