#include <cmath>
#include <random>

#include "doctest.h"
#include "idm/accel.hpp"
#include "idm/scenario.hpp"

using namespace idm;

namespace {

const ModelParams ce = counterexample_params();

AccelInput pair_at(double gap, double v, double v_l = 0.0, const ModelParams& p = ce) {
  return AccelInput{0.0, v, p.l + gap, v_l};
}

VariantConfig with(VariantKind k) { return VariantConfig{k}; }

}  // namespace

TEST_SUITE("accel-models") {
  TEST_CASE("counterexample start: a(1 - (s0/eps)^2) = -7/9") {
    CHECK(idm_accel(ce, pair_at(1.5, 0.0)) == doctest::Approx(-7.0 / 9.0).epsilon(1e-14));
  }

  TEST_CASE("gap equal to s0 at rest gives zero acceleration") {
    CHECK(idm_accel(ce, pair_at(2.0, 0.0)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  }

  TEST_CASE("table parameters, v = 20, v_l = 15, gap 30") {
    // mpmath, 30 digits: -4.46328856777664744040229712476
    const auto p = table_params();
    CHECK(idm_accel(p, pair_at(30.0, 20.0, 15.0, p)) == doctest::Approx(-4.4632885677766474).epsilon(1e-13));
  }

  TEST_CASE("free-flow acceleration") {
    // 0.73 (1 - (25 / (120/3.6))^4) = 0.4990234375
    CHECK(free_flow_accel(table_params(), 25.0) == doctest::Approx(0.4990234375).epsilon(1e-14));
    CHECK(free_flow_accel(ce, 0.0) == ce.a);
    CHECK(free_flow_accel(ce, ce.v_free) == doctest::Approx(0.0));
  }

  TEST_CASE("power term: 0^delta = 0 and the signed option") {
    CHECK(power_term(ce, 0.0, false) == 0.0);
    CHECK(power_term(ce, 0.0, true) == 0.0);
    CHECK(power_term(ce, -0.5, false) == doctest::Approx(0.0625));
    CHECK(power_term(ce, -0.5, true) == doctest::Approx(-0.0625));
  }

  TEST_CASE("nonpositive gaps are outside the domain") {
    CHECK_THROWS_AS(idm_accel(ce, pair_at(0.0, 0.0)), DomainViolation);
    CHECK_THROWS_AS(idm_accel(ce, pair_at(-1.0, 0.0)), DomainViolation);
    try {
      idm_accel(ce, pair_at(-1.0, 0.0));
    } catch (const DomainViolation& e) {
      CHECK(e.gap() == -1.0);
    }
  }

  TEST_CASE("h ramp") {
    CHECK(h_saturation(0.1, -1.0) == 0.0);
    CHECK(h_saturation(0.1, 0.0) == 0.0);
    CHECK(h_saturation(0.1, 0.05) == doctest::Approx(0.5));
    CHECK(h_saturation(0.1, 0.1) == 1.0);
    CHECK(h_saturation(0.1, 3.0) == 1.0);
  }

  TEST_CASE("h tilde ramp") {
    CHECK(h_tilde_saturation(0.5, 2.0, 0.2) == doctest::Approx(0.25));
    CHECK(h_tilde_saturation(0.5, 2.0, 0.5) == doctest::Approx(0.25));
    CHECK(h_tilde_saturation(0.5, 2.0, 1.25) == doctest::Approx(0.625));
    CHECK(h_tilde_saturation(0.5, 2.0, 2.0) == 1.0);
    CHECK(h_tilde_saturation(0.5, 2.0, 9.0) == 1.0);
  }

  TEST_CASE("velocity regularized weights the interaction by h(v)") {
    // mpmath: 0.0377542529972955450829145798485
    CHECK(variant_accel(ce, with(VelocityRegularized{0.1}), pair_at(1.5, 0.05)) ==
          doctest::Approx(0.037754252997295545).epsilon(1e-12));
    CHECK(variant_accel(ce, with(VelocityRegularized{0.1}), pair_at(0.3, 0.0)) == ce.a);
  }

  TEST_CASE("distance regularized weights the interaction by h tilde(gap)") {
    // mpmath: -0.443365495504056682375628130227, -11.0279999625338056864635677519
    CHECK(variant_accel(ce, with(DistanceRegularized{0.5}), pair_at(1.5, 0.05)) ==
          doctest::Approx(-0.44336549550405668).epsilon(1e-12));
    CHECK(variant_accel(ce, with(DistanceRegularized{0.5}), pair_at(0.3, 0.05)) ==
          doctest::Approx(-11.027999962533806).epsilon(1e-12));
  }

  TEST_CASE("acceleration projected clamps at -a_min and projects velocity") {
    const auto ap = with(AccelerationProjected{1.0});
    CHECK(idm_accel(ce, pair_at(0.1, 0.0)) < -50.0);
    CHECK(variant_accel(ce, ap, pair_at(0.1, 0.0)) == -1.0);
    // v < 0 is evaluated as v = 0: 1 - (2/3)^2 = 5/9
    CHECK(variant_accel(ce, ap, pair_at(3.0, -0.3)) == doctest::Approx(5.0 / 9.0));
  }

  TEST_CASE("velocity projected evaluates at max(v, 0)") {
    const auto vp = with(VelocityProjected{});
    CHECK(variant_accel(ce, vp, pair_at(3.0, -0.3)) == doctest::Approx(5.0 / 9.0));
    CHECK(variant_accel(ce, vp, pair_at(3.0, 0.4)) == idm_accel(ce, pair_at(3.0, 0.4)));
  }

  TEST_CASE("classic variant is the IDM") {
    CHECK(variant_accel(ce, with(Classic{}), pair_at(1.2, 0.3, 0.1)) == idm_accel(ce, pair_at(1.2, 0.3, 0.1)));
  }

  TEST_CASE("discontinuous branches") {
    const auto dc = with(Discontinuous{});
    CHECK(discontinuous_branch(ce, 0.2, 1.0) == DiscontinuousBranch::PositiveVelocity);
    CHECK(discontinuous_branch(ce, 0.0, 2.0) == DiscontinuousBranch::ZeroVelocityFarGap);
    CHECK(discontinuous_branch(ce, 0.0, 1.5) == DiscontinuousBranch::ZeroVelocityNearGap);
    CHECK(discontinuous_branch(ce, -0.1, 1.5) == DiscontinuousBranch::NegativeVelocity);
    CHECK(variant_accel(ce, dc, pair_at(1.5, 0.0)) == 0.0);
    CHECK(variant_accel(ce, dc, pair_at(3.0, 0.0)) == doctest::Approx(5.0 / 9.0));
    CHECK(variant_accel(ce, dc, pair_at(1.5, 0.2)) == idm_accel(ce, pair_at(1.5, 0.2)));
    CHECK(variant_accel(ce, dc, pair_at(3.0, 0.0), Mode::Stopped) == 0.0);
  }

  TEST_CASE("projected right-hand side through a collapsed gap") {
    CHECK(projected_accel_through_collapse(ce, 1.0, pair_at(0.0, 2.0)) == -1.0);
    CHECK(projected_accel_through_collapse(ce, 1.0, pair_at(-2.0, 2.0)) >= -1.0);
    CHECK(projected_accel_through_collapse(ce, 1.0, pair_at(3.0, 0.0)) ==
          variant_accel(ce, with(AccelerationProjected{1.0}), pair_at(3.0, 0.0)));
  }
}

TEST_SUITE("properties") {
  TEST_CASE("h and h tilde are Lipschitz with constants 1/eps_v and (1 - eps/s0)/(s0 - eps)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> v(-1.0, 1.0), g(0.0, 4.0);
    const double eps_v = 0.1, eps_d = 0.5, s0 = 2.0;
    const double lip_d = (1.0 - eps_d / s0) / (s0 - eps_d);
    for (int i = 0; i < 2000; ++i) {
      const double v1 = v(rng), v2 = v(rng), g1 = g(rng), g2 = g(rng);
      CHECK(std::abs(h_saturation(eps_v, v1) - h_saturation(eps_v, v2)) <= std::abs(v1 - v2) / eps_v + 1e-12);
      CHECK(std::abs(h_tilde_saturation(eps_d, s0, g1) - h_tilde_saturation(eps_d, s0, g2)) <=
            std::abs(g1 - g2) * lip_d + 1e-12);
    }
  }

  TEST_CASE("every (v >= 0, gap > 0) maps to exactly one admissible discontinuous branch") {
    for (double v : {0.0, 1e-300, 1e-9, 0.5, 3.0}) {
      for (double gap : {1e-9, 0.5, 1.999999, 2.0, 2.000001, 10.0}) {
        const auto b = discontinuous_branch(ce, v, gap);
        CHECK(b != DiscontinuousBranch::NegativeVelocity);
        if (v > 0.0) CHECK(b == DiscontinuousBranch::PositiveVelocity);
        if (v == 0.0) CHECK(b == (gap >= ce.s0 ? DiscontinuousBranch::ZeroVelocityFarGap
                                               : DiscontinuousBranch::ZeroVelocityNearGap));
      }
    }
  }

  TEST_CASE("discontinuous branches agree on shared boundaries except the designed jump") {
    const auto dc = with(Discontinuous{});
    // v -> 0+ with gap >= s0 meets the far-gap branch continuously.
    for (double gap : {2.0, 2.5, 7.0}) {
      CHECK(variant_accel(ce, dc, pair_at(gap, 1e-12)) ==
            doctest::Approx(variant_accel(ce, dc, pair_at(gap, 0.0))).epsilon(1e-9));
    }
    // Inside s0 the limit from v > 0 is negative, the v = 0 branch is 0.
    CHECK(variant_accel(ce, dc, pair_at(1.0, 1e-12)) < -1.0);
    CHECK(variant_accel(ce, dc, pair_at(1.0, 0.0)) == 0.0);
  }

  TEST_CASE("regularized accelerations lie between the classic one and a") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> v(0.0, 2.0), g(0.05, 6.0);
    for (int i = 0; i < 2000; ++i) {
      const auto in = pair_at(g(rng), v(rng));
      const double classic = idm_accel(ce, in);
      CHECK(variant_accel(ce, with(VelocityRegularized{0.1}), in) >= classic - 1e-12);
      CHECK(variant_accel(ce, with(DistanceRegularized{0.5}), in) >= classic - 1e-12);
      CHECK(variant_accel(ce, with(VelocityRegularized{0.1}), in) <= ce.a + 1e-12);
    }
  }
}
