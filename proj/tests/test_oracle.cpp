#include "support.hpp"
#include "topp/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace topp;

TEST_CASE("double integrator: phase plane and conic program give T = 2") {
  const Scenario sc = testing::double_integrator();
  CHECK(topp_phase_plane(sc, 2000).T == doctest::Approx(2.0).epsilon(1e-4));
  const auto out = testing::solve_at(sc, 250);
  REQUIRE(out.status == RunStatus::Optimal);
  CHECK(out.time.T == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("velocity-limited double integrator follows a trapezoid, T = 2.5") {
  const Scenario sc = testing::double_integrator(0.5);
  CHECK(topp_phase_plane(sc, 2000).T == doctest::Approx(2.5).epsilon(1e-3));
  const auto out = testing::solve_at(sc, 250);
  REQUIRE(out.status == RunStatus::Optimal);
  CHECK(out.time.T == doctest::Approx(2.5).epsilon(5e-3));
}

TEST_CASE("phase plane profile stays under the velocity curve") {
  const Scenario sc = load_scenario(testing::scenario_path("planar2_free.json"));
  const PhasePlaneProfile pp = topp_phase_plane(sc, 500);
  REQUIRE(pp.s.size() == pp.profile.size());
  for (std::size_t i = 0; i < pp.s.size(); ++i) {
    CHECK(pp.profile[i] >= 0.0);
    CHECK(pp.profile[i] <= pp.mvc[i] * (1 + 1e-9) + 1e-12);
  }
  CHECK(pp.profile.front() == 0.0);
  CHECK(pp.profile.back() == doctest::Approx(0.0).scale(1e-9));
  const auto out = testing::solve_at(sc, 250);
  REQUIRE(out.status == RunStatus::Optimal);
  CHECK(std::abs(out.time.T - pp.T) <= 0.02 * pp.T);
}

TEST_CASE("a joint that cannot hold gravity is a dynamic singularity") {
  Scenario sc = testing::double_integrator();
  // Holding against 3 N with 1 N of force needs |qdd| >= 2, above the limit.
  sc.gravity = Vector3(-3.0, 0.0, 0.0);
  sc.robots[0].joints[0].limits.acceleration_lower = -1.0;
  sc.robots[0].joints[0].limits.acceleration_upper = 1.0;
  CHECK_THROWS_AS(topp_phase_plane(sc, 100), DynamicSingularity);
  CHECK(testing::solve_at(sc, 20).status == RunStatus::Infeasible);
}

TEST_CASE("audit of an optimal pickup passes and is repeatable") {
  const Scenario sc = load_scenario(testing::scenario_path("pickup.json"));
  const auto out = testing::solve_at(sc, 100);
  REQUIRE(out.status == RunStatus::Optimal);
  const AuditReport a = audit(sc, out.grid, out.solution);
  CHECK(a.pass());
  CHECK(a.max_violation() <= 1e-6);
  CHECK(a.to_json() == audit(sc, out.grid, out.solution).to_json());
  for (const char* family : {"dynamics", "torque", "velocity", "object_balance", "contact_cone", "normal_force",
                             "coupling", "b_nonnegative"}) {
    CAPTURE(family);
    CHECK(a.family(family).rows > 0);
  }
}

TEST_CASE("audit flags exactly the intervals whose torque was pushed past its limit") {
  const Scenario sc = load_scenario(testing::scenario_path("planar2_free.json"));
  const auto out = testing::solve_at(sc, 100);
  REQUIRE(out.status == RunStatus::Optimal);
  ScalingSolution bad = out.solution;
  bad.tau *= 1.1;
  const auto limits = sc.scaled_limits();
  std::set<int> expected;
  for (int k = 0; k < out.grid.K; ++k) {
    for (int j = 0; j < bad.tau.cols(); ++j) {
      const double t = bad.tau(k, j), hi = limits[j].torque_upper, lo = limits[j].torque_lower;
      if ((t - hi) / (1 + std::abs(hi)) > 1e-6 || (lo - t) / (1 + std::abs(lo)) > 1e-6) expected.insert(k);
    }
  }
  REQUIRE_FALSE(expected.empty());
  const AuditReport a = audit(sc, out.grid, bad);
  CHECK_FALSE(a.pass());
  const auto& torque = a.family("torque");
  CHECK(std::set<int>(torque.flagged.begin(), torque.flagged.end()) == expected);
  // The dynamics rows no longer balance anywhere the torque is nonzero.
  CHECK(a.family("dynamics").flagged.size() == static_cast<std::size_t>(out.grid.K));
}

TEST_CASE("finite-difference suite passes on every shipped scenario") {
  for (const char* file : {"double_integrator.json", "planar2_free.json", "arm7_free.json", "pickup.json",
                           "pivoting.json", "waiter.json"}) {
    CAPTURE(file);
    const Scenario sc = load_scenario(testing::scenario_path(file));
    const FdLedger ledger = fd_suite(sc);
    CHECK(ledger.pass());
    for (const auto& c : ledger.checks) {
      CAPTURE(c.name);
      CHECK(c.samples > 0);
      CHECK(c.max_error <= 1e-5);
    }
  }
}

TEST_CASE("finite-difference suite is seeded") {
  const Scenario sc = load_scenario(testing::scenario_path("arm7_free.json"));
  CHECK(fd_suite(sc, 5).to_json() == fd_suite(sc, 5).to_json());
  CHECK(fd_suite(sc, 5).to_json() != fd_suite(sc, 6).to_json());
}

TEST_CASE("RNEA substitution detects a corrupted path derivative") {
  const Scenario sc = load_scenario(testing::scenario_path("arm7_free.json"));
  PathDynamicsSample sample = stack_dynamics_in_s(sc.robots, sc.paths, 0.4, sc.gravity);
  CHECK(rnea_substitution_error(sc, sample, 1.3, -0.4) <= 1e-9);
  sample.ddq(2) += 0.1;
  CHECK(rnea_substitution_error(sc, sample, 1.3, -0.4) > 1e-3);
}
