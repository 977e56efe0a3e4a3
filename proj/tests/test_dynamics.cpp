#include "support.hpp"
#include "topp/dynamics.hpp"
#include "topp/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace topp;

namespace {

VectorX random_vector(std::mt19937& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  VectorX v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

Vector6 fd_body_velocity(const Pose& minus, const Pose& plus, const Pose& at, double h) {
  const Matrix3 w = at.rotation.transpose() * (plus.rotation - minus.rotation) / (2 * h);
  Vector6 v;
  v << at.rotation.transpose() * (plus.translation - minus.translation) / (2 * h), w(2, 1), w(0, 2), w(1, 0);
  return v;
}

// Kinetic energy from link poses alone, velocities by central differences.
double kinetic_energy_fd(const RobotModel& m, const VectorX& q, const VectorX& qd) {
  const double h = 1e-6;
  const auto lo = link_poses(m, q - h * qd), hi = link_poses(m, q + h * qd), at = link_poses(m, q);
  double e = 0.0;
  for (int i = 0; i < m.dof(); ++i) {
    const Vector6 v = fd_body_velocity(lo[i], hi[i], at[i], h);
    e += 0.5 * v.dot(m.joints[i].link.spatial() * v);
  }
  return e;
}

const char* kRobots[] = {"slider", "planar2", "planar3", "arm7"};

}  // namespace

TEST_CASE("a robot at rest with no gravity needs no torque") {
  const RobotModel arm = testing::shipped_robot("arm7");
  const VectorX q = VectorX::Constant(7, 0.4);
  CHECK(inverse_dynamics(arm, q, VectorX::Zero(7), VectorX::Zero(7), Vector3::Zero()).norm() == 0.0);
}

TEST_CASE("point-mass pendulum holds m g l cos q") {
  const double m = 2.0, l = 0.7, g = 9.81;
  const RobotModel p = testing::pendulum(m, l);
  for (double q : {0.0, 0.3, 1.2, -2.0}) {
    const VectorX tau = inverse_dynamics(p, VectorX::Constant(1, q), VectorX::Zero(1), VectorX::Zero(1));
    CHECK(tau(0) == doctest::Approx(m * g * l * std::cos(q)).epsilon(1e-12));
  }
  // Pure acceleration: m l^2 qdd.
  const VectorX tau = inverse_dynamics(p, VectorX::Zero(1), VectorX::Zero(1), VectorX::Constant(1, 3.0), Vector3::Zero());
  CHECK(tau(0) == doctest::Approx(m * l * l * 3.0).epsilon(1e-12));
}

TEST_CASE("mass matrix columns, symmetry and definiteness") {
  std::mt19937 rng(3);
  for (const char* name : kRobots) {
    CAPTURE(name);
    const RobotModel r = testing::shipped_robot(name);
    const int n = r.dof();
    for (int trial = 0; trial < 100; ++trial) {
      const VectorX q = random_vector(rng, n, 3.0);
      const MatrixX M = mass_matrix(r, q);
      CHECK((M - M.transpose()).norm() <= 1e-12 * (1 + M.norm()));
      CHECK(Eigen::SelfAdjointEigenSolver<MatrixX>(M).eigenvalues().minCoeff() > 0.0);
      if (trial < 10) {
        for (int i = 0; i < n; ++i) {
          const VectorX col = inverse_dynamics(r, q, VectorX::Zero(n), VectorX::Unit(n, i), Vector3::Zero());
          CHECK((M.col(i) - col).norm() <= 1e-12 * (1 + M.norm()));
        }
        CHECK(coriolis_vector(r, q, VectorX::Zero(n)).norm() == 0.0);
      }
    }
  }
}

TEST_CASE("mass matrix reproduces the kinetic energy of the links") {
  std::mt19937 rng(5);
  for (const char* name : kRobots) {
    CAPTURE(name);
    const RobotModel r = testing::shipped_robot(name);
    for (int trial = 0; trial < 10; ++trial) {
      const VectorX q = random_vector(rng, r.dof(), 2.0), qd = random_vector(rng, r.dof(), 1.0);
      const double e = 0.5 * qd.dot(mass_matrix(r, q) * qd);
      CHECK(std::abs(e - kinetic_energy_fd(r, q, qd)) <= 1e-7 * (1 + e));
    }
  }
}

TEST_CASE("Coriolis vector matches the Lagrangian form") {
  // C qd = Mdot qd - 0.5 d/dq (qd' M qd), both by central differences.
  std::mt19937 rng(9);
  const RobotModel r = testing::shipped_robot("arm7");
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const VectorX q = random_vector(rng, 7, 2.0), qd = random_vector(rng, 7, 1.0);
    const MatrixX Mdot = (mass_matrix(r, q + h * qd) - mass_matrix(r, q - h * qd)) / (2 * h);
    VectorX grad(7);
    for (int i = 0; i < 7; ++i) {
      const VectorX e = h * VectorX::Unit(7, i);
      grad(i) = (qd.dot(mass_matrix(r, q + e) * qd) - qd.dot(mass_matrix(r, q - e) * qd)) / (2 * h);
    }
    const VectorX expected = Mdot * qd - 0.5 * grad;
    CHECK((coriolis_vector(r, q, qd) - expected).norm() <= 1e-6 * (1 + expected.norm()));
  }
}

TEST_CASE("power balance: dE/dt equals qd' (M qdd + C qd)") {
  std::mt19937 rng(13);
  const RobotModel r = testing::shipped_robot("arm7");
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const VectorX q = random_vector(rng, 7, 2.0), v = random_vector(rng, 7, 1.0), a = random_vector(rng, 7, 1.0);
    auto energy = [&](double t) {
      const VectorX qt = q + v * t + 0.5 * a * t * t, vt = v + a * t;
      return 0.5 * vt.dot(mass_matrix(r, qt) * vt);
    };
    const double rate = (energy(h) - energy(-h)) / (2 * h);
    const double power = v.dot(inverse_dynamics(r, q, v, a, Vector3::Zero()));
    CHECK(rate == doctest::Approx(power).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("grasp map of simple contact poses") {
  SUBCASE("translation only") {
    const Vector3 p(0.1, -0.2, 0.3), f(1, 2, 3);
    Vector6 w;
    w << f, Vector3::Zero();
    const Vector6 out = grasp_map(Pose(Matrix3::Identity(), p)) * w;
    CHECK((out.head<3>() - f).norm() < 1e-15);
    CHECK((out.tail<3>() - p.cross(f)).norm() < 1e-15);
  }
  SUBCASE("normal flipped by a half turn about x") {
    const Matrix3 R = Eigen::AngleAxisd(M_PI, Vector3::UnitX()).toRotationMatrix();
    Vector6 w;
    w << 0, 0, 5, 0, 0, 0;
    const Vector6 out = grasp_map(Pose(R, Vector3::Zero())) * w;
    CHECK((out.head<3>() - Vector3(0, 0, -5)).norm() < 1e-14);
  }
  SUBCASE("power is preserved for random poses") {
    std::mt19937 rng(17);
    for (int i = 0; i < 20; ++i) {
      const Eigen::Quaterniond qr = Eigen::Quaterniond(Eigen::Vector4d(random_vector(rng, 4, 1.0))).normalized();
      const Pose T(qr.toRotationMatrix(), random_vector(rng, 3, 1.0));
      CHECK((grasp_map(T) - adjoint(T.inverse()).transpose()).norm() < 1e-13);
      CHECK((adjoint(T) * adjoint(T.inverse()) - Matrix6::Identity()).norm() < 1e-13);
    }
  }
}

TEST_CASE("path dynamics of a stationary path vanish apart from gravity") {
  const RobotModel arm = testing::shipped_robot("arm7");
  const VectorX q0 = VectorX::Constant(7, 0.25);
  const auto sample = stack_dynamics_in_s({arm}, {JointPath::constant(q0)}, 0.5);
  CHECK(sample.inertial.norm() == 0.0);
  CHECK(sample.coriolis.norm() == 0.0);
  CHECK((sample.gravity - gravity_vector(arm, q0)).norm() < 1e-14);
}

TEST_CASE("path dynamics substitute into RNEA") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-3.0, 3.0);
  for (const char* file : {"arm7_free.json", "planar2_free.json", "pickup.json"}) {
    CAPTURE(file);
    const Scenario sc = load_scenario(testing::scenario_path(file));
    for (int i = 0; i < 20; ++i) {
      const auto sample = stack_dynamics_in_s(sc.robots, sc.paths, u(rng), sc.gravity);
      const double sd = std::abs(v(rng)), sdd = v(rng);
      const VectorX tau = inverse_dynamics(sc.robots[0], sample.q, sample.dq * sd,
                                           sample.ddq * sd * sd + sample.dq * sdd, sc.gravity);
      const VectorX split = sample.inertial * sdd + sample.coriolis * sd * sd + sample.gravity;
      CHECK((tau - split).norm() <= 1e-9 * (1 + tau.norm()));
      CHECK(rnea_substitution_error(sc, sample, sd, sdd) <= 1e-9 * (1 + tau.norm()));
    }
  }
}

TEST_CASE("object net wrench coefficients") {
  ObjectInertia obj;
  obj.mass = 2.0;
  obj.inertia = Vector3(0.1, 0.2, 0.3).asDiagonal();
  SUBCASE("zero motion") {
    const auto c = object_net_wrench_coefficients(obj, Vector6::Zero(), Vector6::Zero());
    CHECK(c.accel.norm() == 0.0);
    CHECK(c.speed.norm() == 0.0);
  }
  SUBCASE("pure translation") {
    Vector6 v, a;
    v << 1, 0, 0, 0, 0, 0;
    a << 0, 2, 0, 0, 0, 0;
    const auto c = object_net_wrench_coefficients(obj, v, a);
    CHECK((c.accel - obj.mass_matrix() * v).norm() < 1e-15);
    CHECK((c.speed - obj.mass_matrix() * a).norm() < 1e-15);
  }
  SUBCASE("spin about a principal axis carries no gyroscopic moment") {
    Vector6 v;
    v << 0, 0, 0, 0, 0, 1;
    CHECK(object_coriolis(obj, v).norm() == 0.0);
  }
}

TEST_CASE("object wrench coefficients match world-frame Newton-Euler") {
  const Scenario sc = load_scenario(testing::scenario_path("pickup.json"));
  const ObjectInertia& obj = sc.objects[0].inertia;
  auto pose_at = [&](double s) {
    return object_world_poses(sc, stack_dynamics_in_s(sc.robots, sc.paths, s, sc.gravity))[0];
  };
  const double h = 1e-4;
  for (double s0 : {0.2, 0.5, 0.8}) {
    const double sd = 0.9, sdd = -0.7;
    auto s_of = [&](double t) { return s0 + sd * t + 0.5 * sdd * t * t; };
    auto angular_momentum = [&](double t) {
      // World-frame angular momentum about the center of mass.
      const Pose p = pose_at(s_of(t));
      const Pose lo = pose_at(s_of(t - h)), hi = pose_at(s_of(t + h));
      const Matrix3 W = (hi.rotation - lo.rotation) / (2 * h) * p.rotation.transpose();
      const Vector3 w(W(2, 1), W(0, 2), W(1, 0));
      return Vector3(p.rotation * obj.inertia * p.rotation.transpose() * w);
    };
    const Pose p = pose_at(s0);
    const Vector3 acc = (pose_at(s_of(h)).translation - 2 * p.translation + pose_at(s_of(-h)).translation) / (h * h);
    const Vector3 torque = (angular_momentum(h) - angular_momentum(-h)) / (2 * h);
    Vector6 expected;
    expected << p.rotation.transpose() * obj.mass * acc, p.rotation.transpose() * torque;

    const auto k = object_path_kinematics(sc.robots[0], sc.paths[0], s0, sc.objects[0].offset);
    const auto c = object_net_wrench_coefficients(obj, k.velocity, k.acceleration);
    const Vector6 net = c.accel * sdd + c.speed * sd * sd;
    CHECK((net - expected).norm() <= 1e-4 * (1 + expected.norm()));
  }
}

TEST_CASE("holding the pickup block statically matches a lumped-mass robot") {
  // The block's weight is balanced by the two finger wrenches. The robot
  // feels their reaction, so tau = g(q) + sum_i J^T G_i F_i must equal the
  // gravity torque of the arm with the block welded to its last link.
  Scenario sc = load_scenario(testing::scenario_path("pickup.json"));
  const ObjectModel& obj = sc.objects[0];
  const RobotModel& arm = sc.robots[0];
  for (double s : {0.0, 0.4, 1.0}) {
    const auto sample = stack_dynamics_in_s(sc.robots, sc.paths, s, sc.gravity);
    const Pose world = object_world_poses(sc, sample)[0];
    Vector6 weight;
    weight << world.rotation.transpose() * (obj.inertia.mass * sc.gravity), Vector3::Zero();

    Eigen::Matrix<double, 6, 12> G;
    G << grasp_map(obj.contacts[0].pose), grasp_map(obj.contacts[1].pose);
    const Eigen::Matrix<double, 12, 1> F = G.completeOrthogonalDecomposition().solve(-weight);
    REQUIRE((G * F + weight).norm() < 1e-12);

    VectorX tau = sample.gravity;
    for (int i = 0; i < 2; ++i) {
      tau += sample.contact_jacobian_transpose(0, obj.offset * obj.contacts[i].pose) * F.segment<6>(6 * i);
    }

    RobotModel lumped = arm;
    LinkInertia& last = lumped.joints.back().link;
    const Pose at_zero = arm.x_ref * arm.tool * obj.offset;
    const Vector3 com = (lumped.joints.back().link_frame.inverse() * at_zero).translation;
    last.com = (last.mass * last.com + obj.inertia.mass * com) / (last.mass + obj.inertia.mass);
    last.mass += obj.inertia.mass;
    const VectorX expected = gravity_vector(lumped, sample.q, sc.gravity);
    CHECK((tau - expected).norm() <= 1e-10 * (1 + expected.norm()));
  }
}
