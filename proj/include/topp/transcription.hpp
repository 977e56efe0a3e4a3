#pragma once

#include "topp/conic_program.hpp"
#include "topp/scenario.hpp"

#include <vector>

namespace topp {

/// Uniform grid on [0, 1] with K intervals.
struct Grid {
  int K = 0;
  std::vector<double> s;    // K + 1 grid points
  std::vector<double> mid;  // K midpoints
  double ds = 0.0;
};

/// Throws std::invalid_argument for K < 1.
Grid build_grid(int K);

/// Linear interpolation of b on interval k. Throws std::domain_error when s
/// lies outside [s^k, s^{k+1}].
double interval_b_interpolation(const Grid& grid, int k, double b_k, double b_k1, double s);

/// One contact evaluated at a path coordinate.
struct ContactSample {
  int object = -1;
  int index = -1;  // position in the object's contact list
  bool manipulator = false;
  int slot = -1;   // contact index within F_M (manipulator) or F_E (others)
  Matrix6 object_map;   // contact wrench -> object frame
  Matrix6 support_map;  // contact wrench -> support object frame (object contacts)
  MatrixX joint_map;    // n x 6, contact wrench -> joint torques (manipulator contacts)
};

struct ObjectSample {
  Pose world;
  Vector6 velocity;      // J_O
  Vector6 acceleration;  // J_O'
  NetWrenchCoefficients net;
  Vector6 external;      // weight plus any extra wrench, object frame
};

/// All path-dependent coefficients of a scenario at one s.
struct ScenarioSample {
  PathDynamicsSample dynamics;
  std::vector<ObjectSample> objects;
  std::vector<ContactSample> contacts;  // object-major order
};

ScenarioSample sample_scenario(const Scenario& scenario, double s);

/// Contacts in object-major order with their F_M / F_E slots.
struct ContactIndex {
  const ContactSpec* spec;
  int object;
  int index;
  bool manipulator;
  int slot;
};
std::vector<ContactIndex> enumerate_contacts(const Scenario& scenario);

/// Builds the full second-order cone program. Slices (interval-major):
/// a[K], b[K+1], c[K+1], d[K], tau[K n], F_E[K 6u], F_M[K 6v].
ConicProgram assemble(const Scenario& scenario, const Grid& grid);

/// Named view of a solution vector.
struct ScalingSolution {
  VectorX a, b, c, d;
  MatrixX tau;  // K x n
  MatrixX F_E;  // K x 6u
  MatrixX F_M;  // K x 6v
};

ScalingSolution extract_solution(const ConicProgram& program, const Grid& grid, const VectorX& x);

struct TimeMap {
  std::vector<double> t;  // time at every grid point
  double T = 0.0;
};

/// Integrates 1/sdot with b piecewise linear in s. Throws std::domain_error
/// naming the interval when both of its endpoint speeds vanish.
TimeMap recover_time(const VectorX& b, const Grid& grid);

/// Path state at time t along the recovered scaling: s, sdot, sddot and the
/// interval the time falls in.
struct ScalingState {
  double s = 0.0;
  double sdot = 0.0;
  double sddot = 0.0;
  int interval = 0;
};

ScalingState scaling_at_time(const VectorX& b, const Grid& grid, const TimeMap& time, double t);

}  // namespace topp
