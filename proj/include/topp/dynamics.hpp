#pragma once

#include "topp/joint_path.hpp"
#include "topp/kinematics.hpp"
#include "topp/robot_model.hpp"

#include <vector>

namespace topp {

inline const Vector3 kDefaultGravity{0.0, 0.0, -9.81};

/// M(q) qdd + C(q, qd) qd + g(q) by recursive Newton-Euler. `gravity` is
/// given in world coordinates and rotated into the robot base.
VectorX inverse_dynamics(const RobotModel& model, const VectorX& q, const VectorX& qd, const VectorX& qdd,
                         const Vector3& gravity = kDefaultGravity);

MatrixX mass_matrix(const RobotModel& model, const VectorX& q);
/// C(q, qd) qd.
VectorX coriolis_vector(const RobotModel& model, const VectorX& q, const VectorX& qd);
VectorX gravity_vector(const RobotModel& model, const VectorX& q, const Vector3& gravity = kDefaultGravity);

/// Grasp map of one contact: carries a contact-frame wrench into the frame the
/// contact pose is expressed in. [R 0; S(p)R R].
inline Matrix6 grasp_map(const Pose& contact_in_object) { return wrench_transform(contact_in_object); }

/// Rigid object with its frame at the center of mass.
struct ObjectInertia {
  double mass = 1.0;
  Matrix3 inertia = Matrix3::Identity();

  /// diag(m I, I_O).
  Matrix6 mass_matrix() const;
  void validate() const;
};

/// Velocity-product term [w x m v; w x I w] for body velocity (v, w).
Vector6 object_coriolis(const ObjectInertia& object, const Vector6& velocity);

/// Coefficients of the net object wrench f_net = A sddot + B sdot^2.
struct NetWrenchCoefficients {
  Vector6 accel;  // A = M_O J_O
  Vector6 speed;  // B = M_O J_O' + C_O
};

NetWrenchCoefficients object_net_wrench_coefficients(const ObjectInertia& object, const Vector6& velocity_direction,
                                                     const Vector6& acceleration_direction);

/// Everything the manipulator dynamics rows consume at one path coordinate.
/// Vectors are stacked over all robots in order.
struct PathDynamicsSample {
  double s = 0.0;
  VectorX q, dq, ddq;
  VectorX inertial;  // M(q) q'
  VectorX coriolis;  // M(q) q'' + C(q, q') q'
  VectorX gravity;   // g(q)
  std::vector<int> joint_offset;          // first stacked index of each robot
  std::vector<Matrix6X> jacobians;        // body Jacobian of each reporting frame
  std::vector<ObjectPathKinematics> reporting;  // J_O, J_O' of each reporting frame
  std::vector<Pose> reporting_world;      // world pose of each reporting frame

  int dof() const { return static_cast<int>(q.size()); }

  /// n x 6 block J^T G placing a wrench applied at `contact` (pose in robot
  /// `robot`'s reporting frame) onto the stacked joint torques.
  MatrixX contact_jacobian_transpose(int robot, const Pose& contact) const;
};

PathDynamicsSample stack_dynamics_in_s(const std::vector<RobotModel>& robots, const std::vector<JointPath>& paths,
                                       double s, const Vector3& gravity = kDefaultGravity,
                                       JacobianDerivative method = JacobianDerivative::Analytic);

}  // namespace topp
