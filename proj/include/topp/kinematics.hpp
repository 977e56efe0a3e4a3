#pragma once

#include "topp/joint_path.hpp"
#include "topp/robot_model.hpp"

#include <vector>

namespace topp {

/// How dJ/dq is evaluated when differentiating Jacobians along a path.
enum class JacobianDerivative {
  Analytic,           // Lie-bracket structure of the POE body Jacobian
  CentralDifference,  // central differences in q, step 1e-6
};

inline constexpr double kJacobianFdStep = 1e-6;

/// exp(xi_1 q_1) ... exp(xi_n q_n) X_ref.
Pose forward_kinematics(const RobotModel& model, const VectorX& q);

/// forward_kinematics(q) * tool, the frame the body Jacobian reports in.
Pose reporting_pose(const RobotModel& model, const VectorX& q);

/// Pose of every link frame in base coordinates.
std::vector<Pose> link_poses(const RobotModel& model, const VectorX& q);

/// 6 x n body Jacobian of the reporting frame; V = J q_dot with V = [v; w].
Matrix6X body_jacobian(const RobotModel& model, const VectorX& q);

/// sum_i dJ/dq_i * qdot_i at configuration q.
Matrix6X jacobian_derivative(const RobotModel& model, const VectorX& q, const VectorX& qdot,
                             JacobianDerivative method = JacobianDerivative::Analytic);

/// dJ(q(s))/ds by the chain rule over joints.
Matrix6X jacobian_path_derivative(const RobotModel& model, const JointPath& path, double s,
                                  JacobianDerivative method = JacobianDerivative::Analytic);

/// Path-projected body velocity of a frame rigidly attached to the reporting
/// frame: V = J_O sdot, Vdot = J_O' sdot^2 + J_O sddot.
struct ObjectPathKinematics {
  Vector6 velocity;      // J_O(s)
  Vector6 acceleration;  // J_O'(s)
};

/// `offset` is the pose of the attached frame in the reporting frame.
ObjectPathKinematics object_path_kinematics(const RobotModel& model, const JointPath& path, double s,
                                            const Pose& offset = Pose::identity(),
                                            JacobianDerivative method = JacobianDerivative::Analytic);

}  // namespace topp
