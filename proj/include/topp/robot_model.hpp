#pragma once

#include "topp/lie.hpp"

#include <limits>
#include <string>
#include <vector>

namespace topp {

enum class JointType { Revolute, Prismatic };

/// Rigid-body inertia of one link, expressed in that link's frame.
struct LinkInertia {
  double mass = 1.0;
  Vector3 com = Vector3::Zero();
  Matrix3 inertia = Matrix3::Identity();  // about the center of mass

  /// 6x6 spatial inertia about the link-frame origin, [linear; angular].
  Matrix6 spatial() const;
  void validate() const;
};

/// Per-joint actuator and motion limits. Infinite values mean "unbounded".
struct JointLimits {
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double torque_lower = -kInf;
  double torque_upper = kInf;
  double velocity = kInf;  // symmetric, |qd| <= velocity
  double acceleration_lower = -kInf;
  double acceleration_upper = kInf;
};

struct Joint {
  JointType type = JointType::Revolute;
  Twist twist;             // space-frame twist at the reference configuration
  Pose link_frame;         // pose of the link frame at q = 0, base coordinates
  LinkInertia link;
  JointLimits limits;
};

/// Serial manipulator described by the product-of-exponentials formula.
///
/// `x_ref` is the end-effector pose at q = 0. `tool` maps the end-effector
/// frame to the reporting frame used by the body Jacobian (typically the
/// grasped object's frame). `base` places the robot base in the world.
struct RobotModel {
  std::string name;
  std::vector<Joint> joints;
  Pose x_ref;
  Pose tool;
  Pose base;

  int dof() const { return static_cast<int>(joints.size()); }
  void validate() const;
};

}  // namespace topp
