#include "topp/kinematics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace topp {

namespace {

void check_dimension(const RobotModel& model, const VectorX& q, const char* what) {
  if (q.size() != model.dof()) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(model.dof()) +
                                " joint values, got " + std::to_string(q.size()));
  }
}

}  // namespace

void RobotModel::validate() const {
  if (joints.empty()) throw std::invalid_argument("robot '" + name + "': no joints");
  auto orthonormal = [](const Pose& p) { return p.orthogonality_error() <= 1e-10 && p.rotation.determinant() > 0.0; };
  if (!orthonormal(x_ref) || !orthonormal(tool) || !orthonormal(base)) {
    throw std::invalid_argument("robot '" + name + "': pose rotation is not a proper rotation");
  }
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const auto& j = joints[i];
    const std::string where = "robot '" + name + "' joint " + std::to_string(i);
    if (j.type == JointType::Revolute) {
      if (std::abs(j.twist.angular.norm() - 1.0) > 1e-9) throw std::invalid_argument(where + ": revolute twist needs a unit axis");
    } else {
      if (j.twist.angular.norm() > 1e-12 || std::abs(j.twist.linear.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument(where + ": prismatic twist must be a unit pure translation");
      }
    }
    if (!orthonormal(j.link_frame)) throw std::invalid_argument(where + ": link frame rotation is not a proper rotation");
    j.link.validate();
    const auto& l = j.limits;
    if (!(l.torque_lower < l.torque_upper) || !(l.velocity > 0.0) || !(l.acceleration_lower < l.acceleration_upper)) {
      throw std::invalid_argument(where + ": inconsistent limits");
    }
  }
}

Pose forward_kinematics(const RobotModel& model, const VectorX& q) {
  check_dimension(model, q, "forward_kinematics");
  Pose x;
  for (int i = 0; i < model.dof(); ++i) x = x * pose_exp(model.joints[i].twist, q(i));
  return x * model.x_ref;
}

Pose reporting_pose(const RobotModel& model, const VectorX& q) { return forward_kinematics(model, q) * model.tool; }

std::vector<Pose> link_poses(const RobotModel& model, const VectorX& q) {
  check_dimension(model, q, "link_poses");
  std::vector<Pose> out;
  out.reserve(model.dof());
  Pose x;
  for (int i = 0; i < model.dof(); ++i) {
    x = x * pose_exp(model.joints[i].twist, q(i));
    out.push_back(x * model.joints[i].link_frame);
  }
  return out;
}

Matrix6X body_jacobian(const RobotModel& model, const VectorX& q) {
  check_dimension(model, q, "body_jacobian");
  const int n = model.dof();
  Matrix6X spatial(6, n);
  Pose x;
  for (int i = 0; i < n; ++i) {
    spatial.col(i) = adjoint(x) * model.joints[i].twist.vector();
    x = x * pose_exp(model.joints[i].twist, q(i));
  }
  const Pose report = x * model.x_ref * model.tool;
  return adjoint(report.inverse()) * spatial;
}

Matrix6X jacobian_derivative(const RobotModel& model, const VectorX& q, const VectorX& qdot,
                             JacobianDerivative method) {
  check_dimension(model, qdot, "jacobian_derivative");
  const int n = model.dof();
  if (method == JacobianDerivative::CentralDifference) {
    Matrix6X out = Matrix6X::Zero(6, n);
    VectorX qp = q;
    VectorX qm = q;
    for (int i = 0; i < n; ++i) {
      if (qdot(i) == 0.0) continue;
      qp(i) = q(i) + kJacobianFdStep;
      qm(i) = q(i) - kJacobianFdStep;
      out += (body_jacobian(model, qp) - body_jacobian(model, qm)) * (qdot(i) / (2.0 * kJacobianFdStep));
      qp(i) = q(i);
      qm(i) = q(i);
    }
    return out;
  }
  // dJ_i/dq_k = ad(J_i) J_k for k > i, zero otherwise.
  const Matrix6X jac = body_jacobian(model, q);
  Matrix6X out = Matrix6X::Zero(6, n);
  Vector6 tail = Vector6::Zero();
  for (int i = n - 1; i >= 0; --i) {
    out.col(i) = ad(Vector6(jac.col(i))) * tail;
    tail += jac.col(i) * qdot(i);
  }
  return out;
}

Matrix6X jacobian_path_derivative(const RobotModel& model, const JointPath& path, double s,
                                  JacobianDerivative method) {
  const PathPoint p = path.evaluate(s);
  return jacobian_derivative(model, p.q, p.dq, method);
}

ObjectPathKinematics object_path_kinematics(const RobotModel& model, const JointPath& path, double s,
                                            const Pose& offset, JacobianDerivative method) {
  const PathPoint p = path.evaluate(s);
  const Matrix6 to_object = adjoint(offset.inverse());
  const Matrix6X jac = body_jacobian(model, p.q);
  const Matrix6X djac = jacobian_derivative(model, p.q, p.dq, method);
  ObjectPathKinematics out;
  out.velocity = to_object * (jac * p.dq);
  out.acceleration = to_object * (djac * p.dq + jac * p.ddq);
  return out;
}

}  // namespace topp
