#include "topp/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>
#include <string>

namespace topp {

namespace {

void check_inertia(const Matrix3& inertia, const std::string& what) {
  if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument(what + ": inertia matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix3> eig(inertia, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12) throw std::invalid_argument(what + ": inertia matrix is not PSD");
}

}  // namespace

Matrix6 LinkInertia::spatial() const {
  const Matrix3 c = skew(com);
  Matrix6 g;
  g.topLeftCorner<3, 3>() = mass * Matrix3::Identity();
  g.topRightCorner<3, 3>() = -mass * c;
  g.bottomLeftCorner<3, 3>() = mass * c;
  g.bottomRightCorner<3, 3>() = inertia - mass * c * c;
  return g;
}

void LinkInertia::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("link inertia: mass must be positive");
  if (!com.allFinite()) throw std::invalid_argument("link inertia: non-finite center of mass");
  check_inertia(inertia, "link inertia");
}

VectorX inverse_dynamics(const RobotModel& model, const VectorX& q, const VectorX& qd, const VectorX& qdd,
                         const Vector3& gravity) {
  const int n = model.dof();
  if (q.size() != n || qd.size() != n || qdd.size() != n) {
    throw std::invalid_argument("inverse_dynamics: expected " + std::to_string(n) + " joint values");
  }
  const std::vector<Pose> frames = link_poses(model, q);

  std::vector<Vector6> axis(n), vel(n), acc(n);
  std::vector<Matrix6> to_child(n);  // Ad_{T_{i,i-1}}
  Vector6 v_prev = Vector6::Zero();
  Vector6 a_prev;
  a_prev << -(model.base.rotation.transpose() * gravity), Vector3::Zero();
  Pose prev;
  for (int i = 0; i < n; ++i) {
    axis[i] = adjoint(model.joints[i].link_frame.inverse()) * model.joints[i].twist.vector();
    to_child[i] = adjoint(frames[i].inverse() * prev);
    vel[i] = to_child[i] * v_prev + axis[i] * qd(i);
    acc[i] = to_child[i] * a_prev + ad(vel[i]) * axis[i] * qd(i) + axis[i] * qdd(i);
    v_prev = vel[i];
    a_prev = acc[i];
    prev = frames[i];
  }

  VectorX tau(n);
  Vector6 f_next = Vector6::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const Matrix6 g = model.joints[i].link.spatial();
    Vector6 f = g * acc[i] - ad(vel[i]).transpose() * (g * vel[i]);
    if (i + 1 < n) f += to_child[i + 1].transpose() * f_next;
    tau(i) = axis[i].dot(f);
    f_next = f;
  }
  return tau;
}

MatrixX mass_matrix(const RobotModel& model, const VectorX& q) {
  const int n = model.dof();
  const VectorX zero = VectorX::Zero(n);
  MatrixX m(n, n);
  VectorX unit = VectorX::Zero(n);
  for (int i = 0; i < n; ++i) {
    unit(i) = 1.0;
    m.col(i) = inverse_dynamics(model, q, zero, unit, Vector3::Zero());
    unit(i) = 0.0;
  }
  return m;
}

VectorX coriolis_vector(const RobotModel& model, const VectorX& q, const VectorX& qd) {
  return inverse_dynamics(model, q, qd, VectorX::Zero(model.dof()), Vector3::Zero());
}

VectorX gravity_vector(const RobotModel& model, const VectorX& q, const Vector3& gravity) {
  const VectorX zero = VectorX::Zero(model.dof());
  return inverse_dynamics(model, q, zero, zero, gravity);
}

Matrix6 ObjectInertia::mass_matrix() const {
  Matrix6 m = Matrix6::Zero();
  m.topLeftCorner<3, 3>() = mass * Matrix3::Identity();
  m.bottomRightCorner<3, 3>() = inertia;
  return m;
}

void ObjectInertia::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("object: mass must be positive");
  check_inertia(inertia, "object");
}

Vector6 object_coriolis(const ObjectInertia& object, const Vector6& velocity) {
  const Vector3 v = velocity.head<3>();
  const Vector3 w = velocity.tail<3>();
  Vector6 out;
  out << w.cross(object.mass * v), w.cross(object.inertia * w);
  return out;
}

NetWrenchCoefficients object_net_wrench_coefficients(const ObjectInertia& object, const Vector6& velocity_direction,
                                                     const Vector6& acceleration_direction) {
  const Matrix6 m = object.mass_matrix();
  return {m * velocity_direction, m * acceleration_direction + object_coriolis(object, velocity_direction)};
}

MatrixX PathDynamicsSample::contact_jacobian_transpose(int robot, const Pose& contact) const {
  MatrixX out = MatrixX::Zero(dof(), 6);
  const Matrix6X& jac = jacobians.at(robot);
  out.block(joint_offset.at(robot), 0, jac.cols(), 6) = jac.transpose() * grasp_map(contact);
  return out;
}

PathDynamicsSample stack_dynamics_in_s(const std::vector<RobotModel>& robots, const std::vector<JointPath>& paths,
                                       double s, const Vector3& gravity, JacobianDerivative method) {
  if (robots.size() != paths.size() || robots.empty()) {
    throw std::invalid_argument("stack_dynamics_in_s: need one path per robot");
  }
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("stack_dynamics_in_s: s outside [0, 1]");
  int n = 0;
  for (std::size_t r = 0; r < robots.size(); ++r) {
    if (paths[r].dof() != robots[r].dof()) {
      throw std::invalid_argument("stack_dynamics_in_s: path " + std::to_string(r) + " does not match its robot");
    }
    n += robots[r].dof();
  }

  PathDynamicsSample out;
  out.s = s;
  out.q.resize(n);
  out.dq.resize(n);
  out.ddq.resize(n);
  out.inertial.resize(n);
  out.coriolis.resize(n);
  out.gravity.resize(n);
  int offset = 0;
  for (std::size_t r = 0; r < robots.size(); ++r) {
    const RobotModel& robot = robots[r];
    const int nr = robot.dof();
    const PathPoint p = paths[r].evaluate(s);
    const MatrixX m = mass_matrix(robot, p.q);
    out.joint_offset.push_back(offset);
    out.q.segment(offset, nr) = p.q;
    out.dq.segment(offset, nr) = p.dq;
    out.ddq.segment(offset, nr) = p.ddq;
    out.inertial.segment(offset, nr) = m * p.dq;
    out.coriolis.segment(offset, nr) = m * p.ddq + coriolis_vector(robot, p.q, p.dq);
    out.gravity.segment(offset, nr) = gravity_vector(robot, p.q, gravity);

    const Matrix6X jac = body_jacobian(robot, p.q);
    const Matrix6X djac = jacobian_derivative(robot, p.q, p.dq, method);
    out.jacobians.push_back(jac);
    out.reporting.push_back({jac * p.dq, djac * p.dq + jac * p.ddq});
    out.reporting_world.push_back(robot.base * reporting_pose(robot, p.q));
    offset += nr;
  }
  return out;
}

}  // namespace topp
