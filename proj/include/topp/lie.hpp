#pragma once

// SE(3) / se(3) arithmetic. Spatial vectors are stacked [linear; angular]
// everywhere: twists (v, w), wrenches (f, m).

#include <Eigen/Dense>

#include <cmath>

namespace topp {

template <typename Scalar>
using Vector3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3T = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector6T = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix6T = Eigen::Matrix<Scalar, 6, 6>;

using Vector3 = Vector3T<double>;
using Matrix3 = Matrix3T<double>;
using Vector6 = Vector6T<double>;
using Matrix6 = Matrix6T<double>;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using Matrix6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// S(a) with S(a) b = a x b.
template <typename Derived>
Matrix3T<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Matrix3T<Scalar> m;
  m << Scalar(0), -a(2), a(1),
       a(2), Scalar(0), -a(0),
       -a(1), a(0), Scalar(0);
  return m;
}

/// Joint twist xi = (v, w). Revolute: |w| = 1. Prismatic: w = 0, |v| = 1.
template <typename Scalar>
struct TwistT {
  Vector3T<Scalar> linear = Vector3T<Scalar>::Zero();
  Vector3T<Scalar> angular = Vector3T<Scalar>::Zero();

  TwistT() = default;
  TwistT(const Vector3T<Scalar>& v, const Vector3T<Scalar>& w) : linear(v), angular(w) {}
  explicit TwistT(const Vector6T<Scalar>& xi) : linear(xi.template head<3>()), angular(xi.template tail<3>()) {}

  Vector6T<Scalar> vector() const {
    Vector6T<Scalar> xi;
    xi << linear, angular;
    return xi;
  }

  /// Revolute twist about unit `axis` through `point`.
  static TwistT revolute(const Vector3T<Scalar>& axis, const Vector3T<Scalar>& point) {
    const Vector3T<Scalar> w = axis.normalized();
    return TwistT(-w.cross(point), w);
  }
  static TwistT prismatic(const Vector3T<Scalar>& direction) {
    return TwistT(direction.normalized(), Vector3T<Scalar>::Zero());
  }
};

template <typename Scalar>
struct PoseT {
  Matrix3T<Scalar> rotation = Matrix3T<Scalar>::Identity();
  Vector3T<Scalar> translation = Vector3T<Scalar>::Zero();

  PoseT() = default;
  PoseT(const Matrix3T<Scalar>& r, const Vector3T<Scalar>& p) : rotation(r), translation(p) {}

  static PoseT identity() { return PoseT(); }

  PoseT operator*(const PoseT& rhs) const {
    return PoseT(rotation * rhs.rotation, rotation * rhs.translation + translation);
  }

  PoseT inverse() const {
    const Matrix3T<Scalar> rt = rotation.transpose();
    return PoseT(rt, -rt * translation);
  }

  Vector3T<Scalar> apply(const Vector3T<Scalar>& x) const { return rotation * x + translation; }

  Eigen::Matrix<Scalar, 4, 4> matrix() const {
    Eigen::Matrix<Scalar, 4, 4> m = Eigen::Matrix<Scalar, 4, 4>::Identity();
    m.template topLeftCorner<3, 3>() = rotation;
    m.template topRightCorner<3, 1>() = translation;
    return m;
  }

  /// ||R^T R - I||_F, the orthogonality defect.
  Scalar orthogonality_error() const {
    return (rotation.transpose() * rotation - Matrix3T<Scalar>::Identity()).norm();
  }
};

using Twist = TwistT<double>;
using Pose = PoseT<double>;

/// Ad_T for [linear; angular] twists: [R  S(p)R; 0  R].
template <typename Scalar>
Matrix6T<Scalar> adjoint(const PoseT<Scalar>& t) {
  Matrix6T<Scalar> ad = Matrix6T<Scalar>::Zero();
  ad.template topLeftCorner<3, 3>() = t.rotation;
  ad.template topRightCorner<3, 3>() = skew(t.translation) * t.rotation;
  ad.template bottomRightCorner<3, 3>() = t.rotation;
  return ad;
}

/// ad_V, the Lie bracket [V, .] on [linear; angular] twists.
template <typename Derived>
Matrix6T<typename Derived::Scalar> ad(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Matrix6T<Scalar> m = Matrix6T<Scalar>::Zero();
  const Matrix3T<Scalar> w = skew(v.template tail<3>());
  m.template topLeftCorner<3, 3>() = w;
  m.template topRightCorner<3, 3>() = skew(v.template head<3>());
  m.template bottomRightCorner<3, 3>() = w;
  return m;
}

/// exp(xi^ * angle). Closed-form Rodrigues evaluation.
template <typename Scalar>
PoseT<Scalar> pose_exp(const TwistT<Scalar>& xi, Scalar angle) {
  using std::cos;
  using std::sin;
  const Vector3T<Scalar> w = xi.angular * angle;
  const Vector3T<Scalar> v = xi.linear * angle;
  const Scalar theta = w.norm();
  const Matrix3T<Scalar> W = skew(w);
  const Matrix3T<Scalar> W2 = W * W;
  Scalar a, b, c;  // sin(t)/t, (1-cos t)/t^2, (t - sin t)/t^3
  if (theta < Scalar(1e-6)) {
    const Scalar t2 = theta * theta;
    a = Scalar(1) - t2 / Scalar(6);
    b = Scalar(0.5) - t2 / Scalar(24);
    c = Scalar(1) / Scalar(6) - t2 / Scalar(120);
  } else {
    a = sin(theta) / theta;
    b = (Scalar(1) - cos(theta)) / (theta * theta);
    c = (theta - sin(theta)) / (theta * theta * theta);
  }
  const Matrix3T<Scalar> I = Matrix3T<Scalar>::Identity();
  return PoseT<Scalar>(I + a * W + b * W2, (I + b * W + c * W2) * v);
}

/// Wrench map [R 0; S(p)R R] carrying a wrench given in the frame `t` into
/// the frame `t` is expressed in. Equals Ad_{t^-1}^T.
template <typename Scalar>
Matrix6T<Scalar> wrench_transform(const PoseT<Scalar>& t) {
  Matrix6T<Scalar> g = Matrix6T<Scalar>::Zero();
  g.template topLeftCorner<3, 3>() = t.rotation;
  g.template bottomLeftCorner<3, 3>() = skew(t.translation) * t.rotation;
  g.template bottomRightCorner<3, 3>() = t.rotation;
  return g;
}

/// Rotation from a unit quaternion given as (w, x, y, z).
inline Matrix3 rotation_from_quaternion(double w, double x, double y, double z) {
  Eigen::Quaterniond q(w, x, y, z);
  return q.normalized().toRotationMatrix();
}

}  // namespace topp
