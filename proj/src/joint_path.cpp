#include "topp/joint_path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace topp {

JointPath::JointPath(const std::vector<VectorX>& waypoints, PathBoundary boundary) : boundary_(boundary) {
  if (waypoints.size() < 2) throw std::invalid_argument("JointPath: need at least two waypoints");
  const auto dof = waypoints.front().size();
  if (dof == 0) throw std::invalid_argument("JointPath: empty joint vector");
  const int m = static_cast<int>(waypoints.size()) - 1;
  values_.resize(m + 1, dof);
  for (int i = 0; i <= m; ++i) {
    if (waypoints[i].size() != dof) {
      throw std::invalid_argument("JointPath: waypoint " + std::to_string(i) + " has wrong dimension");
    }
    if (!waypoints[i].allFinite()) throw std::invalid_argument("JointPath: non-finite waypoint");
    values_.row(i) = waypoints[i].transpose();
  }
  breaks_.resize(m + 1);
  for (int i = 0; i <= m; ++i) breaks_[i] = static_cast<double>(i) / m;
  breaks_.back() = 1.0;

  const double h = 1.0 / m;
  MatrixX sys = MatrixX::Zero(m + 1, m + 1);
  MatrixX rhs = MatrixX::Zero(m + 1, dof);
  for (int i = 1; i < m; ++i) {
    sys(i, i - 1) = 1.0;
    sys(i, i) = 4.0;
    sys(i, i + 1) = 1.0;
    rhs.row(i) = 6.0 * (values_.row(i + 1) - 2.0 * values_.row(i) + values_.row(i - 1)) / (h * h);
  }
  if (boundary == PathBoundary::Natural) {
    sys(0, 0) = 1.0;
    sys(m, m) = 1.0;
  } else {
    sys(0, 0) = 2.0;
    sys(0, 1) = 1.0;
    rhs.row(0) = 6.0 * (values_.row(1) - values_.row(0)) / (h * h);
    sys(m, m - 1) = 1.0;
    sys(m, m) = 2.0;
    rhs.row(m) = -6.0 * (values_.row(m) - values_.row(m - 1)) / (h * h);
  }
  second_ = sys.partialPivLu().solve(rhs);
}

JointPath JointPath::constant(const VectorX& q) { return JointPath({q, q}); }

JointPath JointPath::line(const VectorX& from, const VectorX& to) { return JointPath({from, to}); }

PathPoint JointPath::evaluate(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("JointPath: s = " + std::to_string(s) + " outside [0, 1]");
  const int m = segments();
  const double h = 1.0 / m;
  const int k = std::min(static_cast<int>(std::floor(s * m)), m - 1);
  const double t = s - breaks_[k];
  const double u = breaks_[k + 1] - s;

  const auto y0 = values_.row(k).transpose();
  const auto y1 = values_.row(k + 1).transpose();
  const auto m0 = second_.row(k).transpose();
  const auto m1 = second_.row(k + 1).transpose();
  const VectorX c0 = y0 / h - m0 * h / 6.0;
  const VectorX c1 = y1 / h - m1 * h / 6.0;

  PathPoint p;
  p.q = m0 * (u * u * u / (6.0 * h)) + m1 * (t * t * t / (6.0 * h)) + c0 * u + c1 * t;
  p.dq = -m0 * (u * u / (2.0 * h)) + m1 * (t * t / (2.0 * h)) - c0 + c1;
  p.ddq = m0 * (u / h) + m1 * (t / h);
  return p;
}

}  // namespace topp
