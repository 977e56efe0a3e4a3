#pragma once

#include "topp/lie.hpp"

#include <vector>

namespace topp {

enum class PathBoundary {
  Natural,      // q'' = 0 at s = 0 and s = 1
  ClampedZero,  // q' = 0 at s = 0 and s = 1
};

struct PathPoint {
  VectorX q;
  VectorX dq;   // q'(s)
  VectorX ddq;  // q''(s)
};

/// C^2 cubic spline s -> q(s) on [0, 1] through waypoints placed at uniform
/// breakpoints.
class JointPath {
 public:
  JointPath(const std::vector<VectorX>& waypoints, PathBoundary boundary = PathBoundary::Natural);

  /// Constant path at `q`.
  static JointPath constant(const VectorX& q);
  /// Straight line from `from` to `to`.
  static JointPath line(const VectorX& from, const VectorX& to);

  int dof() const { return static_cast<int>(values_.cols()); }
  int segments() const { return static_cast<int>(values_.rows()) - 1; }
  PathBoundary boundary() const { return boundary_; }
  const std::vector<double>& breakpoints() const { return breaks_; }

  /// Throws std::domain_error outside [0, 1].
  PathPoint evaluate(double s) const;
  VectorX position(double s) const { return evaluate(s).q; }

 private:
  PathBoundary boundary_;
  std::vector<double> breaks_;
  MatrixX values_;  // (segments + 1) x dof
  MatrixX second_;  // spline second derivatives at breakpoints
};

}  // namespace topp
