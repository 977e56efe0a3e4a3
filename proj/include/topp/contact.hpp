#pragma once

#include "topp/lie.hpp"

#include <string>
#include <vector>

namespace topp {

/// Contact wrenches are 6-vectors (fx, fy, fz, tx, ty, tz) in a contact frame
/// whose z-axis is the inward surface normal.
enum class ContactModel {
  PointWithFriction,  // "pcwf": force in a friction cone, no moments
  SoftFingerElliptic, // "sfce": adds torsion about the normal, elliptic coupling
};

ContactModel parse_contact_model(const std::string& tag);
std::string to_string(ContactModel model);

struct FrictionParams {
  double mu = 0.5;
  double ex = 1.0;
  double ey = 1.0;
  double ez = 1.0;  // torsion scale, soft finger only

  void validate(ContactModel model) const;
};

inline constexpr double kConeTolerance = 1e-9;

/// Solver-ready form of a friction cone: || weights .* w[tail] || <= w[head],
/// with w[pinned] == 0.
struct ConeDescriptor {
  ContactModel model;
  int head = 2;
  std::vector<int> tail;
  std::vector<double> weights;
  std::vector<int> pinned;

  bool contains(const Vector6& wrench, double tol = kConeTolerance) const;
};

/// Indices of the components a contact model leaves free.
std::vector<int> free_components(ContactModel model);

/// f_z - (1/mu) sqrt(sum of weighted tangential squares). Nonnegative iff the
/// wrench lies in the cone. Throws std::domain_error when a pinned component
/// exceeds 1e-9 in magnitude.
double cone_margin(const FrictionParams& params, ContactModel model, const Vector6& wrench);

ConeDescriptor emit_cone(const FrictionParams& params, ContactModel model);

struct NormalForceRow {
  int contact;
  double limit;
};

/// One row f_z <= limit per contact with a finite bound. Throws on a
/// nonpositive bound.
std::vector<NormalForceRow> normal_force_bound(const std::vector<double>& limits);

}  // namespace topp
