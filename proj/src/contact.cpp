#include "topp/contact.hpp"

#include <cmath>
#include <stdexcept>

namespace topp {

ContactModel parse_contact_model(const std::string& tag) {
  if (tag == "pcwf") return ContactModel::PointWithFriction;
  if (tag == "sfce") return ContactModel::SoftFingerElliptic;
  throw std::invalid_argument("unknown contact model '" + tag + "' (expected pcwf or sfce)");
}

std::string to_string(ContactModel model) {
  return model == ContactModel::PointWithFriction ? "pcwf" : "sfce";
}

void FrictionParams::validate(ContactModel model) const {
  const bool ok = mu > 0.0 && ex > 0.0 && ey > 0.0 && (model == ContactModel::PointWithFriction || ez > 0.0);
  if (!ok || !std::isfinite(mu)) throw std::invalid_argument("friction parameters must be strictly positive");
}

std::vector<int> free_components(ContactModel model) {
  if (model == ContactModel::PointWithFriction) return {0, 1, 2};
  return {0, 1, 2, 5};
}

ConeDescriptor emit_cone(const FrictionParams& params, ContactModel model) {
  params.validate(model);
  ConeDescriptor d{model, 2, {0, 1}, {1.0 / (params.mu * params.ex), 1.0 / (params.mu * params.ey)}, {}};
  if (model == ContactModel::PointWithFriction) {
    d.pinned = {3, 4, 5};
  } else {
    d.tail.push_back(5);
    d.weights.push_back(1.0 / (params.mu * params.ez));
    d.pinned = {3, 4};
  }
  return d;
}

bool ConeDescriptor::contains(const Vector6& wrench, double tol) const {
  for (int i : pinned) {
    if (std::abs(wrench(i)) > tol) return false;
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < tail.size(); ++k) {
    const double x = weights[k] * wrench(tail[k]);
    sq += x * x;
  }
  return wrench(head) - std::sqrt(sq) >= -tol;
}

double cone_margin(const FrictionParams& params, ContactModel model, const Vector6& wrench) {
  params.validate(model);
  const ConeDescriptor d = emit_cone(params, model);
  for (int i : d.pinned) {
    if (std::abs(wrench(i)) > kConeTolerance) throw std::domain_error("wrench outside model subspace");
  }
  const double fx = wrench(0) / params.ex;
  const double fy = wrench(1) / params.ey;
  double sq = fx * fx + fy * fy;
  if (model == ContactModel::SoftFingerElliptic) {
    const double tz = wrench(5) / params.ez;
    sq += tz * tz;
  }
  return wrench(2) - std::sqrt(sq) / params.mu;
}

std::vector<NormalForceRow> normal_force_bound(const std::vector<double>& limits) {
  std::vector<NormalForceRow> rows;
  for (std::size_t i = 0; i < limits.size(); ++i) {
    if (!(limits[i] > 0.0)) throw std::invalid_argument("normal force bound must be positive");
    if (std::isinf(limits[i])) continue;
    rows.push_back({static_cast<int>(i), limits[i]});
  }
  return rows;
}

}  // namespace topp
