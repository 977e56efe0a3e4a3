#pragma once

#include "topp/contact.hpp"
#include "topp/dynamics.hpp"
#include "topp/joint_path.hpp"
#include "topp/kinematics.hpp"
#include "topp/robot_model.hpp"

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace topp {

/// Schema or invariant violation in an input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ContactKind {
  Manipulator,  // a robot pushes on the object
  Environment,  // the fixed world pushes on the object
  Object,       // another object (the support) pushes on this one
};

/// One contact acting on an object. The wrench is the one applied to the
/// object, in the contact frame (z = inward normal).
struct ContactSpec {
  std::string name;
  ContactKind kind = ContactKind::Manipulator;
  int robot = -1;    // Manipulator: which robot
  int support = -1;  // Object: index of the supporting object
  /// Contact frame in the object frame. When `world_oriented` is set, the
  /// rotation is given in world coordinates and the normal stays fixed in the
  /// world while the object moves (edge pivoting on a table).
  Pose pose;
  bool world_oriented = false;
  ContactModel model = ContactModel::PointWithFriction;
  FrictionParams friction;
  double max_normal_force = std::numeric_limits<double>::infinity();
};

/// A rigid object whose frame (at its center of mass) is carried either by a
/// robot's reporting frame or by another object, with a constant offset.
struct ObjectModel {
  std::string name;
  ObjectInertia inertia;
  int carrier_robot = -1;
  int carrier_object = -1;
  Pose offset;
  std::vector<ContactSpec> contacts;
  Vector6 extra_wrench = Vector6::Zero();  // added to the weight, object frame
};

/// Multipliers applied to the rated limits of every joint.
struct LimitScaling {
  double torque = 1.0;
  double velocity = 1.0;
  double acceleration = 1.0;
};

struct Scenario {
  std::string name;
  std::vector<RobotModel> robots;
  std::vector<JointPath> paths;
  std::vector<ObjectModel> objects;
  Vector3 gravity = kDefaultGravity;
  int grid = 250;
  double sdot_start = 0.0;
  std::optional<double> sdot_end = 0.0;  // nullopt leaves the final speed free
  LimitScaling scaling;
  JacobianDerivative jacobian_method = JacobianDerivative::Analytic;

  int total_dof() const;
  /// Manipulator contacts (v) and all other contacts (u).
  int manipulator_contacts() const;
  int other_contacts() const;
  /// Limits after scaling, one entry per stacked joint.
  std::vector<JointLimits> scaled_limits() const;

  void validate() const;
};

static constexpr int kScenarioSchemaVersion = 1;

RobotModel parse_robot_model(const std::string& json_text);
ObjectModel parse_object_model(const std::string& json_text);

/// Numeric override applied to the scenario document before parsing, addressed
/// by a dotted path such as "objects.0.mass" or "robots.0.planar_poses.1.2".
struct ParamOverride {
  std::string path;
  double value;
};

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir = ".",
                        const std::vector<ParamOverride>& overrides = {});
/// Reads and validates a scenario file. Nested robot or object entries may be
/// file names relative to the scenario's directory.
Scenario load_scenario(const std::string& path, const std::vector<ParamOverride>& overrides = {});

/// Closed-form inverse kinematics of a planar 3R arm (links in the x-z plane,
/// joint axes along -y): joint angles reaching (x, z, pitch).
VectorX planar_3r_ik(const Vector3& link_lengths, double x, double z, double pitch, bool elbow_up = true);

/// World pose of each object at path coordinate s, given the reporting-frame
/// poses in `sample`.
std::vector<Pose> object_world_poses(const Scenario& scenario, const PathDynamicsSample& sample);

}  // namespace topp
