#include "topp/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace topp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const json& require(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> fixed_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) throw InputError(where + ": expected " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = number(j[i], where);
  return v;
}

VectorX dynamic_vector(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
  VectorX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], where);
  return v;
}

Pose parse_pose(const json& j, const std::string& where) {
  Pose p;
  if (!j.is_object()) throw InputError(where + ": expected a pose object");
  if (j.contains("translation")) p.translation = fixed_vector<3>(j["translation"], where + ".translation");
  if (j.contains("quaternion")) {
    const Eigen::Vector4d q = fixed_vector<4>(j["quaternion"], where + ".quaternion");
    if (q.norm() < 1e-12) throw InputError(where + ".quaternion: zero quaternion");
    p.rotation = rotation_from_quaternion(q(0), q(1), q(2), q(3));
  }
  return p;
}

Matrix3 parse_inertia(const json& j, const std::string& where) {
  const Vector6 v = fixed_vector<6>(j, where);  // ixx iyy izz ixy ixz iyz
  Matrix3 m;
  m << v(0), v(3), v(4),
       v(3), v(1), v(5),
       v(4), v(5), v(2);
  return m;
}

// Accepts [lo, hi], a symmetric magnitude, or null for unbounded.
std::pair<double, double> parse_range(const json& j, const std::string& where) {
  if (j.is_null()) return {-kInf, kInf};
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!(v > 0.0)) throw InputError(where + ": symmetric limit must be positive");
    return {-v, v};
  }
  if (j.is_array() && j.size() == 2) {
    const double lo = j[0].is_null() ? -kInf : number(j[0], where);
    const double hi = j[1].is_null() ? kInf : number(j[1], where);
    return {lo, hi};
  }
  throw InputError(where + ": expected [lower, upper], a number, or null");
}

RobotModel robot_from_json(const json& j, const std::string& where) {
  RobotModel r;
  r.name = j.value("name", "robot");
  const json& joints = require(j, "joints", where);
  if (!joints.is_array() || joints.empty()) throw InputError(where + ".joints: expected a non-empty array");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const json& jj = joints[i];
    const std::string w = where + ".joints[" + std::to_string(i) + "]";
    Joint joint;
    const std::string type = require(jj, "type", w).get<std::string>();
    if (type == "revolute") {
      joint.type = JointType::Revolute;
    } else if (type == "prismatic") {
      joint.type = JointType::Prismatic;
    } else {
      throw InputError(w + ".type: expected revolute or prismatic");
    }
    if (jj.contains("twist")) {
      joint.twist = Twist(fixed_vector<6>(jj["twist"], w + ".twist"));
    } else if (jj.contains("axis")) {
      const Vector3 axis = fixed_vector<3>(jj["axis"], w + ".axis");
      if (joint.type == JointType::Revolute) {
        const Vector3 point = jj.contains("point") ? fixed_vector<3>(jj["point"], w + ".point") : Vector3::Zero();
        joint.twist = Twist::revolute(axis, point);
      } else {
        joint.twist = Twist::prismatic(axis);
      }
    } else {
      throw InputError(w + ": missing field 'twist'");
    }
    const json& link = require(jj, "link", w);
    if (link.contains("frame")) joint.link_frame = parse_pose(link["frame"], w + ".link.frame");
    joint.link.mass = number(require(link, "mass", w + ".link"), w + ".link.mass");
    if (link.contains("com")) joint.link.com = fixed_vector<3>(link["com"], w + ".link.com");
    joint.link.inertia = parse_inertia(require(link, "inertia", w + ".link"), w + ".link.inertia");
    if (jj.contains("limits")) {
      const json& l = jj["limits"];
      if (l.contains("torque")) std::tie(joint.limits.torque_lower, joint.limits.torque_upper) = parse_range(l["torque"], w + ".limits.torque");
      if (l.contains("velocity") && !l["velocity"].is_null()) joint.limits.velocity = number(l["velocity"], w + ".limits.velocity");
      if (l.contains("acceleration")) {
        std::tie(joint.limits.acceleration_lower, joint.limits.acceleration_upper) =
            parse_range(l["acceleration"], w + ".limits.acceleration");
      }
    }
    r.joints.push_back(joint);
  }
  if (j.contains("x_ref")) r.x_ref = parse_pose(j["x_ref"], where + ".x_ref");
  if (j.contains("tool")) r.tool = parse_pose(j["tool"], where + ".tool");
  if (j.contains("base")) r.base = parse_pose(j["base"], where + ".base");
  try {
    r.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ": " + e.what());
  }
  return r;
}

ContactSpec contact_from_json(const json& j, const std::string& where, const std::map<std::string, int>& object_index) {
  ContactSpec c;
  c.name = j.value("name", "contact");
  const std::string kind = require(j, "kind", where).get<std::string>();
  if (kind == "manipulator") {
    c.kind = ContactKind::Manipulator;
    c.robot = require(j, "robot", where).get<int>();
  } else if (kind == "environment") {
    c.kind = ContactKind::Environment;
  } else if (kind == "object") {
    c.kind = ContactKind::Object;
    const std::string support = require(j, "support", where).get<std::string>();
    const auto it = object_index.find(support);
    if (it == object_index.end()) throw InputError(where + ".support: unknown object '" + support + "'");
    c.support = it->second;
  } else {
    throw InputError(where + ".kind: expected manipulator, environment or object");
  }
  c.pose = parse_pose(require(j, "pose", where), where + ".pose");
  const std::string orientation = j.value("orientation", "object");
  if (orientation != "object" && orientation != "world") throw InputError(where + ".orientation: expected object or world");
  c.world_oriented = orientation == "world";
  try {
    c.model = parse_contact_model(require(j, "model", where).get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ".model: " + e.what());
  }
  const json& f = require(j, "friction", where);
  c.friction.mu = number(require(f, "mu", where + ".friction"), where + ".friction.mu");
  c.friction.ex = f.contains("ex") ? number(f["ex"], where + ".friction.ex") : 1.0;
  c.friction.ey = f.contains("ey") ? number(f["ey"], where + ".friction.ey") : 1.0;
  if (c.model == ContactModel::SoftFingerElliptic) c.friction.ez = number(require(f, "ez", where + ".friction"), where + ".friction.ez");
  if (j.contains("max_normal_force") && !j["max_normal_force"].is_null()) {
    c.max_normal_force = number(j["max_normal_force"], where + ".max_normal_force");
  }
  try {
    c.friction.validate(c.model);
    normal_force_bound({c.max_normal_force});
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ": " + e.what());
  }
  return c;
}

ObjectModel object_from_json(const json& j, const std::string& where, const std::map<std::string, int>& object_index) {
  ObjectModel o;
  o.name = require(j, "name", where).get<std::string>();
  o.inertia.mass = number(require(j, "mass", where), where + ".mass");
  o.inertia.inertia = parse_inertia(require(j, "inertia", where), where + ".inertia");
  try {
    o.inertia.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ": " + e.what());
  }
  const json& carrier = require(j, "carrier", where);
  if (carrier.contains("robot")) {
    o.carrier_robot = carrier["robot"].get<int>();
  } else if (carrier.contains("object")) {
    const std::string name = carrier["object"].get<std::string>();
    const auto it = object_index.find(name);
    if (it == object_index.end()) throw InputError(where + ".carrier: unknown object '" + name + "' (carriers must come first)");
    o.carrier_object = it->second;
  } else {
    throw InputError(where + ".carrier: expected 'robot' or 'object'");
  }
  if (j.contains("offset")) o.offset = parse_pose(j["offset"], where + ".offset");
  if (j.contains("extra_wrench")) o.extra_wrench = fixed_vector<6>(j["extra_wrench"], where + ".extra_wrench");
  const json& contacts = require(j, "contacts", where);
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    o.contacts.push_back(contact_from_json(contacts[i], where + ".contacts[" + std::to_string(i) + "]", object_index));
  }
  return o;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": parse error: " + e.what());
  }
}

// Nested robot models and objects may be given as file names.
json inline_reference(const json& j, const fs::path& base) {
  if (j.is_string()) return read_json_file(base / j.get<std::string>());
  return j;
}

void apply_override(json& doc, const ParamOverride& o) {
  json* node = &doc;
  std::stringstream ss(o.path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw InputError("empty override path");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& key = parts[i];
    const bool last = i + 1 == parts.size();
    if (node->is_array()) {
      const std::size_t idx = std::stoul(key);
      if (idx >= node->size()) throw InputError("override '" + o.path + "': index " + key + " out of range");
      node = &(*node)[idx];
    } else if (node->is_object()) {
      if (!node->contains(key) && !last) throw InputError("override '" + o.path + "': no field '" + key + "'");
      node = &(*node)[key];
    } else {
      throw InputError("override '" + o.path + "': cannot descend into '" + key + "'");
    }
  }
  *node = o.value;
}

}  // namespace

RobotModel parse_robot_model(const std::string& json_text) {
  try {
    return robot_from_json(json::parse(json_text), "robot");
  } catch (const json::exception& e) {
    throw InputError(std::string("robot: ") + e.what());
  }
}

ObjectModel parse_object_model(const std::string& json_text) {
  try {
    return object_from_json(json::parse(json_text), "object", {});
  } catch (const json::exception& e) {
    throw InputError(std::string("object: ") + e.what());
  }
}

VectorX planar_3r_ik(const Vector3& l, double x, double z, double pitch, bool elbow_up) {
  const double wx = x - l(2) * std::cos(pitch);
  const double wz = z - l(2) * std::sin(pitch);
  const double c2 = (wx * wx + wz * wz - l(0) * l(0) - l(1) * l(1)) / (2.0 * l(0) * l(1));
  if (c2 < -1.0 - 1e-12 || c2 > 1.0 + 1e-12) throw InputError("planar pose out of reach");
  const double q2 = (elbow_up ? -1.0 : 1.0) * std::acos(std::clamp(c2, -1.0, 1.0));
  const double q1 = std::atan2(wz, wx) - std::atan2(l(1) * std::sin(q2), l(0) + l(1) * std::cos(q2));
  VectorX q(3);
  q << q1, q2, pitch - q1 - q2;
  return q;
}

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir,
                        const std::vector<ParamOverride>& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("scenario: parse error: ") + e.what());
  }
  const fs::path base(base_dir);
  const std::string where = "scenario";
  try {
    const int version = require(doc, "schema_version", where).get<int>();
    if (version != kScenarioSchemaVersion) throw InputError("scenario: unsupported schema_version " + std::to_string(version));
    // Inline referenced files so overrides can reach into them.
    require(doc, "robots", where);
    for (auto& r : doc["robots"]) {
      r["model"] = inline_reference(require(r, "model", where + ".robots[]"), base);
    }
    if (!doc.contains("objects")) doc["objects"] = json::array();
    for (auto& o : doc["objects"]) o = inline_reference(o, base);
    for (const auto& o : overrides) apply_override(doc, o);

    Scenario sc;
    sc.name = doc.value("name", "scenario");
    if (doc.contains("gravity")) sc.gravity = fixed_vector<3>(doc["gravity"], where + ".gravity");
    if (doc.contains("grid")) sc.grid = doc["grid"].get<int>();
    if (doc.contains("boundary")) {
      const json& b = doc["boundary"];
      if (b.contains("sdot_start")) sc.sdot_start = number(b["sdot_start"], where + ".boundary.sdot_start");
      if (b.contains("sdot_end")) {
        if (b["sdot_end"].is_null()) {
          sc.sdot_end.reset();
        } else {
          sc.sdot_end = number(b["sdot_end"], where + ".boundary.sdot_end");
        }
      }
    }
    if (doc.contains("limit_scaling")) {
      const json& l = doc["limit_scaling"];
      sc.scaling.torque = l.value("torque", 1.0);
      sc.scaling.velocity = l.value("velocity", 1.0);
      sc.scaling.acceleration = l.value("acceleration", 1.0);
    }
    if (doc.contains("jacobian_derivative")) {
      const std::string m = doc["jacobian_derivative"].get<std::string>();
      if (m == "analytic") {
        sc.jacobian_method = JacobianDerivative::Analytic;
      } else if (m == "central_difference") {
        sc.jacobian_method = JacobianDerivative::CentralDifference;
      } else {
        throw InputError(where + ".jacobian_derivative: expected analytic or central_difference");
      }
    }

    const json& robots = doc["robots"];
    if (robots.empty()) throw InputError(where + ".robots: at least one robot is required");
    for (std::size_t i = 0; i < robots.size(); ++i) {
      const json& r = robots[i];
      const std::string w = where + ".robots[" + std::to_string(i) + "]";
      sc.robots.push_back(robot_from_json(r["model"], w + ".model"));
      std::vector<VectorX> waypoints;
      if (r.contains("waypoints")) {
        for (const auto& wp : r["waypoints"]) waypoints.push_back(dynamic_vector(wp, w + ".waypoints"));
      } else if (r.contains("waypoints_file")) {
        const json file = read_json_file(base / r["waypoints_file"].get<std::string>());
        for (const auto& wp : file) waypoints.push_back(dynamic_vector(wp, w + ".waypoints_file"));
      } else if (r.contains("planar_poses")) {
        const json& pp = r["planar_poses"];
        const Vector3 links = fixed_vector<3>(require(pp, "links", w + ".planar_poses"), w + ".planar_poses.links");
        const bool up = pp.value("elbow_up", true);
        for (const auto& pose : require(pp, "poses", w + ".planar_poses")) {
          const Vector3 v = fixed_vector<3>(pose, w + ".planar_poses.poses");
          waypoints.push_back(planar_3r_ik(links, v(0), v(1), v(2), up));
        }
      } else {
        throw InputError(w + ": missing field 'waypoints'");
      }
      for (const auto& wp : waypoints) {
        if (wp.size() != sc.robots.back().dof()) throw InputError(w + ": waypoint dimension does not match the robot");
      }
      const std::string boundary = r.value("path_boundary", "natural");
      PathBoundary pb;
      if (boundary == "natural") {
        pb = PathBoundary::Natural;
      } else if (boundary == "clamped_zero") {
        pb = PathBoundary::ClampedZero;
      } else {
        throw InputError(w + ".path_boundary: expected natural or clamped_zero");
      }
      try {
        sc.paths.emplace_back(waypoints, pb);
      } catch (const std::invalid_argument& e) {
        throw InputError(w + ": " + e.what());
      }
    }

    std::map<std::string, int> object_index;
    const json& objects = doc["objects"];
    for (std::size_t i = 0; i < objects.size(); ++i) {
      ObjectModel o = object_from_json(objects[i], where + ".objects[" + std::to_string(i) + "]", object_index);
      if (object_index.count(o.name)) throw InputError(where + ".objects: duplicate object name '" + o.name + "'");
      object_index[o.name] = static_cast<int>(i);
      sc.objects.push_back(std::move(o));
    }
    sc.validate();
    return sc;
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ": " + e.what());
  }
}

Scenario load_scenario(const std::string& path, const std::vector<ParamOverride>& overrides) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), fs::path(path).parent_path().string(), overrides);
}

int Scenario::total_dof() const {
  int n = 0;
  for (const auto& r : robots) n += r.dof();
  return n;
}

int Scenario::manipulator_contacts() const {
  int v = 0;
  for (const auto& o : objects) {
    for (const auto& c : o.contacts) v += c.kind == ContactKind::Manipulator;
  }
  return v;
}

int Scenario::other_contacts() const {
  int u = 0;
  for (const auto& o : objects) {
    for (const auto& c : o.contacts) u += c.kind != ContactKind::Manipulator;
  }
  return u;
}

std::vector<JointLimits> Scenario::scaled_limits() const {
  std::vector<JointLimits> out;
  for (const auto& r : robots) {
    for (const auto& j : r.joints) {
      JointLimits l = j.limits;
      l.torque_lower *= scaling.torque;
      l.torque_upper *= scaling.torque;
      l.velocity *= scaling.velocity;
      l.acceleration_lower *= scaling.acceleration;
      l.acceleration_upper *= scaling.acceleration;
      out.push_back(l);
    }
  }
  return out;
}

void Scenario::validate() const {
  if (robots.empty()) throw InputError("scenario: no robots");
  if (robots.size() != paths.size()) throw InputError("scenario: one path per robot is required");
  for (std::size_t r = 0; r < robots.size(); ++r) {
    if (paths[r].dof() != robots[r].dof()) throw InputError("scenario: path " + std::to_string(r) + " dimension mismatch");
  }
  if (grid < 1) throw InputError("scenario: grid must be at least 1");
  if (!(sdot_start >= 0.0) || (sdot_end && !(*sdot_end >= 0.0))) throw InputError("scenario: boundary speeds must be nonnegative");
  if (!(scaling.torque > 0.0 && scaling.velocity > 0.0 && scaling.acceleration > 0.0)) {
    throw InputError("scenario: limit scaling factors must be positive");
  }
  const int nr = static_cast<int>(robots.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ObjectModel& o = objects[i];
    const std::string w = "scenario: object '" + o.name + "'";
    if (o.carrier_robot >= 0) {
      if (o.carrier_robot >= nr) throw InputError(w + " is carried by a missing robot");
    } else if (o.carrier_object < 0 || o.carrier_object >= static_cast<int>(i)) {
      throw InputError(w + " must be carried by a robot or an earlier object");
    }
    for (const auto& c : o.contacts) {
      if (c.kind == ContactKind::Manipulator && (c.robot < 0 || c.robot >= nr)) {
        throw InputError(w + ": contact '" + c.name + "' references a missing robot");
      }
      if (c.kind == ContactKind::Object) {
        if (c.support < 0 || c.support >= static_cast<int>(objects.size()) || c.support == static_cast<int>(i)) {
          throw InputError(w + ": contact '" + c.name + "' references a missing support object");
        }
        if (o.carrier_object != c.support) {
          throw InputError(w + ": contact '" + c.name + "' must rest on the object that carries it");
        }
      }
      if (c.world_oriented && c.kind != ContactKind::Environment) {
        throw InputError(w + ": only environment contacts may use world orientation");
      }
      if (c.pose.orthogonality_error() > 1e-10) throw InputError(w + ": contact rotation is not orthogonal");
    }
  }
}

std::vector<Pose> object_world_poses(const Scenario& scenario, const PathDynamicsSample& sample) {
  std::vector<Pose> out;
  for (const auto& o : scenario.objects) {
    const Pose carrier = o.carrier_robot >= 0 ? sample.reporting_world.at(o.carrier_robot) : out.at(o.carrier_object);
    out.push_back(carrier * o.offset);
  }
  return out;
}

}  // namespace topp
