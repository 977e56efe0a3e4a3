#pragma once

#include "topp/pipeline.hpp"
#include "topp/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace testing {

inline std::string scenario_path(const std::string& name) { return std::string(TOPP_SCENARIO_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline topp::RobotModel shipped_robot(const std::string& name) {
  return topp::parse_robot_model(read_text(scenario_path("robots/" + name + ".json")));
}

/// Planar chain in the x-y plane (joint axes along z), links along x.
inline topp::RobotModel planar_chain(const std::vector<double>& lengths, const std::vector<double>& masses) {
  topp::RobotModel m;
  m.name = "chain";
  double x = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    topp::Joint j;
    j.twist = topp::Twist::revolute(topp::Vector3::UnitZ(), topp::Vector3(x, 0, 0));
    j.link_frame = topp::Pose(topp::Matrix3::Identity(), topp::Vector3(x, 0, 0));
    j.link.mass = masses[i];
    j.link.com = topp::Vector3(lengths[i] / 2, 0, 0);
    j.link.inertia = topp::Vector3(0.01, 0.02, 0.03).asDiagonal();
    m.joints.push_back(j);
    x += lengths[i];
  }
  m.x_ref = topp::Pose(topp::Matrix3::Identity(), topp::Vector3(x, 0, 0));
  return m;
}

/// Point mass m at distance l on a joint about -y; q = 0 is horizontal.
inline topp::RobotModel pendulum(double m, double l) {
  topp::RobotModel r;
  r.name = "pendulum";
  topp::Joint j;
  j.twist = topp::Twist::revolute(-topp::Vector3::UnitY(), topp::Vector3::Zero());
  j.link.mass = m;
  j.link.com = topp::Vector3(l, 0, 0);
  j.link.inertia = topp::Matrix3::Zero();
  r.joints.push_back(j);
  r.x_ref = topp::Pose(topp::Matrix3::Identity(), topp::Vector3(l, 0, 0));
  return r;
}

/// Unit-mass slider on x with |force| <= 1 and no gravity: q'' = force.
inline topp::Scenario double_integrator(double velocity_limit = topp::JointLimits::kInf) {
  topp::Scenario sc = topp::load_scenario(scenario_path("double_integrator.json"));
  sc.robots[0].joints[0].limits.velocity = velocity_limit;
  return sc;
}

inline topp::TrajectoryOutput solve_at(const topp::Scenario& sc, int K) {
  topp::RunSettings settings;
  settings.grid = K;
  return topp::run(sc, settings);
}

namespace detail {

inline nlohmann::json hand(const std::string& name, int robot, double y) {
  return {{"name", name},
          {"kind", "manipulator"},
          {"robot", robot},
          {"model", "sfce"},
          {"pose", {{"translation", {0, y, 0}}, {"quaternion", {0.707106781187, y > 0 ? 0.707106781187 : -0.707106781187, 0, 0}}}},
          {"friction", {{"mu", 0.6}, {"ez", 0.02}}}};
}

inline nlohmann::json ground(const std::string& name, double x) {
  return {{"name", name},
          {"kind", "environment"},
          {"model", "pcwf"},
          {"pose", {{"translation", {x, 0, -0.05}}, {"quaternion", {1, 0, 0, 0}}}},
          {"friction", {{"mu", 0.4}}}};
}

inline nlohmann::json robot_entry(const std::string& model, int dof, double spread) {
  nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
  for (int i = 0; i < dof; ++i) a.push_back(0.3), b.push_back(0.3 + spread);
  return {{"model", "robots/" + model + ".json"}, {"waypoints", {a, b}}};
}

}  // namespace detail

// u environment contacts and v manipulator contacts on one carried box.
inline topp::Scenario tuple_scenario(int K, int u, int v, int n) {
  nlohmann::json doc = {{"schema_version", 1}, {"name", "count"}, {"grid", K}};
  if (n == 3) {
    doc["robots"] = {detail::robot_entry("planar3", 3, 0.2)};
  } else if (n == 7) {
    doc["robots"] = {detail::robot_entry("arm7", 7, 0.2)};
  } else {
    doc["robots"] = {detail::robot_entry("arm7", 7, 0.2), detail::robot_entry("arm7", 7, -0.2)};
  }
  nlohmann::json contacts = nlohmann::json::array();
  for (int i = 0; i < v; ++i) contacts.push_back(detail::hand("hand" + std::to_string(i), n == 14 ? i % 2 : 0, i % 2 ? -0.05 : 0.05));
  for (int i = 0; i < u; ++i) contacts.push_back(detail::ground("ground" + std::to_string(i), 0.02 * i));
  doc["objects"] = {{{"name", "box"}, {"mass", 0.5}, {"inertia", {1e-3, 1e-3, 1e-3, 0, 0, 0}},
                     {"carrier", {{"robot", 0}}}, {"contacts", contacts}}};
  return topp::parse_scenario(doc.dump(), TOPP_SCENARIO_DIR);
}

}  // namespace testing
