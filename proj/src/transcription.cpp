#include "topp/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace topp {

Grid build_grid(int K) {
  if (K < 1) throw std::invalid_argument("grid needs at least one interval");
  Grid g;
  g.K = K;
  g.ds = 1.0 / K;
  g.s.resize(K + 1);
  for (int k = 0; k <= K; ++k) g.s[k] = static_cast<double>(k) / K;
  g.s[K] = 1.0;
  g.mid.resize(K);
  for (int k = 0; k < K; ++k) g.mid[k] = 0.5 * (g.s[k] + g.s[k + 1]);
  return g;
}

double interval_b_interpolation(const Grid& grid, int k, double b_k, double b_k1, double s) {
  if (k < 0 || k >= grid.K) throw std::out_of_range("interval index out of range");
  const double lo = grid.s[k], hi = grid.s[k + 1];
  if (s < lo || s > hi) throw std::domain_error("s outside interval " + std::to_string(k));
  if (s == 0.5 * (lo + hi)) return 0.5 * (b_k + b_k1);
  return b_k + (b_k1 - b_k) * (s - lo) / (hi - lo);
}

std::vector<ContactIndex> enumerate_contacts(const Scenario& scenario) {
  std::vector<ContactIndex> out;
  int nm = 0, ne = 0;
  for (std::size_t o = 0; o < scenario.objects.size(); ++o) {
    const auto& contacts = scenario.objects[o].contacts;
    for (std::size_t i = 0; i < contacts.size(); ++i) {
      const bool manip = contacts[i].kind == ContactKind::Manipulator;
      out.push_back({&contacts[i], static_cast<int>(o), static_cast<int>(i), manip, manip ? nm++ : ne++});
    }
  }
  return out;
}

ScenarioSample sample_scenario(const Scenario& scenario, double s) {
  ScenarioSample out;
  out.dynamics = stack_dynamics_in_s(scenario.robots, scenario.paths, s, scenario.gravity, scenario.jacobian_method);
  const PathDynamicsSample& dyn = out.dynamics;
  const std::vector<Pose> world = object_world_poses(scenario, dyn);

  for (std::size_t o = 0; o < scenario.objects.size(); ++o) {
    const ObjectModel& obj = scenario.objects[o];
    const Matrix6 to_object = adjoint(obj.offset.inverse());
    ObjectSample os;
    os.world = world[o];
    if (obj.carrier_robot >= 0) {
      os.velocity = to_object * dyn.reporting[obj.carrier_robot].velocity;
      os.acceleration = to_object * dyn.reporting[obj.carrier_robot].acceleration;
    } else {
      os.velocity = to_object * out.objects[obj.carrier_object].velocity;
      os.acceleration = to_object * out.objects[obj.carrier_object].acceleration;
    }
    os.net = object_net_wrench_coefficients(obj.inertia, os.velocity, os.acceleration);
    os.external = obj.extra_wrench;
    os.external.head<3>() += obj.inertia.mass * (os.world.rotation.transpose() * scenario.gravity);
    out.objects.push_back(os);
  }

  for (const ContactIndex& ci : enumerate_contacts(scenario)) {
    const ContactSpec& c = *ci.spec;
    const Pose& obj_world = world[ci.object];
    ContactSample cs;
    cs.object = ci.object;
    cs.index = ci.index;
    cs.manipulator = ci.manipulator;
    cs.slot = ci.slot;
    Pose in_object = c.pose;
    if (c.world_oriented) in_object.rotation = obj_world.rotation.transpose() * c.pose.rotation;
    cs.object_map = grasp_map(in_object);
    cs.support_map = Matrix6::Zero();
    if (c.kind == ContactKind::Manipulator) {
      const Pose in_reporting = dyn.reporting_world[c.robot].inverse() * obj_world * in_object;
      cs.joint_map = dyn.contact_jacobian_transpose(c.robot, in_reporting);
    } else if (c.kind == ContactKind::Object) {
      cs.support_map = grasp_map(world[c.support].inverse() * obj_world * in_object);
    }
    out.contacts.push_back(std::move(cs));
  }
  return out;
}

namespace {

void add_term(std::vector<LinearTerm>& terms, int var, double coef) {
  if (coef != 0.0) terms.push_back({var, coef});
}

}  // namespace

ConicProgram assemble(const Scenario& scenario, const Grid& grid) {
  scenario.validate();
  const int K = grid.K;
  const int n = scenario.total_dof();
  const int u = scenario.other_contacts();
  const int v = scenario.manipulator_contacts();
  constexpr double inf = std::numeric_limits<double>::infinity();

  ConicProgram p;
  const int a0 = p.add_slice("a", K).offset;
  const int b0 = p.add_slice("b", K + 1).offset;
  const int c0 = p.add_slice("c", K + 1).offset;
  const int d0 = p.add_slice("d", K).offset;
  const int t0 = p.add_slice("tau", K * n).offset;
  const int e0 = p.add_slice("F_E", K * 6 * u).offset;
  const int m0 = p.add_slice("F_M", K * 6 * v).offset;

  const std::vector<JointLimits> limits = scenario.scaled_limits();
  const std::vector<ContactIndex> contacts = enumerate_contacts(scenario);
  // Per-contact cone data does not depend on s.
  std::vector<ConeDescriptor> cones;
  for (const auto& ci : contacts) cones.push_back(emit_cone(ci.spec->friction, ci.spec->model));

  auto wrench_var = [&](int k, const ContactSample& cs, int comp) {
    return cs.manipulator ? m0 + (k * v + cs.slot) * 6 + comp : e0 + (k * u + cs.slot) * 6 + comp;
  };

  for (int k = 0; k < K; ++k) {
    const ScenarioSample smp = sample_scenario(scenario, grid.mid[k]);
    const PathDynamicsSample& dyn = smp.dynamics;
    const int ak = a0 + k, bk = b0 + k, bk1 = b0 + k + 1;

    // tau - J^T G F_M = M q' a + (M q'' + C q') b + g
    for (int i = 0; i < n; ++i) {
      std::vector<LinearTerm> terms{{t0 + k * n + i, 1.0}};
      for (const auto& cs : smp.contacts) {
        if (!cs.manipulator) continue;
        for (int j = 0; j < 6; ++j) add_term(terms, wrench_var(k, cs, j), -cs.joint_map(i, j));
      }
      add_term(terms, ak, -dyn.inertial(i));
      add_term(terms, bk, -0.5 * dyn.coriolis(i));
      add_term(terms, bk1, -0.5 * dyn.coriolis(i));
      p.add_row({terms, dyn.gravity(i), dyn.gravity(i), {"dynamics", k}});
    }
    for (int i = 0; i < n; ++i) {
      const JointLimits& l = limits[i];
      if (std::isinf(l.torque_lower) && std::isinf(l.torque_upper)) continue;
      p.add_row({{{t0 + k * n + i, 1.0}}, l.torque_lower, l.torque_upper, {"torque", k}});
    }
    for (int i = 0; i < n; ++i) {
      const double w = dyn.dq(i) * dyn.dq(i);
      if (std::isinf(limits[i].velocity) || w == 0.0) continue;
      p.add_row({{{bk, 0.5 * w}, {bk1, 0.5 * w}}, -inf, limits[i].velocity * limits[i].velocity, {"velocity", k}});
    }
    for (int i = 0; i < n; ++i) {
      const JointLimits& l = limits[i];
      if (std::isinf(l.acceleration_lower) && std::isinf(l.acceleration_upper)) continue;
      std::vector<LinearTerm> terms;
      add_term(terms, ak, dyn.dq(i));
      add_term(terms, bk, 0.5 * dyn.ddq(i));
      add_term(terms, bk1, 0.5 * dyn.ddq(i));
      if (terms.empty()) continue;
      p.add_row({terms, l.acceleration_lower, l.acceleration_upper, {"acceleration", k}});
    }

    // Object balance: sum G F (+ reactions from objects resting on it) + f_ext = A a + B b.
    for (std::size_t o = 0; o < smp.objects.size(); ++o) {
      const ObjectSample& os = smp.objects[o];
      for (int r = 0; r < 6; ++r) {
        std::vector<LinearTerm> terms;
        for (const auto& cs : smp.contacts) {
          if (cs.object == static_cast<int>(o)) {
            for (int j = 0; j < 6; ++j) add_term(terms, wrench_var(k, cs, j), cs.object_map(r, j));
          } else if (scenario.objects[cs.object].contacts[cs.index].kind == ContactKind::Object &&
                     scenario.objects[cs.object].contacts[cs.index].support == static_cast<int>(o)) {
            for (int j = 0; j < 6; ++j) add_term(terms, wrench_var(k, cs, j), -cs.support_map(r, j));
          }
        }
        add_term(terms, ak, -os.net.accel(r));
        add_term(terms, bk, -0.5 * os.net.speed(r));
        add_term(terms, bk1, -0.5 * os.net.speed(r));
        p.add_row({terms, -os.external(r), -os.external(r), {"object_balance", k}});
      }
    }

    for (std::size_t ci = 0; ci < smp.contacts.size(); ++ci) {
      const ContactSample& cs = smp.contacts[ci];
      const ConeDescriptor& cone = cones[ci];
      SocBlock block;
      block.tag = {"contact_cone", k};
      block.entries.push_back({{{wrench_var(k, cs, cone.head), 1.0}}, 0.0});
      for (std::size_t t = 0; t < cone.tail.size(); ++t) {
        block.entries.push_back({{{wrench_var(k, cs, cone.tail[t]), cone.weights[t]}}, 0.0});
      }
      p.add_cone(std::move(block));
      for (int pin : cone.pinned) p.pin(wrench_var(k, cs, pin));
      for (const auto& row : normal_force_bound({contacts[ci].spec->max_normal_force})) {
        p.add_row({{{wrench_var(k, cs, 2), 1.0}}, -inf, row.limit, {"normal_force", k}});
      }
    }
  }

  // c^k <= sqrt(b^k):  ||(2 c, b - 1)|| <= b + 1. Fixed end points satisfy it
  // by construction; keeping their cone (or b >= 0) would put a constant slack
  // on the boundary whenever the end speed is zero.
  const bool end_fixed = scenario.sdot_end.has_value();
  auto fixed_point = [&](int k) { return k == 0 || (k == K && end_fixed); };
  for (int k = 0; k <= K; ++k) {
    if (fixed_point(k)) continue;
    p.add_cone({{{{{b0 + k, 1.0}}, 1.0}, {{{c0 + k, 2.0}}, 0.0}, {{{b0 + k, 1.0}}, -1.0}}, {"epigraph_c", k}});
  }
  // d^k >= 1 / (c^k + c^{k+1}):  ||(2, c + c' - d)|| <= c + c' + d
  for (int k = 0; k < K; ++k) {
    p.add_cone({{{{{c0 + k, 1.0}, {c0 + k + 1, 1.0}, {d0 + k, 1.0}}, 0.0},
                 {{}, 2.0},
                 {{{c0 + k, 1.0}, {c0 + k + 1, 1.0}, {d0 + k, -1.0}}, 0.0}},
                {"epigraph_d", k}});
  }
  for (int k = 0; k < K; ++k) {
    p.add_row({{{b0 + k + 1, 1.0}, {b0 + k, -1.0}, {a0 + k, -2.0 * grid.ds}}, 0.0, 0.0, {"coupling", k}});
  }
  for (int k = 0; k <= K; ++k) {
    if (!fixed_point(k)) p.add_row({{{b0 + k, 1.0}}, 0.0, inf, {"b_nonnegative", k}});
  }

  p.fix(b0, scenario.sdot_start * scenario.sdot_start);
  p.fix(c0, scenario.sdot_start);
  if (scenario.sdot_end) {
    p.fix(b0 + K, *scenario.sdot_end * *scenario.sdot_end);
    p.fix(c0 + K, *scenario.sdot_end);
  }
  for (int k = 0; k < K; ++k) p.set_objective(d0 + k, 2.0 * grid.ds);
  return p;
}

ScalingSolution extract_solution(const ConicProgram& program, const Grid& grid, const VectorX& x) {
  const auto parts = program.unpack(x);
  const int K = grid.K;
  ScalingSolution sol;
  sol.a = parts.at("a");
  sol.b = parts.at("b");
  sol.c = parts.at("c");
  sol.d = parts.at("d");
  auto reshape = [K](const VectorX& flat) {
    const int cols = K > 0 ? static_cast<int>(flat.size()) / K : 0;
    MatrixX m(K, cols);
    for (int k = 0; k < K; ++k) m.row(k) = flat.segment(k * cols, cols).transpose();
    return m;
  };
  sol.tau = reshape(parts.at("tau"));
  sol.F_E = reshape(parts.at("F_E"));
  sol.F_M = reshape(parts.at("F_M"));
  return sol;
}

TimeMap recover_time(const VectorX& b, const Grid& grid) {
  if (b.size() != grid.K + 1) throw std::invalid_argument("recover_time: b has the wrong length");
  TimeMap out;
  out.t.assign(grid.K + 1, 0.0);
  for (int k = 0; k < grid.K; ++k) {
    if (b(k) < 0.0 || b(k + 1) < 0.0) throw std::domain_error("recover_time: negative b at interval " + std::to_string(k));
    const double sum = std::sqrt(b(k)) + std::sqrt(b(k + 1));
    if (sum < 1e-9) throw std::domain_error("recover_time: path stalls on interval " + std::to_string(k));
    out.t[k + 1] = out.t[k] + 2.0 * (grid.s[k + 1] - grid.s[k]) / sum;
  }
  out.T = out.t.back();
  return out;
}

ScalingState scaling_at_time(const VectorX& b, const Grid& grid, const TimeMap& time, double t) {
  ScalingState st;
  t = std::clamp(t, 0.0, time.T);
  int k = 0;
  while (k + 1 < grid.K && time.t[k + 1] <= t) ++k;
  const double sd0 = std::sqrt(std::max(0.0, b(k)));
  const double acc = (b(k + 1) - b(k)) / (2.0 * (grid.s[k + 1] - grid.s[k]));
  const double tau = t - time.t[k];
  st.interval = k;
  st.sddot = acc;
  st.sdot = std::max(0.0, sd0 + acc * tau);
  st.s = std::clamp(grid.s[k] + sd0 * tau + 0.5 * acc * tau * tau, grid.s[k], grid.s[k + 1]);
  return st;
}

}  // namespace topp
