#include "topp/oracle.hpp"

#include "topp/dynamics.hpp"
#include "topp/kinematics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace topp {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Phase plane

// Limits at one s, in the form lo <= alpha a + beta b + gamma <= hi.
struct PlaneRow {
  double alpha, beta, gamma, lo, hi;
};

struct PlaneSample {
  std::vector<PlaneRow> rows;
  double bmax = kInf;  // from velocity limits
};

PlaneSample plane_sample(const Scenario& sc, const std::vector<JointLimits>& limits, double s) {
  const PathDynamicsSample d = stack_dynamics_in_s(sc.robots, sc.paths, s, sc.gravity, sc.jacobian_method);
  PlaneSample out;
  for (int i = 0; i < d.dof(); ++i) {
    const JointLimits& l = limits[i];
    out.rows.push_back({d.inertial(i), d.coriolis(i), d.gravity(i), l.torque_lower, l.torque_upper});
    out.rows.push_back({d.dq(i), d.ddq(i), 0.0, l.acceleration_lower, l.acceleration_upper});
    const double w = d.dq(i) * d.dq(i);
    if (std::isfinite(l.velocity) && w > 0.0) out.bmax = std::min(out.bmax, l.velocity * l.velocity / w);
  }
  return out;
}

// Admissible a-interval at (s, b); empty when lo > hi.
std::pair<double, double> accel_range(const PlaneSample& p, double b) {
  double lo = -kInf, hi = kInf;
  if (b > p.bmax * (1.0 + 1e-12)) return {kInf, -kInf};
  for (const PlaneRow& r : p.rows) {
    const double rest = r.beta * b + r.gamma;
    if (std::abs(r.alpha) <= 1e-12 * (1.0 + std::abs(r.beta) + std::abs(r.gamma))) {
      const double tol = 1e-10 * (1.0 + std::abs(rest));
      if (rest < r.lo - tol || rest > r.hi + tol) return {kInf, -kInf};
      continue;
    }
    double a1 = (r.lo - rest) / r.alpha, a2 = (r.hi - rest) / r.alpha;
    if (r.alpha < 0.0) std::swap(a1, a2);
    lo = std::max(lo, a1);
    hi = std::min(hi, a2);
  }
  return {lo, hi};
}

bool admissible(const PlaneSample& p, double b) {
  const auto [lo, hi] = accel_range(p, b);
  return lo <= hi;
}

double max_velocity_curve(const PlaneSample& p) {
  double lo = 0.0, hi = std::isfinite(p.bmax) ? p.bmax : 1.0;
  if (admissible(p, hi)) {
    if (std::isfinite(p.bmax)) return hi;
    while (admissible(p, hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e12) return 1e12;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (admissible(p, mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

DynamicSingularity::DynamicSingularity(int interval_, double s_)
    : std::runtime_error("dynamic singularity: no admissible acceleration at rest on interval " + std::to_string(interval_)),
      interval(interval_),
      s(s_) {}

PhasePlaneProfile topp_phase_plane(const Scenario& sc, int resolution) {
  if (!sc.objects.empty()) throw std::invalid_argument("phase-plane oracle only handles scenarios without contacts");
  if (resolution < 1) throw std::invalid_argument("phase-plane resolution must be positive");
  const std::vector<JointLimits> limits = sc.scaled_limits();
  const int N = resolution;
  const double h = 1.0 / N;

  // Coefficients at grid points (even) and interval midpoints (odd).
  std::vector<PlaneSample> samples(2 * N + 1);
  std::vector<double> mvc(2 * N + 1);
  for (int j = 0; j <= 2 * N; ++j) {
    const double s = std::min(1.0, 0.5 * h * j);
    samples[j] = plane_sample(sc, limits, s);
    if (!admissible(samples[j], 0.0)) throw DynamicSingularity(std::min(j / 2, N - 1), s);
    mvc[j] = max_velocity_curve(samples[j]);
  }
  auto field = [&](int j, double b, bool decelerate) {
    b = std::clamp(b, 0.0, mvc[j]);
    const auto [lo, hi] = accel_range(samples[j], b);
    return 2.0 * (decelerate ? lo : hi);
  };
  // One RK4 step between grid points i and i + dir (dir = +1 or -1).
  auto rk4 = [&](int i, double b, int dir, bool decelerate) {
    const int j0 = 2 * i, jm = 2 * i + dir, j1 = 2 * i + 2 * dir;
    const double step = dir * h;
    const double k1 = field(j0, b, decelerate);
    const double k2 = field(jm, b + 0.5 * step * k1, decelerate);
    const double k3 = field(jm, b + 0.5 * step * k2, decelerate);
    const double k4 = field(j1, b + step * k3, decelerate);
    return b + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  PhasePlaneProfile out;
  out.s.resize(N + 1);
  out.mvc.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    out.s[i] = i * h;
    out.mvc[i] = mvc[2 * i];
  }
  out.s[N] = 1.0;

  out.backward.assign(N + 1, 0.0);
  const double b_end = sc.sdot_end ? *sc.sdot_end * *sc.sdot_end : mvc[2 * N];
  if (b_end > mvc[2 * N] * (1.0 + 1e-9)) throw std::domain_error("phase plane: final speed exceeds the velocity limit curve");
  out.backward[N] = std::min(b_end, mvc[2 * N]);
  for (int i = N - 1; i >= 0; --i) {
    const double b = rk4(i + 1, out.backward[i + 1], -1, true);
    if (b < -1e-12) throw std::domain_error("phase plane: final state unreachable near interval " + std::to_string(i));
    out.backward[i] = std::clamp(b, 0.0, out.mvc[i]);
  }

  out.profile.assign(N + 1, 0.0);
  const double b_start = sc.sdot_start * sc.sdot_start;
  if (b_start > out.backward[0] * (1.0 + 1e-9) + 1e-12) throw std::domain_error("phase plane: initial speed cannot be decelerated in time");
  out.profile[0] = std::min(b_start, out.backward[0]);
  for (int i = 0; i < N; ++i) {
    const double b = rk4(i, out.profile[i], +1, false);
    if (b < -1e-12) throw std::domain_error("phase plane: path stalls near interval " + std::to_string(i));
    out.profile[i + 1] = std::clamp(b, 0.0, out.backward[i + 1]);
  }

  out.T = 0.0;
  for (int i = 0; i < N; ++i) {
    const double sum = std::sqrt(out.profile[i]) + std::sqrt(out.profile[i + 1]);
    if (sum <= 0.0) throw std::domain_error("phase plane: zero speed on interval " + std::to_string(i));
    out.T += 2.0 * h / sum;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audit

namespace {

class FamilyAccumulator {
 public:
  FamilyAccumulator(std::string name, double tol) : tol_(tol) { v_.family = std::move(name); }

  void add(double violation, int interval) {
    ++v_.rows;
    if (!(violation <= v_.max_violation)) {
      v_.max_violation = std::isnan(violation) ? kInf : violation;
      v_.worst_interval = interval;
    }
    if (!(violation <= tol_) && (v_.flagged.empty() || v_.flagged.back() != interval)) v_.flagged.push_back(interval);
  }
  const FamilyViolation& result() const { return v_; }

 private:
  FamilyViolation v_;
  double tol_;
};

double box_violation(double x, double lo, double hi) {
  double v = 0.0;
  if (x > hi) v = (x - hi) / (1.0 + std::abs(hi));
  if (x < lo) v = (lo - x) / (1.0 + std::abs(lo));
  return v;
}

// Contact-frame wrench (f, m) re-expressed in the frame where the contact
// sits at `pose`: force R f, moment p x R f + R m.
Vector6 express(const Pose& pose, const Vector6& w) {
  Vector6 out;
  const Vector3 f = pose.rotation * w.head<3>();
  out.head<3>() = f;
  out.tail<3>() = pose.translation.cross(f) + pose.rotation * w.tail<3>();
  return out;
}

struct ObjectState {
  Pose world;
  int robot = -1;
  Pose in_reporting;  // object frame in the carrying robot's reporting frame
};

}  // namespace

double AuditReport::max_violation() const {
  double m = 0.0;
  for (const auto& f : families) m = std::max(m, f.max_violation);
  return m;
}

const FamilyViolation& AuditReport::family(const std::string& name) const {
  for (const auto& f : families) {
    if (f.family == name) return f;
  }
  throw std::out_of_range("no audit family '" + name + "'");
}

std::string AuditReport::to_json() const {
  json j;
  j["tolerance"] = tolerance;
  j["max_violation"] = max_violation();
  j["pass"] = pass();
  j["families"] = json::array();
  for (const auto& f : families) {
    j["families"].push_back({{"family", f.family},
                             {"max_violation", f.max_violation},
                             {"worst_interval", f.worst_interval},
                             {"rows", f.rows},
                             {"flagged", f.flagged}});
  }
  return j.dump(1);
}

AuditReport audit(const Scenario& sc, const Grid& grid, const ScalingSolution& sol, double tol) {
  const int K = grid.K;
  if (sol.a.size() != K || sol.b.size() != K + 1 || sol.c.size() != K + 1 || sol.d.size() != K) {
    throw std::invalid_argument("audit: solution does not match the grid");
  }
  const std::vector<JointLimits> limits = sc.scaled_limits();
  const int n = sc.total_dof();

  FamilyAccumulator dynamics("dynamics", tol), torque("torque", tol), velocity("velocity", tol),
      acceleration("acceleration", tol), balance("object_balance", tol), cone("contact_cone", tol),
      pinned("contact_pinned", tol), normal("normal_force", tol), epi_c("epigraph_c", tol), epi_d("epigraph_d", tol),
      coupling("coupling", tol), nonneg("b_nonnegative", tol), boundary("boundary", tol);

  // F_M / F_E column of each contact, in object-major order.
  std::vector<std::vector<int>> column(sc.objects.size());
  {
    int nm = 0, ne = 0;
    for (std::size_t o = 0; o < sc.objects.size(); ++o) {
      for (const auto& c : sc.objects[o].contacts) column[o].push_back(c.kind == ContactKind::Manipulator ? nm++ : ne++);
    }
  }
  auto wrench_of = [&](int k, int o, int i) -> Vector6 {
    const bool manip = sc.objects[o].contacts[i].kind == ContactKind::Manipulator;
    const MatrixX& F = manip ? sol.F_M : sol.F_E;
    return F.row(k).segment<6>(6 * column[o][i]).transpose();
  };

  for (int k = 0; k < K; ++k) {
    const double s = grid.mid[k];
    const double a = sol.a(k);
    const double bm = 0.5 * (sol.b(k) + sol.b(k + 1));
    const double sdot = std::sqrt(std::max(bm, 0.0));

    // Robot states.
    std::vector<PathPoint> pts;
    std::vector<Pose> reporting_world;
    std::vector<Matrix6X> jac;
    for (std::size_t r = 0; r < sc.robots.size(); ++r) {
      pts.push_back(sc.paths[r].evaluate(s));
      reporting_world.push_back(sc.robots[r].base * forward_kinematics(sc.robots[r], pts[r].q) * sc.robots[r].tool);
      jac.push_back(body_jacobian(sc.robots[r], pts[r].q));
    }
    // Object poses through the carrier chain.
    std::vector<ObjectState> obj(sc.objects.size());
    for (std::size_t o = 0; o < sc.objects.size(); ++o) {
      const ObjectModel& m = sc.objects[o];
      if (m.carrier_robot >= 0) {
        obj[o].robot = m.carrier_robot;
        obj[o].in_reporting = m.offset;
      } else {
        obj[o].robot = obj[m.carrier_object].robot;
        obj[o].in_reporting = obj[m.carrier_object].in_reporting * m.offset;
      }
      obj[o].world = reporting_world[obj[o].robot] * obj[o].in_reporting;
    }
    auto contact_in_object = [&](int o, const ContactSpec& c) {
      Pose p = c.pose;
      if (c.world_oriented) p.rotation = obj[o].world.rotation.transpose() * c.pose.rotation;
      return p;
    };

    // Joint torques: tau - J^T w = RNEA.
    VectorX contact_torque = VectorX::Zero(n);
    int offset = 0;
    std::vector<int> robot_offset;
    for (std::size_t r = 0; r < sc.robots.size(); ++r) {
      robot_offset.push_back(offset);
      offset += sc.robots[r].dof();
    }
    for (std::size_t o = 0; o < sc.objects.size(); ++o) {
      for (std::size_t i = 0; i < sc.objects[o].contacts.size(); ++i) {
        const ContactSpec& c = sc.objects[o].contacts[i];
        if (c.kind != ContactKind::Manipulator) continue;
        const Pose in_rep = reporting_world[c.robot].inverse() * obj[o].world * contact_in_object(o, c);
        const Vector6 w = express(in_rep, wrench_of(k, o, i));
        contact_torque.segment(robot_offset[c.robot], sc.robots[c.robot].dof()) += jac[c.robot].transpose() * w;
      }
    }
    for (std::size_t r = 0; r < sc.robots.size(); ++r) {
      const PathPoint& p = pts[r];
      const VectorX rnea = inverse_dynamics(sc.robots[r], p.q, p.dq * sdot, p.ddq * bm + p.dq * a, sc.gravity);
      for (int j = 0; j < sc.robots[r].dof(); ++j) {
        const int idx = robot_offset[r] + j;
        const double t = sol.tau(k, idx);
        const double scale = 1.0 + std::max({std::abs(t), std::abs(rnea(j)), std::abs(contact_torque(idx))});
        dynamics.add(std::abs(t - contact_torque(idx) - rnea(j)) / scale, k);
        torque.add(box_violation(t, limits[idx].torque_lower, limits[idx].torque_upper), k);
        if (std::isfinite(limits[idx].velocity)) {
          const double v2 = limits[idx].velocity * limits[idx].velocity;
          velocity.add(std::max(0.0, p.dq(j) * p.dq(j) * bm - v2) / (1.0 + v2), k);
        }
        acceleration.add(box_violation(p.dq(j) * a + p.ddq(j) * bm, limits[idx].acceleration_lower,
                                       limits[idx].acceleration_upper),
                         k);
      }
    }

    // Object Newton-Euler: sum of contact wrenches + f_ext = net wrench.
    for (std::size_t o = 0; o < sc.objects.size(); ++o) {
      const ObjectModel& m = sc.objects[o];
      const int r = obj[o].robot;
      const ObjectPathKinematics kin =
          object_path_kinematics(sc.robots[r], sc.paths[r], s, obj[o].in_reporting, sc.jacobian_method);
      const Vector3 v = kin.velocity.head<3>() * sdot, w = kin.velocity.tail<3>() * sdot;
      const Vector3 vd = kin.acceleration.head<3>() * bm + kin.velocity.head<3>() * a;
      const Vector3 wd = kin.acceleration.tail<3>() * bm + kin.velocity.tail<3>() * a;
      const Matrix3& I = m.inertia.inertia;
      Vector6 net;
      net.head<3>() = m.inertia.mass * (vd + w.cross(v));
      net.tail<3>() = I * wd + w.cross(I * w);

      Vector6 total = m.extra_wrench;
      total.head<3>() += m.inertia.mass * (obj[o].world.rotation.transpose() * sc.gravity);
      double scale = 1.0 + net.norm() + total.norm();
      for (std::size_t i = 0; i < m.contacts.size(); ++i) {
        const Vector6 cw = express(contact_in_object(static_cast<int>(o), m.contacts[i]), wrench_of(k, static_cast<int>(o), static_cast<int>(i)));
        total += cw;
        scale += cw.norm();
      }
      // Reactions of objects resting on this one.
      for (std::size_t o2 = 0; o2 < sc.objects.size(); ++o2) {
        for (std::size_t i = 0; i < sc.objects[o2].contacts.size(); ++i) {
          const ContactSpec& c = sc.objects[o2].contacts[i];
          if (c.kind != ContactKind::Object || c.support != static_cast<int>(o)) continue;
          const Pose in_support = obj[o].world.inverse() * obj[o2].world * contact_in_object(static_cast<int>(o2), c);
          const Vector6 cw = express(in_support, wrench_of(k, static_cast<int>(o2), static_cast<int>(i)));
          total -= cw;
          scale += cw.norm();
        }
      }
      balance.add((total - net).cwiseAbs().maxCoeff() / scale, k);

      for (std::size_t i = 0; i < m.contacts.size(); ++i) {
        const ContactSpec& c = m.contacts[i];
        Vector6 wr = wrench_of(k, static_cast<int>(o), static_cast<int>(i));
        const double wscale = 1.0 + wr.norm();
        const std::vector<int> free = free_components(c.model);
        double pin = 0.0;
        for (int comp = 0; comp < 6; ++comp) {
          if (std::find(free.begin(), free.end(), comp) != free.end()) continue;
          pin = std::max(pin, std::abs(wr(comp)));
          wr(comp) = 0.0;
        }
        pinned.add(pin / wscale, k);
        cone.add(std::max(0.0, -cone_margin(c.friction, c.model, wr)) / wscale, k);
        if (std::isfinite(c.max_normal_force)) {
          normal.add(std::max(0.0, wr(2) - c.max_normal_force) / (1.0 + c.max_normal_force), k);
        }
      }
    }

    coupling.add(std::abs(sol.b(k + 1) - sol.b(k) - 2.0 * (grid.s[k + 1] - grid.s[k]) * a) /
                     (1.0 + std::abs(sol.b(k)) + std::abs(sol.b(k + 1))),
                 k);
    const double csum = sol.c(k) + sol.c(k + 1);
    epi_d.add(std::max({0.0, 1.0 - sol.d(k) * csum, -csum, -sol.d(k)}), k);
  }

  for (int k = 0; k <= K; ++k) {
    const double b = sol.b(k), c = sol.c(k);
    nonneg.add(std::max(0.0, -b), k);
    // c <= sqrt(b) in its cone form 4c^2 <= 4b, b + 1 >= 0.
    epi_c.add(std::max(0.0, std::sqrt(4.0 * c * c + (b - 1.0) * (b - 1.0)) - (b + 1.0)) / (2.0 + std::abs(b)), k);
  }
  const double b0 = sc.sdot_start * sc.sdot_start;
  boundary.add(std::abs(sol.b(0) - b0) / (1.0 + b0), 0);
  boundary.add(std::abs(sol.c(0) - sc.sdot_start) / (1.0 + sc.sdot_start), 0);
  if (sc.sdot_end) {
    const double bK = *sc.sdot_end * *sc.sdot_end;
    boundary.add(std::abs(sol.b(K) - bK) / (1.0 + bK), K);
    boundary.add(std::abs(sol.c(K) - *sc.sdot_end) / (1.0 + *sc.sdot_end), K);
  }

  AuditReport report;
  report.tolerance = tol;
  for (const FamilyAccumulator* f : {&dynamics, &torque, &velocity, &acceleration, &balance, &cone, &pinned, &normal,
                                     &epi_c, &epi_d, &coupling, &nonneg, &boundary}) {
    report.families.push_back(f->result());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Finite-difference suite

double rnea_substitution_error(const Scenario& sc, const PathDynamicsSample& sample, double sdot, double sddot) {
  const VectorX lhs = sample.inertial * sddot + sample.coriolis * sdot * sdot + sample.gravity;
  double err = 0.0;
  for (std::size_t r = 0; r < sc.robots.size(); ++r) {
    const int off = sample.joint_offset[r], nr = sc.robots[r].dof();
    const VectorX q = sample.q.segment(off, nr), dq = sample.dq.segment(off, nr), ddq = sample.ddq.segment(off, nr);
    const VectorX tau = inverse_dynamics(sc.robots[r], q, dq * sdot, ddq * sdot * sdot + dq * sddot, sc.gravity);
    err = std::max(err, (lhs.segment(off, nr) - tau).cwiseAbs().maxCoeff());
  }
  return err;
}

bool FdLedger::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const FdCheck& c) { return c.pass(); });
}

std::string FdLedger::to_json() const {
  json j;
  j["seed"] = seed;
  j["pass"] = pass();
  j["checks"] = json::array();
  for (const auto& c : checks) {
    j["checks"].push_back(
        {{"name", c.name}, {"max_error", c.max_error}, {"tolerance", c.tolerance}, {"samples", c.samples}, {"pass", c.pass()}});
  }
  return j.dump(1);
}

namespace {

// Body velocity of a pose curve by central differences: [R'dp; vee(R'dR)].
Vector6 fd_body_velocity(const Pose& minus, const Pose& plus, const Pose& at, double h) {
  const Vector3 dp = (plus.translation - minus.translation) / (2.0 * h);
  const Matrix3 dR = (plus.rotation - minus.rotation) / (2.0 * h);
  const Matrix3 W = at.rotation.transpose() * dR;
  Vector6 v;
  v.head<3>() = at.rotation.transpose() * dp;
  v.tail<3>() << 0.5 * (W(2, 1) - W(1, 2)), 0.5 * (W(0, 2) - W(2, 0)), 0.5 * (W(1, 0) - W(0, 1));
  return v;
}

double rel_err(const MatrixX& value, const MatrixX& reference) {
  const double scale = 1.0 + (reference.size() ? reference.cwiseAbs().maxCoeff() : 0.0);
  return value.size() ? (value - reference).cwiseAbs().maxCoeff() / scale : 0.0;
}

}  // namespace

FdLedger fd_suite(const Scenario& sc, std::uint64_t seed, int samples) {
  FdLedger ledger;
  ledger.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0), angle(-M_PI, M_PI), speed(-2.0, 2.0);
  constexpr double h = 1e-6;
  constexpr double fd_tol = 1e-5;

  FdCheck path1{"path_first_derivative", 0.0, fd_tol, 0}, path2{"path_second_derivative", 0.0, fd_tol, 0},
      jacobian{"body_jacobian", 0.0, fd_tol, 0}, path_jac{"jacobian_path_derivative", 0.0, fd_tol, 0},
      methods{"jacobian_derivative_methods", 0.0, fd_tol, 0}, object_acc{"object_acceleration_direction", 0.0, fd_tol, 0},
      rnea{"rnea_substitution", 0.0, 1e-9, 0};

  for (int it = 0; it < samples; ++it) {
    const double s = 0.02 + 0.96 * unit(rng);
    for (std::size_t r = 0; r < sc.robots.size(); ++r) {
      const RobotModel& robot = sc.robots[r];
      const JointPath& path = sc.paths[r];
      const PathPoint p = path.evaluate(s);
      path1.max_error = std::max(path1.max_error, rel_err((path.position(s + h) - path.position(s - h)) / (2.0 * h), p.dq));
      path2.max_error = std::max(path2.max_error, rel_err((path.evaluate(s + h).dq - path.evaluate(s - h).dq) / (2.0 * h), p.ddq));
      ++path1.samples;
      ++path2.samples;

      VectorX q(robot.dof()), qd(robot.dof());
      for (int j = 0; j < robot.dof(); ++j) {
        q(j) = angle(rng);
        qd(j) = speed(rng);
      }
      const Vector6 fd = fd_body_velocity(reporting_pose(robot, q - h * qd), reporting_pose(robot, q + h * qd),
                                          reporting_pose(robot, q), h);
      jacobian.max_error = std::max(jacobian.max_error, rel_err(fd, body_jacobian(robot, q) * qd));
      ++jacobian.samples;

      const Matrix6X dj = jacobian_path_derivative(robot, path, s, sc.jacobian_method);
      const Matrix6X dj_fd = (body_jacobian(robot, path.position(s + h)) - body_jacobian(robot, path.position(s - h))) / (2.0 * h);
      path_jac.max_error = std::max(path_jac.max_error, rel_err(dj, dj_fd));
      ++path_jac.samples;
      methods.max_error = std::max(methods.max_error, rel_err(jacobian_derivative(robot, q, qd, JacobianDerivative::Analytic),
                                                              jacobian_derivative(robot, q, qd, JacobianDerivative::CentralDifference)));
      ++methods.samples;

      // Reporting frame plus every object carried by this robot.
      std::vector<Pose> frames{Pose::identity()};
      for (std::size_t o = 0; o < sc.objects.size(); ++o) {
        Pose chain = sc.objects[o].offset;
        int carrier = static_cast<int>(o);
        while (sc.objects[carrier].carrier_robot < 0) {
          carrier = sc.objects[carrier].carrier_object;
          chain = sc.objects[carrier].offset * chain;
        }
        if (sc.objects[carrier].carrier_robot == static_cast<int>(r)) frames.push_back(chain);
      }
      for (const Pose& off : frames) {
        const ObjectPathKinematics kin = object_path_kinematics(robot, path, s, off, sc.jacobian_method);
        const Vector6 fd_acc = (object_path_kinematics(robot, path, s + h, off, sc.jacobian_method).velocity -
                                object_path_kinematics(robot, path, s - h, off, sc.jacobian_method).velocity) /
                               (2.0 * h);
        object_acc.max_error = std::max(object_acc.max_error, rel_err(kin.acceleration, fd_acc));
        ++object_acc.samples;
      }
    }

    const PathDynamicsSample sample = stack_dynamics_in_s(sc.robots, sc.paths, s, sc.gravity, sc.jacobian_method);
    const double sdot = 2.0 * unit(rng), sddot = speed(rng);
    rnea.max_error = std::max(rnea.max_error, rnea_substitution_error(sc, sample, sdot, sddot));
    ++rnea.samples;
  }
  ledger.checks = {path1, path2, jacobian, path_jac, methods, object_acc, rnea};
  return ledger;
}

}  // namespace topp
