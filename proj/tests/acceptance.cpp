// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "analytic_instances.hpp"
#include "support.hpp"
#include "topp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace topp;

namespace {

const std::vector<std::string> kShipped = {"double_integrator", "planar2_free", "arm7_free",
                                           "pickup", "pivoting", "waiter"};

// Worst audit violation over every Optimal solve made during the run.
double g_worst_audit = 0.0;
int g_audited = 0;

TrajectoryOutput solve(const Scenario& sc, int K) {
  TrajectoryOutput out = testing::solve_at(sc, K);
  if (out.status == RunStatus::Optimal) {
    g_worst_audit = std::max(g_worst_audit, audit(sc, out.grid, out.solution).max_violation());
    ++g_audited;
  }
  return out;
}

Scenario shipped(const std::string& name, const std::vector<ParamOverride>& overrides = {}) {
  return load_scenario(testing::scenario_path(name + ".json"), overrides);
}

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s: %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  g_failures += !pass;
}

void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct SweepPoint {
  double value;
  TrajectoryOutput out;
};

std::vector<SweepPoint> sweep(const std::string& name, const std::vector<std::string>& paths,
                              const std::vector<double>& values, int K) {
  std::vector<SweepPoint> pts;
  for (double v : values) {
    std::vector<ParamOverride> o;
    for (const auto& p : paths) o.push_back({p, v});
    pts.push_back({v, solve(shipped(name, o), K)});
  }
  return pts;
}

// Optimal prefix followed by an infeasible tail, T nondecreasing on the prefix.
struct Trend {
  bool monotone = true;
  bool onset = false;
  int last_feasible = -1;
  std::string text;
};

Trend trend(const std::vector<SweepPoint>& pts) {
  Trend t;
  bool infeasible_seen = false;
  double previous = 0.0;
  std::ostringstream ss;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& o = pts[i].out;
    ss << pts[i].value << "->";
    if (o.status == RunStatus::Optimal) {
      ss << o.time.T;
      if (infeasible_seen) t.monotone = false;
      // Equal times may differ in the last digits the solver resolves.
      if (o.time.T < previous * (1 - 1e-7)) t.monotone = false;
      previous = o.time.T;
      t.last_feasible = static_cast<int>(i);
    } else {
      ss << to_string(o.status);
      if (o.status == RunStatus::Infeasible) infeasible_seen = t.onset = true;
      else t.monotone = false;
    }
    ss << (i + 1 < pts.size() ? " " : "");
  }
  t.text = ss.str();
  return t;
}

}  // namespace

int main() {
  // 1. Phase-plane oracle agreement and solve time.
  guarded(1, [] {
    bool pass = true;
    std::ostringstream ss;
    for (const char* name : {"double_integrator", "planar2_free", "arm7_free"}) {
      const Scenario sc = shipped(name);
      const double oracle = topp_phase_plane(sc, 4000).T;
      const auto out = solve(sc, 250);
      const bool ok = out.status == RunStatus::Optimal;
      const double rel = ok ? std::abs(out.time.T - oracle) / oracle : INFINITY;
      pass = pass && ok && rel <= 0.02 && out.solve_seconds <= 60.0;
      ss << name << " rel " << rel << " in " << out.solve_seconds << " s; ";
    }
    report(1, pass, ss.str());
  });

  // 2. Double integrator time.
  guarded(2, [] {
    const auto out = solve(testing::double_integrator(), 250);
    const bool pass = out.status == RunStatus::Optimal && std::abs(out.time.T - 2.0) <= 0.02;
    report(2, pass, fmt("T = %.9f", out.time.T));
  });

  // 3. Free scalar counts.
  guarded(3, [] {
    bool pass = true;
    std::ostringstream ss;
    for (auto [K, u, v, n] : {std::array{10, 0, 1, 3}, std::array{250, 2, 1, 7}, std::array{50, 3, 2, 14}}) {
      const Scenario sc = testing::tuple_scenario(K, u, v, n);
      const int got = assemble(sc, build_grid(K)).free_scalar_count();
      const int want = K * (4 + 3 * u + 4 * v + n) - 2;
      pass = pass && got == want && sc.other_contacts() == u && sc.manipulator_contacts() == v && sc.total_dof() == n;
      ss << "(" << K << "," << u << "," << v << "," << n << ") " << got << "/" << want << "; ";
    }
    report(3, pass, ss.str());
  });

  // 5. Pickup mass sweep.
  guarded(5, [] {
    const auto pts = sweep("pickup", {"objects.0.mass"}, {0.25, 0.5, 0.75, 1.0, 1.25, 1.5}, 250);
    const Trend t = trend(pts);
    report(5, t.monotone && t.onset && t.last_feasible >= 1, t.text);
  });

  // 6. Pivoting: edge friction does not change T while velocity limits bind.
  guarded(6, [] {
    const auto pts = sweep("pivoting", {"objects.0.contacts.2.friction.mu", "objects.0.contacts.3.friction.mu"},
                           {0.2, 0.3, 0.4, 0.5}, 250);
    const Scenario sc = shipped("pivoting");
    const auto limits = sc.scaled_limits();
    double lo = INFINITY, hi = 0.0, active = INFINITY;
    bool all_optimal = true;
    for (const auto& p : pts) {
      if (p.out.status != RunStatus::Optimal) {
        all_optimal = false;
        continue;
      }
      lo = std::min(lo, p.out.time.T);
      hi = std::max(hi, p.out.time.T);
      // Largest |qd_j| / limit_j at the interval midpoints, where the
      // velocity rows are imposed.
      double ratio = 0.0;
      for (int k = 0; k < p.out.grid.K; ++k) {
        const VectorX dq = sc.paths[0].evaluate(p.out.grid.mid[k]).dq;
        const double bm = 0.5 * (p.out.solution.b(k) + p.out.solution.b(k + 1));
        for (int j = 0; j < dq.size(); ++j) {
          ratio = std::max(ratio, std::abs(dq(j)) * std::sqrt(std::max(0.0, bm)) / limits[j].velocity);
        }
      }
      active = std::min(active, ratio);
    }
    const double spread = (hi - lo) / lo;
    report(6, all_optimal && spread <= 1e-6 && std::abs(active - 1) <= 1e-6,
           fmt("T in [%.9f, %.9f], relative spread %.2e", lo, hi, spread) + fmt(", min peak |qd|/limit %.9f", active));
  });

  // 7. Waiter tilt sweep.
  guarded(7, [] {
    const auto pts = sweep("waiter", {"robots.0.planar_poses.poses.1.2"}, {0.0, 0.1, 0.2, 0.3, 0.35, 0.4}, 250);
    const Trend t = trend(pts);
    double tightest = INFINITY;
    if (t.last_feasible >= 0) {
      const auto& out = pts[t.last_feasible].out;
      for (std::size_t c = 0; c < out.contacts.size(); ++c) {
        if (out.contacts[c].object != "cube") continue;
        const int slot = out.contacts[c].slot;
        const double scale = out.solution.F_E.col(6 * slot + 2).maxCoeff();
        tightest = std::min(tightest, out.midpoint_margins.col(c).minCoeff() / scale);
      }
    }
    report(7, t.monotone && t.onset && tightest <= 1e-3,
           t.text + fmt("; tightest cube margin / max normal force %.3e", tightest));
  });

  // 8. Analytic conic instances and certificates.
  guarded(8, [] {
    int solved = 0;
    const auto instances = testing::analytic_instances();
    for (const auto& inst : instances) {
      const SolveReport r = topp::solve(inst.form);
      const Residuals k = verify_kkt(inst.form, r);
      solved += r.status == SolveStatus::Optimal && k.relative_gap <= 1e-8 && k.primal <= 1e-8 && k.dual <= 1e-8 &&
                std::abs(r.primal_objective - inst.optimum) <= 1e-7 * (1 + std::abs(inst.optimum));
    }
    int certs = 0;
    for (const auto& f : {testing::primal_infeasible_lp(), testing::primal_infeasible_socp()}) {
      const SolveReport r = topp::solve(f);
      certs += r.status == SolveStatus::PrimalInfeasible && primal_certificate_violation(f, r.y, r.z) <= 1e-8;
    }
    for (const auto& f : {testing::dual_infeasible_lp(), testing::dual_infeasible_socp()}) {
      const SolveReport r = topp::solve(f);
      certs += r.status == SolveStatus::DualInfeasible && dual_certificate_violation(f, r.x, r.s) <= 1e-8;
    }
    report(8, solved == static_cast<int>(instances.size()) && solved >= 20 && certs == 4,
           std::to_string(solved) + "/" + std::to_string(instances.size()) + " instances at 1e-8, " +
               std::to_string(certs) + "/4 certificates verified");
  });

  // 9. Finite-difference suite and RNEA substitution.
  guarded(9, [] {
    double fd = 0.0, rnea = 0.0;
    bool pass = true;
    std::mt19937 rng(kFdSeed);
    std::uniform_real_distribution<double> u(0.0, 1.0), v(-2.0, 2.0);
    for (const auto& name : kShipped) {
      const Scenario sc = shipped(name);
      const FdLedger ledger = fd_suite(sc);
      for (const auto& c : ledger.checks) fd = std::max(fd, c.max_error);
      pass = pass && ledger.pass();
      for (int i = 0; i < 50; ++i) {
        const auto sample = stack_dynamics_in_s(sc.robots, sc.paths, u(rng), sc.gravity, sc.jacobian_method);
        rnea = std::max(rnea, rnea_substitution_error(sc, sample, std::abs(v(rng)), v(rng)));
      }
    }
    report(9, pass && fd <= 1e-5 && rnea <= 1e-9, fmt("max fd error %.2e, max RNEA substitution %.2e", fd, rnea));
  });

  // 10. Grid convergence.
  guarded(10, [] {
    bool pass = true;
    std::ostringstream ss;
    for (const auto& name : kShipped) {
      const Scenario sc = shipped(name);
      const auto a = solve(sc, 250), b = solve(sc, 500);
      if (a.status != RunStatus::Optimal) {
        ss << name << " infeasible at 250; ";
        continue;
      }
      const double rel = b.status == RunStatus::Optimal ? std::abs(b.time.T - a.time.T) / a.time.T : INFINITY;
      pass = pass && rel <= 0.02;
      ss << name << " " << rel << "; ";
    }
    report(10, pass, ss.str());
  });

  // 4. Audit of every Optimal solve above.
  report(4, g_audited > 0 && g_worst_audit <= 1e-6,
         std::to_string(g_audited) + " optimal solves, worst relative violation " + fmt("%.2e", g_worst_audit));

  return g_failures == 0 ? 0 : 1;
}
