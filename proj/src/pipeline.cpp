#include "topp/pipeline.hpp"

#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>

namespace topp {

using nlohmann::json;

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Optimal: return "Optimal";
    case RunStatus::Infeasible: return "Infeasible";
    case RunStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

int exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::Optimal: return 0;
    case RunStatus::Infeasible: return 2;
    case RunStatus::NumericalFailure: return 3;
  }
  return 3;
}

double reported_margin(const ContactSpec& contact, const Vector6& wrench) {
  Vector6 w = wrench;
  for (int i : emit_cone(contact.friction, contact.model).pinned) w(i) = 0.0;
  return cone_margin(contact.friction, contact.model, w);
}

namespace {

Vector6 contact_wrench(const ScalingSolution& sol, const ContactLabel& c, int k) {
  const MatrixX& F = c.manipulator ? sol.F_M : sol.F_E;
  return F.row(k).segment<6>(6 * c.slot).transpose();
}

}  // namespace

TrajectoryOutput run(const Scenario& scenario, const RunSettings& settings) {
  TrajectoryOutput out;
  out.scenario = scenario.name;
  out.grid = build_grid(settings.grid > 0 ? settings.grid : scenario.grid);
  const Grid& grid = out.grid;

  std::vector<const ContactSpec*> specs;
  for (const auto& ci : enumerate_contacts(scenario)) {
    out.contacts.push_back({scenario.objects[ci.object].name, ci.spec->name, ci.spec->model, ci.manipulator, ci.slot});
    specs.push_back(ci.spec);
  }

  const ConicProgram program = assemble(scenario, grid);
  out.free_scalars = program.free_scalar_count();
  const CanonicalProgram canonical = canonicalize(program);
  const SolveReport report = solve(canonical.form, settings.solver);
  out.solver_status = report.status;
  out.iterations = report.iterations;
  out.solve_seconds = report.wall_time;
  out.residuals = report.residuals;

  switch (report.status) {
    case SolveStatus::Optimal:
      out.status = RunStatus::Optimal;
      break;
    case SolveStatus::PrimalInfeasible:
      out.status = RunStatus::Infeasible;
      out.message = "cannot execute the path within the actuator and contact limits";
      return out;
    case SolveStatus::DualInfeasible:
      out.status = RunStatus::NumericalFailure;
      out.message = "solver reported an unbounded problem";
      return out;
    case SolveStatus::MaxIterations:
      out.status = RunStatus::NumericalFailure;
      out.message = "solver hit the iteration limit";
      return out;
    case SolveStatus::NumericalFailure:
      out.status = RunStatus::NumericalFailure;
      out.message = "solver numerical failure";
      return out;
  }

  out.objective = report.primal_objective;
  out.solution = extract_solution(program, grid, report.x);
  const ScalingSolution& sol = out.solution;
  try {
    out.time = recover_time(sol.b.cwiseMax(0.0), grid);
  } catch (const std::domain_error& e) {
    out.status = RunStatus::NumericalFailure;
    out.message = e.what();
    return out;
  }

  const int nc = static_cast<int>(out.contacts.size());
  out.midpoint_margins.resize(grid.K, nc);
  for (int k = 0; k < grid.K; ++k) {
    for (int c = 0; c < nc; ++c) out.midpoint_margins(k, c) = reported_margin(*specs[c], contact_wrench(sol, out.contacts[c], k));
  }

  const int n = scenario.total_dof();
  const int samples = std::max(2, settings.samples > 0 ? settings.samples : 2 * grid.K + 1);
  out.q.resize(samples, n);
  out.qd.resize(samples, n);
  out.qdd.resize(samples, n);
  out.tau.resize(samples, n);
  out.wrench.resize(samples, 6 * nc);
  out.margin.resize(samples, nc);
  for (int i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? out.time.T : out.time.T * i / (samples - 1);
    const ScalingState st = scaling_at_time(sol.b.cwiseMax(0.0), grid, out.time, t);
    out.t.push_back(t);
    out.s.push_back(st.s);
    out.sdot.push_back(st.sdot);
    int offset = 0;
    for (std::size_t r = 0; r < scenario.paths.size(); ++r) {
      const PathPoint p = scenario.paths[r].evaluate(st.s);
      const int nr = static_cast<int>(p.q.size());
      out.q.row(i).segment(offset, nr) = p.q.transpose();
      out.qd.row(i).segment(offset, nr) = (p.dq * st.sdot).transpose();
      out.qdd.row(i).segment(offset, nr) = (p.ddq * st.sdot * st.sdot + p.dq * st.sddot).transpose();
      offset += nr;
    }
    out.tau.row(i) = sol.tau.row(st.interval);
    for (int c = 0; c < nc; ++c) {
      out.wrench.row(i).segment<6>(6 * c) = contact_wrench(sol, out.contacts[c], st.interval).transpose();
      out.margin(i, c) = out.midpoint_margins(st.interval, c);
    }
  }
  return out;
}

std::string trajectory_csv(const TrajectoryOutput& out) {
  std::ostringstream os;
  os << std::setprecision(12);
  const int n = static_cast<int>(out.q.cols());
  os << "t,s,sdot";
  for (const char* prefix : {"q_", "qd_", "qdd_", "tau_"}) {
    for (int j = 1; j <= n; ++j) os << ',' << prefix << j;
  }
  for (const auto& c : out.contacts) {
    for (const char* comp : {"fx", "fy", "fz", "tx", "ty", "tz", "margin"}) os << ',' << c.object << '.' << c.name << '.' << comp;
  }
  os << '\n';
  for (std::size_t i = 0; i < out.t.size(); ++i) {
    os << out.t[i] << ',' << out.s[i] << ',' << out.sdot[i];
    for (const MatrixX* m : {&out.q, &out.qd, &out.qdd, &out.tau}) {
      for (int j = 0; j < n; ++j) os << ',' << (*m)(i, j);
    }
    for (std::size_t c = 0; c < out.contacts.size(); ++c) {
      for (int j = 0; j < 6; ++j) os << ',' << out.wrench(i, 6 * c + j);
      os << ',' << out.margin(i, c);
    }
    os << '\n';
  }
  return os.str();
}

namespace {

json to_json(const VectorX& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const MatrixX& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    std::vector<double> row(m.cols());
    for (int j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

MatrixX matrix_from_json(const json& j, int cols) {
  MatrixX m(static_cast<int>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw InputError("trajectory: ragged matrix");
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

VectorX vector_from_json(const json& j) {
  VectorX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace

std::string trajectory_json(const TrajectoryOutput& out) {
  json j;
  j["format"] = "topp-trajectory";
  j["version"] = 1;
  j["scenario"] = out.scenario;
  j["status"] = to_string(out.status);
  j["solver_status"] = to_string(out.solver_status);
  j["message"] = out.message;
  j["K"] = out.grid.K;
  j["free_scalars"] = out.free_scalars;
  j["iterations"] = out.iterations;
  j["solve_seconds"] = out.solve_seconds;
  j["residuals"] = {{"primal", out.residuals.primal}, {"dual", out.residuals.dual}, {"gap", out.residuals.gap},
                    {"relative_gap", out.residuals.relative_gap}};
  j["contacts"] = json::array();
  for (const auto& c : out.contacts) {
    j["contacts"].push_back({{"object", c.object}, {"name", c.name}, {"model", to_string(c.model)},
                             {"kind", c.manipulator ? "manipulator" : "other"}, {"slot", c.slot}});
  }
  if (out.status == RunStatus::Optimal) {
    j["T"] = out.time.T;
    j["objective"] = out.objective;
    j["grid"] = {{"s", out.grid.s}, {"t", out.time.t}};
    j["scaling"] = {{"a", to_json(out.solution.a)}, {"b", to_json(out.solution.b)}, {"c", to_json(out.solution.c)},
                    {"d", to_json(out.solution.d)}};
    j["midpoint"] = {{"tau", to_json(out.solution.tau)}, {"F_E", to_json(out.solution.F_E)},
                     {"F_M", to_json(out.solution.F_M)}, {"margin", to_json(out.midpoint_margins)}};
  }
  return j.dump(1);
}

StoredSolution parse_trajectory_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("trajectory: parse error: ") + e.what());
  }
  if (j.value("format", "") != "topp-trajectory") throw InputError("trajectory: not a topp trajectory document");
  try {
    StoredSolution st;
    st.status = j.at("status").get<std::string>();
    st.grid = build_grid(j.at("K").get<int>());
    if (st.status != "Optimal") return st;
    st.T = j.at("T").get<double>();
    const json& sc = j.at("scaling");
    st.solution.a = vector_from_json(sc.at("a"));
    st.solution.b = vector_from_json(sc.at("b"));
    st.solution.c = vector_from_json(sc.at("c"));
    st.solution.d = vector_from_json(sc.at("d"));
    const json& mid = j.at("midpoint");
    auto cols = [](const json& m) { return m.empty() ? 0 : static_cast<int>(m[0].size()); };
    st.solution.tau = matrix_from_json(mid.at("tau"), cols(mid.at("tau")));
    st.solution.F_E = matrix_from_json(mid.at("F_E"), cols(mid.at("F_E")));
    st.solution.F_M = matrix_from_json(mid.at("F_M"), cols(mid.at("F_M")));
    const int K = st.grid.K;
    if (st.solution.a.size() != K || st.solution.b.size() != K + 1 || st.solution.tau.rows() != K) {
      throw InputError("trajectory: solution dimensions do not match K");
    }
    return st;
  } catch (const json::exception& e) {
    throw InputError(std::string("trajectory: ") + e.what());
  }
}

}  // namespace topp
