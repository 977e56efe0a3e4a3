#pragma once

#include "topp/scenario.hpp"
#include "topp/solver.hpp"
#include "topp/transcription.hpp"

#include <string>
#include <vector>

namespace topp {

struct RunSettings {
  SolverSettings solver;
  int grid = 0;      // overrides the scenario's K when positive
  int samples = 0;   // resampled time points; 0 picks 2K + 1
};

enum class RunStatus { Optimal, Infeasible, NumericalFailure };

std::string to_string(RunStatus status);

struct ContactLabel {
  std::string object;
  std::string name;
  ContactModel model;
  bool manipulator;
  int slot;
};

struct TrajectoryOutput {
  std::string scenario;
  RunStatus status = RunStatus::NumericalFailure;
  SolveStatus solver_status = SolveStatus::NumericalFailure;
  std::string message;

  Grid grid;
  int free_scalars = 0;
  int iterations = 0;
  double solve_seconds = 0.0;
  double objective = 0.0;
  Residuals residuals;

  ScalingSolution solution;  // empty unless Optimal
  TimeMap time;
  std::vector<ContactLabel> contacts;
  MatrixX midpoint_margins;  // K x contacts

  // Uniform-time resampling.
  std::vector<double> t, s, sdot;
  MatrixX q, qd, qdd, tau;  // samples x n
  MatrixX wrench;           // samples x 6 per contact
  MatrixX margin;           // samples x contacts
};

/// grid -> sample -> assemble -> solve -> recover time -> resample.
TrajectoryOutput run(const Scenario& scenario, const RunSettings& settings = {});

/// 0 Optimal, 2 Infeasible, 3 NumericalFailure.
int exit_code(RunStatus status);

/// Cone margin after dropping pinned components, which the solver only
/// holds to zero within its feasibility tolerance.
double reported_margin(const ContactSpec& contact, const Vector6& wrench);

std::string trajectory_csv(const TrajectoryOutput& out);
std::string trajectory_json(const TrajectoryOutput& out);

/// Grid and midpoint solution stored in a trajectory JSON document.
struct StoredSolution {
  std::string status;
  Grid grid;
  ScalingSolution solution;
  double T = 0.0;
};
StoredSolution parse_trajectory_json(const std::string& text);

}  // namespace topp
