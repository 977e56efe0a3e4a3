#pragma once

#include "topp/conic_program.hpp"

#include <Eigen/Sparse>

#include <string>
#include <vector>

namespace topp {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// minimize c'x  s.t.  A x = b,  G x + s = h,  s in K.
/// K is the nonnegative orthant of dimension `orthant` followed by
/// second-order cones of the listed dimensions (head first).
struct StandardConicForm {
  VectorX c;
  SparseMatrix A;
  VectorX b;
  SparseMatrix G;
  VectorX h;
  int orthant = 0;
  std::vector<int> soc_dims;

  int num_variables() const { return static_cast<int>(c.size()); }
  int num_cone_rows() const { return static_cast<int>(h.size()); }
  /// Orthant dimension plus the number of second-order cones.
  int degree() const { return orthant + static_cast<int>(soc_dims.size()); }
  void validate() const;
};

/// Where each standard-form row came from.
struct RowOrigin {
  RowTag tag;
  int source = -1;  // index into the program's rows / cones, -1 for fixed or pinned
};

/// Standard form plus what is needed to map solutions back to named slices.
struct CanonicalProgram {
  StandardConicForm form;
  std::vector<VariableSlice> slices;
  std::vector<RowOrigin> equality_origin;
  std::vector<RowOrigin> cone_origin;

  std::map<std::string, VectorX> unpack(const VectorX& x) const;
};

/// Box rows split into two orthant rows; fixed and pinned variables become
/// equality rows. Variables keep their program indices.
CanonicalProgram canonicalize(const ConicProgram& program);

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalFailure };

std::string to_string(SolveStatus status);

struct SolverSettings {
  int max_iter = 200;
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  double tol_infeas = 1e-10;
  bool verbose = false;
  bool equilibrate = true;
};

struct Residuals {
  double primal = 0.0;  // max(||Ax - b||, ||Gx + s - h||) / (1 + max(||b||, ||h||))
  double dual = 0.0;    // ||A'y + G'z + c|| / (1 + ||c||)
  double gap = 0.0;     // s'z
  double relative_gap = 0.0;
};

/// Result of a solve. For PrimalInfeasible, (y, z) hold a certificate scaled
/// so that b'y + h'z = -1. For DualInfeasible, (x, s) hold a certificate
/// scaled so that c'x = -1.
struct SolveReport {
  SolveStatus status = SolveStatus::NumericalFailure;
  VectorX x, y, z, s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Residuals residuals;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
};

SolveReport solve(const StandardConicForm& form, const SolverSettings& settings = {});

/// Residuals of (x, y, z, s) recomputed from the raw data.
Residuals verify_kkt(const StandardConicForm& form, const SolveReport& report);

/// Independent checks of infeasibility certificates; they return the
/// violation (<= tolerance means the certificate is valid).
double primal_certificate_violation(const StandardConicForm& form, const VectorX& y, const VectorX& z);
double dual_certificate_violation(const StandardConicForm& form, const VectorX& x, const VectorX& s);

/// Distance-like violation of membership in the cone product; 0 inside.
double cone_violation(const StandardConicForm& form, const VectorX& v);

}  // namespace topp
