#pragma once

#include "topp/lie.hpp"

#include <map>
#include <string>
#include <vector>

namespace topp {

/// Contiguous block of scalar variables with a name.
struct VariableSlice {
  std::string name;
  int offset = 0;
  int size = 0;
};

struct LinearTerm {
  int var;
  double coef;
};

/// Constraint family label plus the grid interval the row belongs to
/// (-1 for rows not tied to one interval).
struct RowTag {
  std::string family;
  int interval = -1;
};

/// sum(terms) + constant.
struct AffineExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  double evaluate(const VectorX& x) const;
};

/// lower <= sum(terms) <= upper; lower == upper makes an equality row.
struct LinearRow {
  std::vector<LinearTerm> terms;
  double lower;
  double upper;
  RowTag tag;

  bool is_equality() const { return lower == upper; }
  double evaluate(const VectorX& x) const;
};

/// || entries[1..] || <= entries[0].
struct SocBlock {
  std::vector<AffineExpr> entries;
  RowTag tag;
};

struct FixedVariable {
  int var;
  double value;
};

/// Named-slice second-order cone program:
///   minimize objective' x
///   subject to linear rows, fixed and pinned (== 0) variables, SOC blocks.
class ConicProgram {
 public:
  /// Appends a slice; names must be unique.
  VariableSlice add_slice(const std::string& name, int size);
  const VariableSlice& slice(const std::string& name) const;
  bool has_slice(const std::string& name) const;
  const std::vector<VariableSlice>& slices() const { return slices_; }
  int num_variables() const { return num_vars_; }

  void set_objective(int var, double coef);
  const VectorX& objective() const { return objective_; }

  void add_row(LinearRow row);
  void add_cone(SocBlock cone);
  void fix(int var, double value);
  void pin(int var);

  const std::vector<LinearRow>& rows() const { return rows_; }
  const std::vector<SocBlock>& cones() const { return cones_; }
  const std::vector<FixedVariable>& fixed() const { return fixed_; }
  const std::vector<int>& pinned() const { return pinned_; }

  /// Variables minus fixed and pinned scalars.
  int free_scalar_count() const;

  /// Splits x into named slices; pack() is its exact inverse.
  std::map<std::string, VectorX> unpack(const VectorX& x) const;
  VectorX pack(const std::map<std::string, VectorX>& slices) const;

  /// Versioned JSON dump ("topp-conic-program", version 1).
  std::string dump() const;
  static ConicProgram load(const std::string& text);
  static constexpr int kDumpVersion = 1;

 private:
  void check_var(int var) const;

  std::vector<VariableSlice> slices_;
  int num_vars_ = 0;
  VectorX objective_;
  std::vector<LinearRow> rows_;
  std::vector<SocBlock> cones_;
  std::vector<FixedVariable> fixed_;
  std::vector<int> pinned_;
};

}  // namespace topp
