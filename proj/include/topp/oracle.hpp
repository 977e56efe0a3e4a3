#pragma once

#include "topp/scenario.hpp"
#include "topp/transcription.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace topp {

/// Classic phase-plane profile in (s, b = sdot^2).
struct PhasePlaneProfile {
  std::vector<double> s;
  std::vector<double> mvc;      // largest admissible b at each s
  std::vector<double> backward; // maximum-deceleration field clipped by the MVC
  std::vector<double> profile;  // final b(s)
  double T = 0.0;
};

/// Raised when no (a, b >= 0) satisfies the limits at some s.
class DynamicSingularity : public std::runtime_error {
 public:
  DynamicSingularity(int interval, double s);
  int interval;
  double s;
};

/// Bang-bang integration of the extremal fields (RK4) for a scenario without
/// objects, on a uniform grid of `resolution` intervals.
PhasePlaneProfile topp_phase_plane(const Scenario& scenario, int resolution);

struct FamilyViolation {
  std::string family;
  double max_violation = 0.0;  // relative, 0 when satisfied
  int worst_interval = -1;
  int rows = 0;
  std::vector<int> flagged;    // intervals (or grid points) above the tolerance
};

struct AuditReport {
  std::vector<FamilyViolation> families;
  double tolerance = 1e-6;

  double max_violation() const;
  bool pass() const { return max_violation() <= tolerance; }
  const FamilyViolation& family(const std::string& name) const;
  std::string to_json() const;
};

/// Recomputes every constraint from the robot and object models (not from the
/// assembled program) and reports the worst relative violation per family.
AuditReport audit(const Scenario& scenario, const Grid& grid, const ScalingSolution& solution, double tolerance = 1e-6);

struct FdCheck {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  bool pass() const { return max_error <= tolerance; }
};

struct FdLedger {
  std::uint64_t seed = 0;
  std::vector<FdCheck> checks;

  bool pass() const;
  std::string to_json() const;
};

inline constexpr std::uint64_t kFdSeed = 20240607;

/// Finite-difference cross-checks at random points drawn with a fixed seed.
FdLedger fd_suite(const Scenario& scenario, std::uint64_t seed = kFdSeed, int samples = 50);

/// |M a + C b + g - RNEA(q, q' sdot, q'' sdot^2 + q' sddot)| for one sample.
double rnea_substitution_error(const Scenario& scenario, const PathDynamicsSample& sample, double sdot, double sddot);

}  // namespace topp
