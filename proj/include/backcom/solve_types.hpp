#pragma once

#include "backcom/core_model.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace backcom {

/// Starting point for a block coordinate ascent run.
struct InitialPoint {
  Trajectory trajectory;
  Schedule schedule;
};

struct SolveConfig {
  /// Stop once the fractional objective increase of an outer iteration falls below this.
  double bcd_tol = 1e-3;
  int max_bcd_iters = 50;
  /// Relative improvement that ends the successive convex approximation inside one block update.
  double sca_tol = 1e-5;
  int max_sca_passes = 30;
  double initial_reflection = 0.5;
  EnergyRule energy_rule = EnergyRule::Cumulative;
  bool optimize_trajectory = true;
  /// Interior relaxation of the normalized constraints of every convex surrogate; the exact
  /// constraints are restored by the repair step after each solve.
  double relax = 1e-8;
  /// Barrier duality-gap target relative to the surrogate objective.
  double scp_rel_tol = 1e-9;
  double dual_step = 0.01;
  int dual_max_iters = 5000;
  double dual_tol = 1e-7;
  std::optional<InitialPoint> initial;

  void validate() const;
};

using TbSolveConfig = SolveConfig;
using TbrSolveConfig = SolveConfig;

struct SolveDiagnostics {
  int lp_solves = 0;
  int closed_form_allocations = 0;
  int dual_solves = 0;
  int dual_certificate_failures = 0;
  int reflection_sca_passes = 0;
  int trajectory_sca_passes = 0;
  int newton_steps = 0;
  /// Block updates discarded as infeasible or objective-lowering.
  int rejected_updates = 0;
  /// Surrogate solutions pulled back onto the exact feasible set.
  int feasibility_repairs = 0;
  /// SCA passes whose surrogate solve did not reach its gap target.
  int inexact_solves = 0;
};

enum class SolveStatus { Converged, MaxIterations, AuditFailed };

std::string to_string(SolveStatus status);

struct SolveReport {
  Protocol protocol = Protocol::TB;
  std::string scheme = "proposed";
  /// history[0] is the objective of the (repaired) initial point; one entry per outer iteration after that.
  std::vector<double> objective_history;
  Trajectory trajectory;
  Schedule schedule;
  /// Per-block backscatter rate (bps/Hz).
  std::vector<double> rates;
  /// Cumulative harvest minus consumption per block (W).
  std::vector<double> energy_residuals;
  double mobility_violation = 0.0;
  /// TBR only: cumulative relayed minus cumulative received data per block.
  std::vector<double> causality_margins;
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  double wall_ms = 0.0;
  SolveDiagnostics diagnostics;

  double objective() const { return objective_history.empty() ? 0.0 : objective_history.back(); }
  InitialPoint as_initial_point() const { return {trajectory, schedule}; }
};

/// Raised when a convex surrogate cannot be solved from its (supposedly strictly feasible) start.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace backcom
