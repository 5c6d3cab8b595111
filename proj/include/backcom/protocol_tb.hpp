#pragma once

#include "backcom/barrier.hpp"
#include "backcom/core_model.hpp"
#include "backcom/rate_models.hpp"
#include "backcom/schedule_subproblems.hpp"
#include "backcom/solve_types.hpp"

#include <vector>

namespace backcom {

/// Block coefficients of the TB protocol along a trajectory (rate and harvest both at waypoint 2b+1).
BlockGains tb_block_gains(const ScenarioParams& params, const Trajectory& traj);
std::vector<double> tb_rates(const ScenarioParams& params, const Trajectory& traj, const std::vector<double>& a);

std::vector<double> tb_time_allocation(const ScenarioParams& params, const Trajectory& traj,
                                       const std::vector<double>& a, EnergyRule rule = EnergyRule::Cumulative);

/// Requires (phi, a_current, traj) to be feasible; returns the updated reflection coefficients.
std::vector<double> tb_reflection(const ScenarioParams& params, const Trajectory& traj, const std::vector<double>& phi,
                                  const std::vector<double>& a_current, const TbSolveConfig& config = {});

/// One surrogate solve around `expansion`, without repair: the raw optimizer of the convex
/// lower-bound problem (rate tangent in the squared distance, harvest gain tangent, linearized slack).
struct TbSurrogateSolution {
  Trajectory trajectory;
  /// Slack lower-bounding the squared BD distance in the dynamic-circuit consumption term (empty when static).
  std::vector<double> slack_y;
  double objective_at_start = 0.0;
  double objective = 0.0;
  ScpStatus status = ScpStatus::InfeasibleStart;
};
TbSurrogateSolution tb_trajectory_surrogate(const ScenarioParams& params, const std::vector<double>& a,
                                            const std::vector<double>& phi, const Trajectory& expansion,
                                            const TbSolveConfig& config = {});

/// Successive surrogate passes; the result satisfies the exact constraints and never lowers the objective.
Trajectory tb_trajectory(const ScenarioParams& params, const std::vector<double>& a, const std::vector<double>& phi,
                         const Trajectory& traj_prev, const TbSolveConfig& config = {},
                         SolveDiagnostics* diag = nullptr);

SolveReport tb_bcd_solve(const ScenarioParams& params, const TbSolveConfig& config = {});

}  // namespace backcom
