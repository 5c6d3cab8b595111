#pragma once

#include "backcom/barrier.hpp"
#include "backcom/core_model.hpp"
#include "backcom/schedule_subproblems.hpp"
#include "backcom/solve_types.hpp"

#include <functional>

namespace backcom::detail {

using GainsFn = std::function<BlockGains(const ScenarioParams&, const Trajectory&)>;

/// A convex surrogate of the trajectory subproblem built around an expansion trajectory.
struct SurrogateProgram {
  SmoothConvexProgram program;
  Eigen::VectorXd x0;
};

using SurrogateBuilder = std::function<SurrogateProgram(const Trajectory& expansion)>;

/// Index of the x-coordinate of waypoint k in the decision vector, or -1 for the fixed endpoints.
inline int position_var(int k, int n_slots) { return (k <= 0 || k >= n_slots) ? -1 : 2 * (k - 1); }

inline int position_var_count(int n_slots) { return 2 * (n_slots - 1); }

/// Adds coef * ||q_k - p||^2 to f, folding a fixed waypoint into a constant.
void add_waypoint_distance(CompositeFunction& f, const Trajectory& expansion, int k, const Position& p, double coef);

/// Mobility constraints (||q_{k+1} - q_k||^2 - (V delta)^2) / (V delta)^2 <= relax for every step.
void add_mobility_constraints(SmoothConvexProgram& program, const ScenarioParams& params, const Trajectory& expansion,
                              double relax);

/// Waypoints of a decision vector; endpoints copied from the expansion trajectory.
Trajectory decode_positions(const Eigen::VectorXd& x, const Trajectory& expansion);
Eigen::VectorXd encode_positions(const Trajectory& traj, int total_dimension);

/// Smallest blend toward the constant-speed straight line that satisfies every speed limit exactly.
Trajectory repair_mobility(const ScenarioParams& params, const Trajectory& candidate);

bool straight_line_is_forced(const ScenarioParams& params);

/// Exact speed-limit check (no tolerance) used before handing a trajectory to a surrogate.
bool within_speed_limit(const ScenarioParams& params, const Trajectory& traj);

/// Successive surrogate passes with exact repair and a non-decreasing objective.
Trajectory run_trajectory_sca(const ScenarioParams& params, const std::vector<double>& a,
                              const std::vector<double>& phi, const Trajectory& start, const SolveConfig& config,
                              const GainsFn& gains_fn, const SurrogateBuilder& build, SolveDiagnostics* diag);

}  // namespace backcom::detail
