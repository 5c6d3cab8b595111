#pragma once

#include "backcom/benchmarks.hpp"
#include "backcom/core_model.hpp"
#include "backcom/solve_types.hpp"

#include <string>
#include <vector>

namespace backcom {

/// Locale-independent shortest form with at most 12 significant digits.
std::string format_number(double value);

/// Key/value summary of a run (no timing fields, so repeated runs give identical bytes).
void write_solve_report(const std::string& path, const ScenarioParams& params, const SolveReport& report);
/// slot, t_seconds, q_x, q_y for every waypoint.
void write_trajectory(const std::string& path, const ScenarioParams& params, const Trajectory& traj);
/// One row per block at its backscatter waypoint: slot, t_seconds, q_x, q_y, a, phi, rate
/// (plus causality_margin for TBR).
void write_schedule(const std::string& path, const ScenarioParams& params, const SolveReport& report);
/// iteration, objective_bpshz.
void write_convergence(const std::string& path, const SolveReport& report);
void write_sweep(const std::string& path, const std::vector<SweepRow>& rows);
/// series, x, approximation, mc_mean, mc_std_error, relative_error, within_3sigma.
void write_rate_checks(const std::string& path, const std::vector<RateCheck>& rows);

struct StoredSolution {
  Trajectory trajectory;
  Schedule schedule;
};

/// Reads trajectory.csv and schedule.csv as written above.
StoredSolution read_solution(const std::string& trajectory_csv, const std::string& schedule_csv,
                             const ScenarioParams& params);

}  // namespace backcom
