#pragma once

#include "backcom/benchmarks.hpp"
#include "backcom/core_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace backcom {

enum class Command { Solve, Sweep, ValidateRates, Audit };

std::string to_string(Command command);
Command command_from_string(const std::string& text);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitAuditFailure = 4;

struct RunManifest {
  /// Empty path means the reference defaults.
  std::string scenario_path;
  Command command = Command::Solve;
  std::string out_dir;
  std::uint64_t seed = 0;
  /// Overrides the scenario's protocol key when set (they must agree if both are given).
  std::optional<Protocol> protocol;
  Scheme scheme = Scheme::Proposed;
  std::optional<SweepAxis> sweep_axis;
  std::vector<double> sweep_values;
  std::int64_t mc_samples = 100000;
};

/// Executes one manifest and writes its artifacts into out_dir (created if needed):
/// - solve: solve_report.csv, trajectory.csv, schedule.csv, convergence.csv;
/// - sweep: sweep.csv;
/// - validate-rates: the solve artifacts of the scenario plus mc_validation.csv (TB: noise sweep
///   over --sweep-values or -40..-90 dB; TBR: every block of the solved scenario);
/// - audit: re-reads trajectory.csv and schedule.csv from out_dir and writes audit.csv.
/// manifest.json and scenario.json are copied in for every run. Returns kExitOk, kExitConfigError,
/// kExitSolverFailure (partial artifacts still written) or kExitAuditFailure.
int run(const RunManifest& manifest, std::ostream& log);

}  // namespace backcom
