#pragma once

#include "backcom/core_model.hpp"
#include "backcom/solve_types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace backcom {

/// Proposed: cumulative energy constraint and optimized trajectory.
/// HF: every block powered by its own harvest only. SF: straight-line flight at constant speed.
enum class Scheme { Proposed, HF, SF };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& text);

SolveReport solve_proposed(const ScenarioParams& params, SolveConfig config = {});
SolveReport solve_hf(const ScenarioParams& params, SolveConfig config = {});
SolveReport solve_sf(const ScenarioParams& params, SolveConfig config = {});
SolveReport solve_scheme(const ScenarioParams& params, Scheme scheme, const SolveConfig& config = {});

/// Benchmarks plus the proposed scheme, which is run from the default start and from each benchmark
/// solution; `proposed` holds the best of those runs.
struct SchemeComparison {
  SolveReport sf;
  SolveReport hf;
  SolveReport proposed;
  SolveReport proposed_from_hf;
  SolveReport proposed_from_sf;
};

SchemeComparison compare_schemes(const ScenarioParams& params, const SolveConfig& config = {});

enum class SweepAxis { Period, Mu, Snr };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& text);

/// Period: set_period(value). Mu: mu = value. Snr: value in dB of beta0 / sigma^2, applied to both
/// noise powers.
ScenarioParams apply_axis(const ScenarioParams& base, SweepAxis axis, double value);

struct SweepRow {
  double axis_value = 0.0;
  Scheme scheme = Scheme::Proposed;
  Protocol protocol = Protocol::TB;
  /// "static" (mu = 0) or "dynamic".
  std::string mu_model;
  double objective = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  /// Solve status, "error: ..." for a failed cell, with ";over_budget" appended past the time budget.
  std::string status;
};

inline constexpr double kCellBudgetMs = 60000.0;

/// One row per (value, scheme) in input order. On the mu axis each scheme is solved from the largest
/// mu down, each cell starting from the solution of the next larger mu, so the objective cannot
/// increase with mu.
std::vector<SweepRow> sweep(const ScenarioParams& base, SweepAxis axis, const std::vector<double>& values,
                            const std::vector<Scheme>& schemes, const SolveConfig& config = {},
                            double budget_ms = kCellBudgetMs);

/// One approximation-versus-simulation comparison point.
struct RateCheck {
  std::string series;
  /// Noise power in dB for sweeps over the noise, block index for per-block series.
  double x = 0.0;
  double approximation = 0.0;
  double mc_mean = 0.0;
  double mc_std_error = 0.0;

  double relative_error() const;
  bool within_sigma(double sigmas) const;
};

/// Receiver noise powers (dB) of the reference noise sweep, -40 down to -90.
std::vector<double> default_noise_sweep_db();

/// TB, T = 2 s, mu = 0.01, K = 15 dB.
ScenarioParams tb_rate_validation_scenario();
/// TBR, T = 7 s, mu = 0.
ScenarioParams tbr_rate_validation_scenario();

/// For every receiver noise power: solves the proposed TB scheme, then compares its objective with the
/// simulated throughput of the same schedule (series "tb_throughput").
std::vector<RateCheck> validate_tb_rates(const ScenarioParams& base, const std::vector<double>& sigma_r2_db,
                                         const SolveConfig& config, std::int64_t samples, std::uint64_t seed);

/// Per-block uplink ("tbr_uplink") and relay ("tbr_downlink") rates of a solved TBR schedule against
/// simulation.
std::vector<RateCheck> validate_tbr_rates(const ScenarioParams& params, const SolveReport& solved,
                                          std::int64_t samples, std::uint64_t seed);

}  // namespace backcom
