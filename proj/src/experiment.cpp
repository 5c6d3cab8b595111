#include "backcom/experiment.hpp"

#include "backcom/protocol_tb.hpp"
#include "backcom/protocol_tbr.hpp"
#include "backcom/report_io.hpp"
#include "backcom/scenario_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace backcom {

std::string to_string(Command command) {
  switch (command) {
    case Command::Solve: return "solve";
    case Command::Sweep: return "sweep";
    case Command::ValidateRates: return "validate-rates";
    case Command::Audit: return "audit";
  }
  return "unknown";
}

Command command_from_string(const std::string& text) {
  if (text == "solve") return Command::Solve;
  if (text == "sweep") return Command::Sweep;
  if (text == "validate-rates") return Command::ValidateRates;
  if (text == "audit") return Command::Audit;
  throw ConfigError("unknown command '" + text + "' (expected solve, sweep, validate-rates or audit)");
}

namespace {

namespace fs = std::filesystem;

enum class Verbosity { Quiet, Info, Debug };

Verbosity verbosity() {
  const char* env = std::getenv("BACKCOM_LOG");
  if (!env) return Verbosity::Info;
  const std::string v(env);
  if (v == "quiet" || v == "0") return Verbosity::Quiet;
  if (v == "debug" || v == "2") return Verbosity::Debug;
  return Verbosity::Info;
}

class Log {
 public:
  explicit Log(std::ostream& os) : os_(os), level_(verbosity()) {}
  void info(const std::string& msg) const {
    if (level_ != Verbosity::Quiet) os_ << msg << "\n";
  }
  void debug(const std::string& msg) const {
    if (level_ == Verbosity::Debug) os_ << msg << "\n";
  }
  void error(const std::string& msg) const { os_ << "error: " << msg << "\n"; }

 private:
  std::ostream& os_;
  Verbosity level_;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw ConfigError("cannot write " + path.string());
}

void write_manifest(const RunManifest& m, const fs::path& dir) {
  nlohmann::ordered_json j;
  j["scenario"] = m.scenario_path;
  j["command"] = to_string(m.command);
  j["seed"] = m.seed;
  j["protocol"] = m.protocol ? to_string(*m.protocol) : "";
  j["scheme"] = to_string(m.scheme);
  j["sweep_axis"] = m.sweep_axis ? to_string(*m.sweep_axis) : "";
  j["sweep_values"] = m.sweep_values;
  j["mc_samples"] = m.mc_samples;
  write_text(dir / "manifest.json", j.dump(2) + "\n");
}

void write_solution_artifacts(const fs::path& dir, const ScenarioParams& params, const SolveReport& report) {
  write_solve_report((dir / "solve_report.csv").string(), params, report);
  write_trajectory((dir / "trajectory.csv").string(), params, report.trajectory);
  write_schedule((dir / "schedule.csv").string(), params, report);
  write_convergence((dir / "convergence.csv").string(), report);
}

int exit_for(const SolveReport& report, const Log& log) {
  if (report.status == SolveStatus::AuditFailed) {
    log.error("information-causality audit found a negative margin");
    return kExitAuditFailure;
  }
  if (report.status == SolveStatus::MaxIterations) {
    log.error("solver stopped at the iteration limit without converging");
    return kExitSolverFailure;
  }
  return kExitOk;
}

int run_solve(const RunManifest& m, const ScenarioParams& params, const fs::path& dir, const Log& log) {
  const SolveReport report = solve_scheme(params, m.scheme);
  write_solution_artifacts(dir, params, report);
  std::ostringstream os;
  os << to_string(params.protocol) << " " << report.scheme << ": objective " << format_number(report.objective())
     << " bps/Hz after " << report.iterations << " iterations (" << to_string(report.status) << ")";
  log.info(os.str());
  return exit_for(report, log);
}

int run_sweep(const RunManifest& m, const ScenarioParams& params, const fs::path& dir, const Log& log) {
  if (!m.sweep_axis) throw ConfigError("sweep needs --sweep-axis");
  if (m.sweep_values.empty()) throw ConfigError("sweep needs --sweep-values");
  const std::vector<SweepRow> rows = sweep(params, *m.sweep_axis, m.sweep_values, {Scheme::Proposed, Scheme::HF, Scheme::SF});
  write_sweep((dir / "sweep.csv").string(), rows);
  for (const SweepRow& r : rows) {
    log.debug(format_number(r.axis_value) + " " + to_string(r.scheme) + " " + format_number(r.objective) + " " + r.status);
  }
  log.info("sweep: " + std::to_string(rows.size()) + " cells written");
  return kExitOk;
}

int run_validate(const RunManifest& m, const ScenarioParams& params, const fs::path& dir, const Log& log) {
  if (m.mc_samples < 2) throw ConfigError("mc samples must be at least 2");
  const SolveReport report = solve_scheme(params, m.scheme);
  write_solution_artifacts(dir, params, report);
  std::vector<RateCheck> checks;
  if (params.protocol == Protocol::TB) {
    const std::vector<double> noise = m.sweep_values.empty() ? default_noise_sweep_db() : m.sweep_values;
    checks = validate_tb_rates(params, noise, {}, m.mc_samples, m.seed);
  } else {
    checks = validate_tbr_rates(params, report, m.mc_samples, m.seed);
  }
  write_rate_checks((dir / "mc_validation.csv").string(), checks);
  double worst = 0.0;
  for (const RateCheck& c : checks) worst = std::max(worst, c.relative_error());
  log.info("validate-rates: " + std::to_string(checks.size()) + " points, largest relative error " + format_number(worst));
  return exit_for(report, log);
}

int run_audit(const ScenarioParams& params, const fs::path& dir, const Log& log) {
  const StoredSolution sol =
      read_solution((dir / "trajectory.csv").string(), (dir / "schedule.csv").string(), params);
  for (std::size_t b = 0; b < sol.schedule.a.size(); ++b) {
    if (!(sol.schedule.a[b] >= 0.0 && sol.schedule.a[b] <= 1.0 && sol.schedule.phi[b] >= 0.0 &&
          sol.schedule.phi[b] <= 1.0)) {
      throw ConfigError("schedule.csv: block " + std::to_string(b) + " has a or phi outside [0, 1]");
    }
  }
  const std::vector<double> rates = params.protocol == Protocol::TB
                                        ? tb_rates(params, sol.trajectory, sol.schedule.a)
                                        : tbr_uplink_rates(params, sol.trajectory, sol.schedule.a);
  const std::vector<double> residuals = check_energy_feasibility(params, sol.trajectory, sol.schedule, rates);
  const MobilityCheck mobility = check_mobility(params, sol.trajectory);
  const double min_residual = residuals.empty() ? 0.0 : *std::min_element(residuals.begin(), residuals.end());
  const bool energy_ok = min_residual >= -kFeasibilityTol * params.p_c;
  double objective = 0.0;
  for (std::size_t b = 0; b < rates.size(); ++b) objective += sol.schedule.phi[b] * rates[b];

  std::ofstream out(dir / "audit.csv", std::ios::binary | std::ios::trunc);
  out << "key,value\n";
  out << "objective_bpshz," << format_number(objective) << "\n";
  out << "min_energy_residual_w," << format_number(min_residual) << "\n";
  out << "energy_ok," << (energy_ok ? 1 : 0) << "\n";
  out << "mobility_violation_m," << format_number(mobility.max_violation) << "\n";
  out << "mobility_ok," << (mobility.feasible ? 1 : 0) << "\n";
  bool causality_ok = true;
  if (params.protocol == Protocol::TBR) {
    const std::vector<double> margins =
        audit_information_causality(params, sol.trajectory, sol.schedule.a, sol.schedule.phi);
    const double min_margin = margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
    causality_ok = min_margin > 0.0;
    out << "min_causality_margin," << format_number(min_margin) << "\n";
    out << "causality_ok," << (causality_ok ? 1 : 0) << "\n";
  }
  if (!out) throw ConfigError("cannot write audit.csv");

  if (!energy_ok || !mobility.feasible || !causality_ok) {
    log.error(std::string("audit failed:") + (energy_ok ? "" : " energy") + (mobility.feasible ? "" : " mobility") +
              (causality_ok ? "" : " causality"));
    return kExitAuditFailure;
  }
  log.info("audit passed: objective " + format_number(objective) + " bps/Hz");
  return kExitOk;
}

}  // namespace

int run(const RunManifest& manifest, std::ostream& out) {
  const Log log(out);
  try {
    if (manifest.out_dir.empty()) throw ConfigError("an output directory is required");
    const fs::path dir(manifest.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());

    const std::string text = manifest.scenario_path.empty() ? std::string() : read_text(manifest.scenario_path);
    const ScenarioParams params =
        parse_scenario(text, manifest.scenario_path.empty() ? "<defaults>" : manifest.scenario_path, manifest.protocol);
    write_manifest(manifest, dir);
    write_text(dir / "scenario.json", text);

    switch (manifest.command) {
      case Command::Solve: return run_solve(manifest, params, dir, log);
      case Command::Sweep: return run_sweep(manifest, params, dir, log);
      case Command::ValidateRates: return run_validate(manifest, params, dir, log);
      case Command::Audit: return run_audit(params, dir, log);
    }
    throw ConfigError("unknown command");
  } catch (const ConfigError& e) {
    log.error(e.what());
    return kExitConfigError;
  } catch (const SolverError& e) {
    log.error(e.what());
    return kExitSolverFailure;
  }
}

}  // namespace backcom
