#include "backcom/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace backcom {

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path);
}

double min_or_zero(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double parse_double(const std::string& text, const std::string& path, std::size_t row) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(path + ":" + std::to_string(row + 1) + ": not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

void write_solve_report(const std::string& path, const ScenarioParams& params, const SolveReport& report) {
  std::ofstream out = open_output(path);
  const SolveDiagnostics& d = report.diagnostics;
  out << "key,value\n";
  out << "protocol," << to_string(report.protocol) << "\n";
  out << "scheme," << report.scheme << "\n";
  out << "status," << to_string(report.status) << "\n";
  out << "iterations," << report.iterations << "\n";
  out << "objective_bpshz," << format_number(report.objective()) << "\n";
  out << "period_t," << format_number(params.period_t) << "\n";
  out << "n_slots," << params.n_slots << "\n";
  out << "mu," << format_number(params.mu) << "\n";
  out << "min_energy_residual_w," << format_number(min_or_zero(report.energy_residuals)) << "\n";
  out << "mobility_violation_m," << format_number(report.mobility_violation) << "\n";
  if (report.protocol == Protocol::TBR) {
    out << "min_causality_margin," << format_number(min_or_zero(report.causality_margins)) << "\n";
  }
  out << "lp_solves," << d.lp_solves << "\n";
  out << "closed_form_allocations," << d.closed_form_allocations << "\n";
  out << "dual_solves," << d.dual_solves << "\n";
  out << "dual_certificate_failures," << d.dual_certificate_failures << "\n";
  out << "reflection_sca_passes," << d.reflection_sca_passes << "\n";
  out << "trajectory_sca_passes," << d.trajectory_sca_passes << "\n";
  out << "newton_steps," << d.newton_steps << "\n";
  out << "rejected_updates," << d.rejected_updates << "\n";
  out << "feasibility_repairs," << d.feasibility_repairs << "\n";
  out << "inexact_solves," << d.inexact_solves << "\n";
  close_output(out, path);
}

void write_trajectory(const std::string& path, const ScenarioParams& params, const Trajectory& traj) {
  std::ofstream out = open_output(path);
  out << "slot,t_seconds,q_x,q_y\n";
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    out << k << "," << format_number(static_cast<double>(k) * params.delta) << ","
        << format_number(traj.points[k].x()) << "," << format_number(traj.points[k].y()) << "\n";
  }
  close_output(out, path);
}

void write_schedule(const std::string& path, const ScenarioParams& params, const SolveReport& report) {
  std::ofstream out = open_output(path);
  const bool relay = report.protocol == Protocol::TBR;
  out << "slot,t_seconds,q_x,q_y,a,phi,rate" << (relay ? ",causality_margin" : "") << "\n";
  for (std::size_t b = 0; b < report.schedule.a.size(); ++b) {
    const int k = block_slots(report.protocol, static_cast<int>(b)).backscatter;
    const Position& q = report.trajectory.points[k];
    out << k << "," << format_number(k * params.delta) << "," << format_number(q.x()) << ","
        << format_number(q.y()) << "," << format_number(report.schedule.a[b]) << ","
        << format_number(report.schedule.phi[b]) << "," << format_number(report.rates[b]);
    if (relay) out << "," << format_number(b < report.causality_margins.size() ? report.causality_margins[b] : 0.0);
    out << "\n";
  }
  close_output(out, path);
}

void write_convergence(const std::string& path, const SolveReport& report) {
  std::ofstream out = open_output(path);
  out << "iteration,objective_bpshz\n";
  for (std::size_t i = 0; i < report.objective_history.size(); ++i) {
    out << i << "," << format_number(report.objective_history[i]) << "\n";
  }
  close_output(out, path);
}

void write_sweep(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_output(path);
  out << "axis_value,scheme,protocol,mu_model,objective_bpshz,iters,wall_ms,status\n";
  for (const SweepRow& r : rows) {
    out << format_number(r.axis_value) << "," << to_string(r.scheme) << "," << to_string(r.protocol) << ","
        << r.mu_model << "," << format_number(r.objective) << "," << r.iterations << ","
        << format_number(r.wall_ms) << "," << csv_field(r.status) << "\n";
  }
  close_output(out, path);
}

void write_rate_checks(const std::string& path, const std::vector<RateCheck>& rows) {
  std::ofstream out = open_output(path);
  out << "series,x,approximation,mc_mean,mc_std_error,relative_error,within_3sigma\n";
  for (const RateCheck& r : rows) {
    out << r.series << "," << format_number(r.x) << "," << format_number(r.approximation) << ","
        << format_number(r.mc_mean) << "," << format_number(r.mc_std_error) << ","
        << format_number(r.relative_error()) << "," << (r.within_sigma(3.0) ? 1 : 0) << "\n";
  }
  close_output(out, path);
}

StoredSolution read_solution(const std::string& trajectory_csv, const std::string& schedule_csv,
                             const ScenarioParams& params) {
  StoredSolution out;
  const auto traj_rows = read_rows(trajectory_csv);
  if (traj_rows.size() != static_cast<std::size_t>(params.n_slots) + 2) {
    throw ConfigError(trajectory_csv + ": expected " + std::to_string(params.n_slots + 1) + " waypoints");
  }
  for (std::size_t r = 1; r < traj_rows.size(); ++r) {
    if (traj_rows[r].size() < 4) throw ConfigError(trajectory_csv + ":" + std::to_string(r + 1) + ": short row");
    out.trajectory.points.emplace_back(parse_double(traj_rows[r][2], trajectory_csv, r),
                                       parse_double(traj_rows[r][3], trajectory_csv, r));
  }
  const auto sched_rows = read_rows(schedule_csv);
  if (sched_rows.size() != static_cast<std::size_t>(params.block_count()) + 1) {
    throw ConfigError(schedule_csv + ": expected " + std::to_string(params.block_count()) + " blocks");
  }
  out.schedule.protocol = params.protocol;
  for (std::size_t r = 1; r < sched_rows.size(); ++r) {
    if (sched_rows[r].size() < 6) throw ConfigError(schedule_csv + ":" + std::to_string(r + 1) + ": short row");
    out.schedule.a.push_back(parse_double(sched_rows[r][4], schedule_csv, r));
    out.schedule.phi.push_back(parse_double(sched_rows[r][5], schedule_csv, r));
  }
  return out;
}

}  // namespace backcom
