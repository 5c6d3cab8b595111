#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "backcom/experiment.hpp"
#include "backcom/report_io.hpp"
#include "backcom/scenario_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace backcom;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("backcom_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("BACKCOM_LOG=quiet \"") + BACKCOM_CLI_PATH + "\" " + args + " 2>\"" +
                          log.string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<double> column(const std::string& csv, std::size_t index) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    for (std::size_t i = 0; i <= index; ++i) std::getline(row, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

TEST_CASE("scenario parsing: defaults, overrides and diagnostics") {
  const ScenarioParams d = parse_scenario("");
  CHECK(d.n_slots == 50);
  CHECK(d.protocol == Protocol::TB);
  CHECK(parse_scenario("  \n ").n_slots == 50);
  CHECK(parse_scenario(R"({"eta": 0.5})").eta == 0.5);
  const ScenarioParams tbr = parse_scenario(R"({"protocol": "tbr", "period_t": 3})");
  CHECK(tbr.protocol == Protocol::TBR);
  CHECK(tbr.n_slots % 3 == 0);
  CHECK(parse_scenario(R"({"sigma2_db": -80})").sigma_u2 == doctest::Approx(1e-8));
  CHECK(parse_scenario(R"({"p_c": 2e-5})").p_eps == doctest::Approx(4e-6));
  CHECK(parse_scenario(R"({"w_b": [1, 2]})").w_b.y() == 2.0);
  CHECK(parse_scenario("{}", "x", Protocol::TBR).protocol == Protocol::TBR);

  auto message = [](const std::string& text) {
    try {
      parse_scenario(text, "s.json");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("{\n  \"eta\": 1.5\n}").find("s.json:2") != std::string::npos);
  CHECK(message(R"({"eta": 1.5})").find("eta") != std::string::npos);
  CHECK(message(R"({"colour": 1})").find("colour") != std::string::npos);
  CHECK(message(R"({"beta0": 1e-3, "beta0_db": -30})").find("beta0") != std::string::npos);
  CHECK(message(R"({"eta": "high"})").find("eta") != std::string::npos);
  CHECK(message(R"({"n_slots": 51, "period_t": 2.04})").find("divisible") != std::string::npos);
  CHECK_FALSE(message("{").empty());
  CHECK_FALSE(message("[1, 2]").empty());
}

TEST_CASE("numbers are written in a locale-independent 12-digit form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e-9) == "1e-09");
  CHECK(format_number(-2.5) == "-2.5");
}

TEST_CASE("CLI: solve writes artifacts with a monotone convergence log") {
  const fs::path dir = scratch("solve");
  REQUIRE(cli("--out \"" + dir.string() + "\"", dir / "log.txt") == kExitOk);
  for (const char* f : {"solve_report.csv", "trajectory.csv", "schedule.csv", "convergence.csv", "manifest.json",
                        "scenario.json"}) {
    CHECK(fs::exists(dir / f));
  }
  const std::vector<double> history = column(slurp(dir / "convergence.csv"), 1);
  REQUIRE(history.size() >= 2);
  for (std::size_t i = 1; i < history.size(); ++i) CHECK(history[i] >= history[i - 1] - 1e-9);
  CHECK(column(slurp(dir / "trajectory.csv"), 0).size() == 51);
}

TEST_CASE("CLI: repeated runs are byte-identical") {
  const fs::path a = scratch("repeat_a");
  const fs::path b = scratch("repeat_b");
  spit(a / "s.json", R"({"protocol": "tbr", "period_t": 1.2})");
  REQUIRE(cli("--scenario \"" + (a / "s.json").string() + "\" --out \"" + a.string() + "\"", a / "log.txt") == kExitOk);
  REQUIRE(cli("--scenario \"" + (a / "s.json").string() + "\" --out \"" + b.string() + "\"", b / "log.txt") == kExitOk);
  for (const char* f : {"solve_report.csv", "trajectory.csv", "schedule.csv", "convergence.csv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("CLI: configuration errors exit with code 2 and name the rule") {
  const fs::path dir = scratch("config");
  spit(dir / "odd.json", R"({"n_slots": 51, "period_t": 2.04})");
  CHECK(cli("--scenario \"" + (dir / "odd.json").string() + "\" --out \"" + dir.string() + "\"", dir / "log.txt") ==
        kExitConfigError);
  CHECK(slurp(dir / "log.txt").find("divisible") != std::string::npos);
  spit(dir / "eta.json", R"({"eta": 1.5})");
  CHECK(cli("--scenario \"" + (dir / "eta.json").string() + "\" --out \"" + dir.string() + "\"", dir / "log.txt") ==
        kExitConfigError);
  CHECK(cli("--scenario \"" + (dir / "missing.json").string() + "\" --out \"" + dir.string() + "\"",
            dir / "log.txt") == kExitConfigError);
  CHECK(cli("--command fly --out \"" + dir.string() + "\"", dir / "log.txt") == kExitConfigError);
  CHECK(cli("", dir / "log.txt") == kExitConfigError);
  CHECK(cli("--command sweep --out \"" + dir.string() + "\"", dir / "log.txt") == kExitConfigError);
}

TEST_CASE("CLI: solve then audit round trip, and a tampered schedule fails the audit") {
  const fs::path dir = scratch("audit");
  REQUIRE(cli("--protocol tbr --out \"" + dir.string() + "\"", dir / "log.txt") == kExitOk);
  REQUIRE(cli("--protocol tbr --command audit --out \"" + dir.string() + "\"", dir / "log.txt") == kExitOk);
  const std::string audit = slurp(dir / "audit.csv");
  CHECK(audit.find("energy_ok,1") != std::string::npos);
  CHECK(audit.find("mobility_ok,1") != std::string::npos);
  CHECK(audit.find("causality_ok,1") != std::string::npos);

  // Every block at full time and no reflection: the BD cannot pay for it.
  std::istringstream in(slurp(dir / "schedule.csv"));
  std::ostringstream tampered;
  std::string line;
  std::getline(in, line);
  tampered << line << "\n";
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    cells[4] = "0";
    cells[5] = "1";
    for (std::size_t i = 0; i < cells.size(); ++i) tampered << (i ? "," : "") << cells[i];
    tampered << "\n";
  }
  spit(dir / "schedule.csv", tampered.str());
  CHECK(cli("--protocol tbr --command audit --out \"" + dir.string() + "\"", dir / "log.txt") == kExitAuditFailure);
  CHECK(slurp(dir / "audit.csv").find("energy_ok,0") != std::string::npos);
}

TEST_CASE("CLI: sweep and rate validation write their tables") {
  const fs::path dir = scratch("sweep");
  REQUIRE(cli("--command sweep --sweep-axis mu --sweep-values 1e-4,1e-3 --out \"" + dir.string() + "\"",
              dir / "log.txt") == kExitOk);
  const std::string sweep_csv = slurp(dir / "sweep.csv");
  CHECK(sweep_csv.rfind("axis_value,scheme,protocol,mu_model,objective_bpshz,iters,wall_ms,status\n", 0) == 0);
  CHECK(column(sweep_csv, 0).size() == 6);

  const fs::path v = scratch("validate");
  REQUIRE(cli("--command validate-rates --sweep-values -50 --mc-samples 1000 --seed 3 --out \"" + v.string() + "\"",
              v / "log.txt") == kExitOk);
  const std::string checks = slurp(v / "mc_validation.csv");
  CHECK(checks.rfind("series,x,approximation,mc_mean,mc_std_error,relative_error,within_3sigma\n", 0) == 0);
  CHECK(column(checks, 2).size() == 1);
}

TEST_CASE("library entry point reports config errors without throwing") {
  RunManifest m;
  m.out_dir = scratch("lib").string();
  m.scenario_path = (fs::path(m.out_dir) / "nope.json").string();
  std::ostringstream log;
  CHECK(run(m, log) == kExitConfigError);
  CHECK(log.str().find("cannot open") != std::string::npos);
}
