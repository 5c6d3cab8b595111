#include "backcom/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"UAV backscatter throughput optimizer"};
  backcom::RunManifest manifest;
  std::string command = "solve";
  std::string protocol;
  std::string scheme = "proposed";
  std::string axis;

  app.add_option("--scenario", manifest.scenario_path, "Scenario JSON file (omit for the reference defaults)");
  app.add_option("--command", command, "solve | sweep | validate-rates | audit")
      ->check(CLI::IsMember({"solve", "sweep", "validate-rates", "audit"}));
  app.add_option("--protocol", protocol, "tb | tbr")->check(CLI::IsMember({"tb", "tbr"}));
  app.add_option("--scheme", scheme, "proposed | hf | sf")->check(CLI::IsMember({"proposed", "hf", "sf"}));
  app.add_option("--seed", manifest.seed, "Master seed for Monte Carlo runs");
  app.add_option("--out", manifest.out_dir, "Output directory")->required();
  app.add_option("--sweep-axis", axis, "T | mu | snr")->check(CLI::IsMember({"T", "mu", "snr"}));
  app.add_option("--sweep-values", manifest.sweep_values, "Comma-separated sweep values")->delimiter(',');
  app.add_option("--mc-samples", manifest.mc_samples, "Monte Carlo samples per point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : backcom::kExitConfigError;
  }

  try {
    manifest.command = backcom::command_from_string(command);
    if (!protocol.empty()) manifest.protocol = backcom::protocol_from_string(protocol);
    manifest.scheme = backcom::scheme_from_string(scheme);
    if (!axis.empty()) manifest.sweep_axis = backcom::sweep_axis_from_string(axis);
  } catch (const backcom::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return backcom::kExitConfigError;
  }
  return backcom::run(manifest, std::cerr);
}
