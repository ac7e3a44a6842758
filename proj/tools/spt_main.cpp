// Command line front end: `run` executes an experiment, `emit-csv` writes the
// aggregate summary, `verify` audits the damage constraint on finished logs.

#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spt/harness.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(csv);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (field.empty()) continue;
    seeds.push_back(std::stoull(field));
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe policy transfer experiments with adaptive torque limits"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string seeds_csv;
  std::string out_dir = "runs_out";
  auto* run_cmd = app.add_subcommand("run", "Run an experiment");
  run_cmd->add_option("--config", config_path, "Experiment config JSON");
  run_cmd->add_option("--preset", preset,
                      "adaptive_vs_fixed | ablation | dsafe_sweep | pointmass");
  run_cmd->add_option("--seeds", seeds_csv, "Comma-separated seed list");
  run_cmd->add_option("--out", out_dir, "Output directory");

  std::string emit_dir;
  auto* emit_cmd = app.add_subcommand("emit-csv", "Write summary.csv for a run");
  emit_cmd->add_option("--run", emit_dir, "Run output directory")->required();

  std::string verify_dir;
  double d_safe = 0.5;
  auto* verify_cmd =
      app.add_subcommand("verify", "Audit the expected-damage constraint");
  verify_cmd->add_option("--run", verify_dir, "Run output directory")->required();
  verify_cmd->add_option("--d-safe", d_safe, "Damage budget to audit against")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      spt::ExperimentConfig cfg;
      if (!config_path.empty()) {
        cfg = spt::ExperimentConfig::load(config_path);
      }
      if (!preset.empty()) cfg.preset = preset;
      if (!seeds_csv.empty()) cfg.seeds = parse_seeds(seeds_csv);
      spt::RunOptions opts;
      opts.quiet = false;
      spt::run_experiment(cfg, out_dir, opts);
      spt::emit_csv(out_dir);
      std::cout << "[spt] done, logs under " << out_dir << std::endl;
      return 0;
    }
    if (emit_cmd->parsed()) {
      spt::emit_csv(emit_dir);
      std::cout << "[spt] wrote " << emit_dir << "/summary.csv" << std::endl;
      return 0;
    }
    if (verify_cmd->parsed()) {
      return spt::verify_runs(verify_dir, d_safe, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
