#ifndef SPT_CONFIG_HPP_
#define SPT_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "spt/safety.hpp"

namespace spt {

struct EnvConfig {
  std::string type = "arm";  // arm | pointmass
  double u_lim = 0.2;
  double u_prime_lim = 0.0;
  double lambda_penalty = 1e-3;
  int horizon = 200;
  // Initial-configuration range: joint angles for the arm, start position
  // for the point mass.
  double angle_range = 0.3;
  double mass_factor = 10.0;
  double damping_factor = 10.0;
  double inertia_factor = 10.0;
};

struct LearnerConfig {
  double gamma = 0.95;
  double lambda_gae = 0.98;
  double delta_kl_pretrain = 0.01;
  double delta_kl_finetune = 0.05;
  int episodes_per_batch_pretrain = 50;
  int episodes_per_batch_finetune = 5;
  int pretrain_iterations = 100;
  int finetune_iterations = 100;
  double initial_std = 0.5;  // N·m
};

// Full run specification. Every field has a default; a config file only
// overrides what it names. Unknown keys are rejected with their path.
struct ExperimentConfig {
  EnvConfig env;
  LearnerConfig learner;
  SafetyConfig safety;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::string preset;  // "", adaptive_vs_fixed, ablation, dsafe_sweep, pointmass
  std::vector<double> dsafe_sweep{0.25, 0.5, 1.0, 2.0};

  void validate() const;  // throws std::invalid_argument with a field path
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);
};

// Returns the config with preset-specific overrides applied (e.g. the
// pointmass preset switches the environment and skips pre-training).
ExperimentConfig apply_preset(ExperimentConfig cfg);

}  // namespace spt

#endif  // SPT_CONFIG_HPP_
