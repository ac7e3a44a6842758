#include "spt/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace spt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw std::invalid_argument(path + ": " + msg);
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown field");
  }
}

template <typename T>
void get_to(const json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception&) {
    fail(path + "." + key, "has the wrong type");
  }
}

void parse_env(const json& j, EnvConfig& env) {
  check_keys(j, "env",
             {"type", "u_lim", "u_prime_lim", "lambda_penalty", "horizon",
              "angle_range", "mass_factor", "damping_factor", "inertia_factor"});
  get_to(j, "env", "type", env.type);
  get_to(j, "env", "u_lim", env.u_lim);
  get_to(j, "env", "u_prime_lim", env.u_prime_lim);
  get_to(j, "env", "lambda_penalty", env.lambda_penalty);
  get_to(j, "env", "horizon", env.horizon);
  get_to(j, "env", "angle_range", env.angle_range);
  get_to(j, "env", "mass_factor", env.mass_factor);
  get_to(j, "env", "damping_factor", env.damping_factor);
  get_to(j, "env", "inertia_factor", env.inertia_factor);
}

void parse_learner(const json& j, LearnerConfig& l) {
  check_keys(j, "learner",
             {"gamma", "lambda_gae", "delta_kl_pretrain", "delta_kl_finetune",
              "episodes_per_batch_pretrain", "episodes_per_batch_finetune",
              "pretrain_iterations", "finetune_iterations", "initial_std"});
  get_to(j, "learner", "gamma", l.gamma);
  get_to(j, "learner", "lambda_gae", l.lambda_gae);
  get_to(j, "learner", "delta_kl_pretrain", l.delta_kl_pretrain);
  get_to(j, "learner", "delta_kl_finetune", l.delta_kl_finetune);
  get_to(j, "learner", "episodes_per_batch_pretrain", l.episodes_per_batch_pretrain);
  get_to(j, "learner", "episodes_per_batch_finetune", l.episodes_per_batch_finetune);
  get_to(j, "learner", "pretrain_iterations", l.pretrain_iterations);
  get_to(j, "learner", "finetune_iterations", l.finetune_iterations);
  get_to(j, "learner", "initial_std", l.initial_std);
}

void parse_safety(const json& j, SafetyConfig& s) {
  check_keys(j, "safety",
             {"d_safe", "t_min", "t_max", "growth_cap", "pu_floor", "variant"});
  get_to(j, "safety", "d_safe", s.d_safe);
  get_to(j, "safety", "t_min", s.t_min);
  get_to(j, "safety", "t_max", s.t_max);
  get_to(j, "safety", "growth_cap", s.growth_cap);
  get_to(j, "safety", "pu_floor", s.pu_floor);
  if (j.contains("variant")) {
    std::string name;
    get_to(j, "safety", "variant", name);
    try {
      s.variant = variant_from_string(name);
    } catch (const std::invalid_argument&) {
      fail("safety.variant", "must be one of full, v2_no_dpu1, v3_no_dpu2, "
                             "v4_neither, fixed_limit");
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (env.type != "arm" && env.type != "pointmass") {
    fail("env.type", "must be 'arm' or 'pointmass'");
  }
  if (env.u_lim < 0.0) fail("env.u_lim", "must be >= 0");
  if (env.u_prime_lim < 0.0 || env.u_prime_lim > env.u_lim) {
    fail("env.u_prime_lim", "must be in [0, env.u_lim]");
  }
  if (env.lambda_penalty < 0.0) fail("env.lambda_penalty", "must be >= 0");
  if (env.horizon < 1) fail("env.horizon", "must be >= 1");
  if (env.angle_range < 0.0) fail("env.angle_range", "must be >= 0");
  if (env.mass_factor < 1.0) fail("env.mass_factor", "must be >= 1");
  if (env.damping_factor < 1.0) fail("env.damping_factor", "must be >= 1");
  if (env.inertia_factor < 1.0) fail("env.inertia_factor", "must be >= 1");

  if (!(learner.gamma > 0.0) || learner.gamma > 1.0) {
    fail("learner.gamma", "must be in (0, 1]");
  }
  if (learner.lambda_gae < 0.0 || learner.lambda_gae > 1.0) {
    fail("learner.lambda_gae", "must be in [0, 1]");
  }
  if (!(learner.delta_kl_pretrain > 0.0)) {
    fail("learner.delta_kl_pretrain", "must be > 0");
  }
  if (!(learner.delta_kl_finetune > 0.0)) {
    fail("learner.delta_kl_finetune", "must be > 0");
  }
  if (learner.episodes_per_batch_pretrain < 1) {
    fail("learner.episodes_per_batch_pretrain", "must be >= 1");
  }
  if (learner.episodes_per_batch_finetune < 1) {
    fail("learner.episodes_per_batch_finetune", "must be >= 1");
  }
  if (learner.pretrain_iterations < 0) {
    fail("learner.pretrain_iterations", "must be >= 0");
  }
  if (learner.finetune_iterations < 0) {
    fail("learner.finetune_iterations", "must be >= 0");
  }
  if (!(learner.initial_std > 0.0)) fail("learner.initial_std", "must be > 0");

  safety.validate();

  if (seeds.empty()) fail("seeds", "must not be empty");
  if (!preset.empty() && preset != "adaptive_vs_fixed" && preset != "ablation" &&
      preset != "dsafe_sweep" && preset != "pointmass") {
    fail("preset", "unknown preset '" + preset + "'");
  }
  if (preset == "dsafe_sweep") {
    for (double d : dsafe_sweep) {
      if (!(safety.t_min < d)) {
        fail("dsafe_sweep", "every value must exceed safety.t_min");
      }
    }
  }
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["env"] = {{"type", env.type},
              {"u_lim", env.u_lim},
              {"u_prime_lim", env.u_prime_lim},
              {"lambda_penalty", env.lambda_penalty},
              {"horizon", env.horizon},
              {"angle_range", env.angle_range},
              {"mass_factor", env.mass_factor},
              {"damping_factor", env.damping_factor},
              {"inertia_factor", env.inertia_factor}};
  j["learner"] = {{"gamma", learner.gamma},
                  {"lambda_gae", learner.lambda_gae},
                  {"delta_kl_pretrain", learner.delta_kl_pretrain},
                  {"delta_kl_finetune", learner.delta_kl_finetune},
                  {"episodes_per_batch_pretrain", learner.episodes_per_batch_pretrain},
                  {"episodes_per_batch_finetune", learner.episodes_per_batch_finetune},
                  {"pretrain_iterations", learner.pretrain_iterations},
                  {"finetune_iterations", learner.finetune_iterations},
                  {"initial_std", learner.initial_std}};
  j["safety"] = {{"d_safe", safety.d_safe},
                 {"t_min", safety.t_min},
                 {"t_max", safety.t_max},
                 {"growth_cap", safety.growth_cap},
                 {"pu_floor", safety.pu_floor},
                 {"variant", to_string(safety.variant)}};
  j["seeds"] = seeds;
  j["preset"] = preset;
  j["dsafe_sweep"] = dsafe_sweep;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"env", "learner", "safety", "seeds", "preset", "dsafe_sweep"});
  ExperimentConfig cfg;
  if (j.contains("env")) parse_env(j["env"], cfg.env);
  if (j.contains("learner")) parse_learner(j["learner"], cfg.learner);
  if (j.contains("safety")) parse_safety(j["safety"], cfg.safety);
  get_to(j, "config", "seeds", cfg.seeds);
  get_to(j, "config", "preset", cfg.preset);
  get_to(j, "config", "dsafe_sweep", cfg.dsafe_sweep);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

ExperimentConfig apply_preset(ExperimentConfig cfg) {
  if (cfg.preset == "pointmass") {
    cfg.env.type = "pointmass";
    cfg.env.u_lim = 1.5;
    cfg.env.angle_range = 1.0;
    cfg.env.mass_factor = 1.0;
    cfg.env.damping_factor = 1.0;
    cfg.env.inertia_factor = 1.0;
    cfg.learner.pretrain_iterations = 0;
    // Larger batches keep the from-scratch gradient out of the noise floor.
    cfg.learner.episodes_per_batch_finetune = 20;
    cfg.safety.variant = Variant::full;
  }
  return cfg;
}

}  // namespace spt
