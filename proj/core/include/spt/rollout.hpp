#ifndef SPT_ROLLOUT_HPP_
#define SPT_ROLLOUT_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "spt/env.hpp"
#include "spt/policy.hpp"

namespace spt {

// Per-step records of one episode. applied = clamp(raw, t_lim); the violation
// flag matches is_violation(safety_u). A faulted episode stops early; its
// remaining steps count as violations in the safety estimates.
struct Trajectory {
  std::vector<Eigen::VectorXd> features;
  std::vector<Eigen::VectorXd> raw;
  std::vector<Eigen::VectorXd> applied;
  std::vector<double> shaped_reward;
  std::vector<double> base_reward;
  std::vector<double> safety_u;
  std::vector<std::uint8_t> violation;
  double t_lim = 0.0;
  bool faulted = false;

  int steps() const { return static_cast<int>(shaped_reward.size()); }
  double shaped_return() const;
  double base_return() const;
};

struct RolloutBatch {
  std::vector<Trajectory> trajectories;
  double t_lim = 0.0;  // shared limit; pre-train batches vary it per episode
  int horizon = 0;
  std::uint64_t seed = 0;
  int policy_snapshot = 0;

  int total_steps() const;
  // Flattened feature vectors of every visited state, episode order.
  std::vector<Eigen::VectorXd> all_features() const;
};

// Rolls n_episodes of the policy at a fixed torque limit. Sampling, clamping,
// stepping and reward shaping per step; deterministic under the rng.
RolloutBatch collect(const PolicyParams& policy, Env& env,
                     const SafetySpec& spec, double t_lim, int n_episodes,
                     int horizon, Rng& rng);

// Pre-training variant: each episode draws its torque limit uniformly from
// [t_lo, t_hi] so the policy sees the limit range it will meet at test time.
RolloutBatch collect_randomized_limit(const PolicyParams& policy, Env& env,
                                      const SafetySpec& spec, double t_lo,
                                      double t_hi, int n_episodes, int horizon,
                                      Rng& rng);

}  // namespace spt

#endif  // SPT_ROLLOUT_HPP_
