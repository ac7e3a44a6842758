#ifndef SPT_POLICY_HPP_
#define SPT_POLICY_HPP_

#include <Eigen/Core>
#include <string>
#include <vector>

#include "spt/env.hpp"
#include "spt/rng.hpp"

namespace spt {

// Per-joint Gaussian over raw torques at one state.
struct ActionDist {
  Eigen::VectorXd mean;  // N·m
  Eigen::VectorXd std;   // N·m, > 0 componentwise
};

// Linear-in-features diagonal-Gaussian policy with state-independent log-std.
// mean = weights * features + bias, std = exp(log_std). Immutable by
// convention: updates produce new values.
struct PolicyParams {
  Eigen::MatrixXd weights;  // action_dim x feature_dim
  Eigen::VectorXd bias;     // action_dim
  Eigen::VectorXd log_std;  // action_dim

  PolicyParams(int action_dim, int feature_dim, double initial_std);

  int action_dim() const { return static_cast<int>(bias.size()); }
  int feature_dim() const { return static_cast<int>(weights.cols()); }
  int param_count() const {
    return action_dim() * (feature_dim() + 1) + action_dim();
  }

  // Lossless round trip: [weights row-major, bias, log_std].
  Eigen::VectorXd flatten() const;
  static PolicyParams unflatten(const Eigen::VectorXd& theta, int action_dim,
                                int feature_dim);
};

// Std floor applied during parameter updates, N·m.
inline constexpr double kStdFloor = 1e-4;

// Arm feature vector: [sin a1, cos a1, sin a2, cos a2, v1, v2, t_lim, 1].
Eigen::VectorXd arm_features(const EnvState& state, double t_lim);

// Throws std::invalid_argument on dimension mismatch.
ActionDist act_dist(const PolicyParams& params,
                    const Eigen::VectorXd& features);

// Componentwise independent Gaussian draws (raw, pre-truncation).
Eigen::VectorXd sample_raw(const ActionDist& dist, Rng& rng);

// Componentwise clamp to [-t_lim, t_lim]; idempotent.
Eigen::VectorXd clamp_torque(const Eigen::VectorXd& raw, double t_lim);

// Sum over dimensions of the scalar Gaussian log-density of the raw action.
double log_prob(const ActionDist& dist, const Eigen::VectorXd& raw);

// Gradient of log_prob with respect to the flattened parameters.
Eigen::VectorXd grad_log_prob(const PolicyParams& params,
                              const Eigen::VectorXd& features,
                              const Eigen::VectorXd& raw);

// Average over states of the summed per-dimension Gaussian KL between the
// two parameter sets. Throws on an empty state list.
double mean_kl(const PolicyParams& old_params, const PolicyParams& new_params,
               const std::vector<Eigen::VectorXd>& states_features);

// Checkpoint format: {"dims": {...}, "weights": row-major, "bias", "log_std"}.
std::string policy_to_json(const PolicyParams& params);
PolicyParams policy_from_json(const std::string& text);

}  // namespace spt

#endif  // SPT_POLICY_HPP_
