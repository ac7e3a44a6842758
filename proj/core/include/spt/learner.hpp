#ifndef SPT_LEARNER_HPP_
#define SPT_LEARNER_HPP_

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "spt/rollout.hpp"

namespace spt {

struct GaeConfig {
  double gamma = 0.95;       // in [0, 1]
  double lambda_gae = 0.98;  // in [0, 1]
  void validate() const;
};

// State-value estimate used for TD residuals, indexed by (features, step).
using ValueFn = std::function<double(const Eigen::VectorXd&, int)>;

// Least-squares value baseline on [features, t, t^2, 1], ridge-regularized.
class LinearBaseline {
 public:
  LinearBaseline() = default;

  static LinearBaseline zero(int feature_dim);
  // Fits the discounted shaped return-to-go of the batch.
  static LinearBaseline fit(const RolloutBatch& batch, const GaeConfig& cfg);

  double predict(const Eigen::VectorXd& features, int t) const;
  ValueFn as_value_fn() const;

 private:
  Eigen::VectorXd coef_;  // empty => predicts 0
};

// Per-trajectory, per-step advantages. raw = plain GAE(gamma, lambda)
// recursion over TD residuals of the shaped reward; the non-raw variant is
// normalized to zero mean and unit variance across the batch.
std::vector<std::vector<double>> gae_advantages_raw(const RolloutBatch& batch,
                                                    const GaeConfig& cfg,
                                                    const ValueFn& baseline);
std::vector<std::vector<double>> gae_advantages(const RolloutBatch& batch,
                                                const GaeConfig& cfg,
                                                const ValueFn& baseline);

// Score-function gradient of the surrogate objective at the sampling policy:
// mean over steps of grad_log_prob(s, a) * advantage.
Eigen::VectorXd policy_gradient(
    const RolloutBatch& batch,
    const std::vector<std::vector<double>>& advantages,
    const PolicyParams& policy);

struct UpdateResult {
  PolicyParams params;
  double achieved_kl = 0.0;
  bool accepted = false;  // false => returned params equal the old ones
};

// Ascent step along `gradient` with backtracking on the mean KL: the step is
// halved (up to 30 times) until mean_kl(old, new, batch states) <= delta_kl.
// Guarantees achieved_kl <= delta_kl; a stalled update returns the old
// parameters with achieved_kl = 0. exp(log_std) is floored at kStdFloor.
UpdateResult kl_constrained_update(const PolicyParams& policy,
                                   const Eigen::VectorXd& gradient,
                                   const RolloutBatch& batch, double delta_kl);

}  // namespace spt

#endif  // SPT_LEARNER_HPP_
