#include "spt/learner.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace spt {

namespace {
constexpr double kRidge = 1e-5;
constexpr int kMaxHalvings = 30;
constexpr double kInitialStepScale = 0.1;

Eigen::VectorXd baseline_row(const Eigen::VectorXd& features, int t) {
  Eigen::VectorXd row(features.size() + 3);
  const double td = static_cast<double>(t);
  row << features, td, td * td, 1.0;
  return row;
}
}  // namespace

void GaeConfig::validate() const {
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("GaeConfig.gamma must be in [0, 1]");
  }
  if (lambda_gae < 0.0 || lambda_gae > 1.0) {
    throw std::invalid_argument("GaeConfig.lambda_gae must be in [0, 1]");
  }
}

LinearBaseline LinearBaseline::zero(int) { return LinearBaseline{}; }

LinearBaseline LinearBaseline::fit(const RolloutBatch& batch,
                                   const GaeConfig& cfg) {
  cfg.validate();
  const int n = batch.total_steps();
  if (n == 0) {
    return LinearBaseline{};
  }
  const int d = static_cast<int>(batch.trajectories.front().features.front().size()) + 3;
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  int row = 0;
  for (const auto& traj : batch.trajectories) {
    // Discounted return-to-go of the shaped reward.
    double rtg = 0.0;
    std::vector<double> targets(traj.steps());
    for (int t = traj.steps() - 1; t >= 0; --t) {
      rtg = traj.shaped_reward[t] + cfg.gamma * rtg;
      targets[t] = rtg;
    }
    for (int t = 0; t < traj.steps(); ++t) {
      x.row(row) = baseline_row(traj.features[t], t);
      y[row] = targets[t];
      ++row;
    }
  }
  // Ridge via QR on the stacked system [x; sqrt(ridge) I] — avoids squaring
  // the condition number of the t/t^2 columns in the normal equations.
  Eigen::MatrixXd stacked(n + d, d);
  stacked.topRows(n) = x;
  stacked.bottomRows(d) =
      std::sqrt(kRidge) * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + d);
  rhs.head(n) = y;
  LinearBaseline b;
  b.coef_ = stacked.colPivHouseholderQr().solve(rhs);
  return b;
}

double LinearBaseline::predict(const Eigen::VectorXd& features, int t) const {
  if (coef_.size() == 0) return 0.0;
  return coef_.dot(baseline_row(features, t));
}

ValueFn LinearBaseline::as_value_fn() const {
  return [*this](const Eigen::VectorXd& f, int t) { return predict(f, t); };
}

std::vector<std::vector<double>> gae_advantages_raw(const RolloutBatch& batch,
                                                    const GaeConfig& cfg,
                                                    const ValueFn& baseline) {
  cfg.validate();
  std::vector<std::vector<double>> out;
  out.reserve(batch.trajectories.size());
  for (const auto& traj : batch.trajectories) {
    const int n = traj.steps();
    std::vector<double> adv(n, 0.0);
    double next_value = 0.0;  // terminal value
    double acc = 0.0;
    for (int t = n - 1; t >= 0; --t) {
      const double value = baseline(traj.features[t], t);
      const double delta = traj.shaped_reward[t] + cfg.gamma * next_value - value;
      acc = delta + cfg.gamma * cfg.lambda_gae * acc;
      adv[t] = acc;
      next_value = value;
    }
    out.push_back(std::move(adv));
  }
  return out;
}

std::vector<std::vector<double>> gae_advantages(const RolloutBatch& batch,
                                                const GaeConfig& cfg,
                                                const ValueFn& baseline) {
  auto adv = gae_advantages_raw(batch, cfg, baseline);
  double sum = 0.0;
  int n = 0;
  for (const auto& a : adv) {
    for (double v : a) {
      sum += v;
      ++n;
    }
  }
  if (n == 0) return adv;
  const double mean = sum / n;
  double var = 0.0;
  for (const auto& a : adv) {
    for (double v : a) var += (v - mean) * (v - mean);
  }
  const double std = std::sqrt(var / n);
  for (auto& a : adv) {
    for (double& v : a) v = (v - mean) / (std + 1e-8);
  }
  return adv;
}

Eigen::VectorXd policy_gradient(
    const RolloutBatch& batch,
    const std::vector<std::vector<double>>& advantages,
    const PolicyParams& policy) {
  if (advantages.size() != batch.trajectories.size()) {
    throw std::invalid_argument("policy_gradient: advantage shape mismatch");
  }
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(policy.param_count());
  int n = 0;
  for (size_t i = 0; i < batch.trajectories.size(); ++i) {
    const auto& traj = batch.trajectories[i];
    if (advantages[i].size() != static_cast<size_t>(traj.steps())) {
      throw std::invalid_argument("policy_gradient: advantage shape mismatch");
    }
    for (int t = 0; t < traj.steps(); ++t) {
      grad += advantages[i][t] *
              grad_log_prob(policy, traj.features[t], traj.raw[t]);
      ++n;
    }
  }
  if (n > 0) grad /= static_cast<double>(n);
  return grad;
}

UpdateResult kl_constrained_update(const PolicyParams& policy,
                                   const Eigen::VectorXd& gradient,
                                   const RolloutBatch& batch, double delta_kl) {
  if (!(delta_kl > 0.0)) {
    throw std::invalid_argument("kl_constrained_update: delta_kl must be > 0");
  }
  const auto states = batch.all_features();
  const Eigen::VectorXd theta = policy.flatten();
  const double log_floor = std::log(kStdFloor);
  double alpha = kInitialStepScale / (gradient.norm() + 1e-8);
  for (int i = 0; i <= kMaxHalvings; ++i, alpha *= 0.5) {
    PolicyParams candidate = PolicyParams::unflatten(
        theta + alpha * gradient, policy.action_dim(), policy.feature_dim());
    candidate.log_std = candidate.log_std.cwiseMax(log_floor);
    const double kl = mean_kl(policy, candidate, states);
    if (kl <= delta_kl) {
      return UpdateResult{std::move(candidate), kl, true};
    }
  }
  return UpdateResult{policy, 0.0, false};
}

}  // namespace spt
