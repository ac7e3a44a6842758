#include "spt/rollout.hpp"

#include <numeric>
#include <stdexcept>

namespace spt {

double Trajectory::shaped_return() const {
  return std::accumulate(shaped_reward.begin(), shaped_reward.end(), 0.0);
}

double Trajectory::base_return() const {
  return std::accumulate(base_reward.begin(), base_reward.end(), 0.0);
}

int RolloutBatch::total_steps() const {
  int n = 0;
  for (const auto& t : trajectories) n += t.steps();
  return n;
}

std::vector<Eigen::VectorXd> RolloutBatch::all_features() const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(total_steps()));
  for (const auto& t : trajectories) {
    out.insert(out.end(), t.features.begin(), t.features.end());
  }
  return out;
}

namespace {

Trajectory run_episode(const PolicyParams& policy, Env& env,
                       const SafetySpec& spec, double t_lim, int horizon,
                       Rng& rng) {
  Trajectory traj;
  traj.t_lim = t_lim;
  traj.features.reserve(horizon);
  env.reset(rng);
  for (int t = 0; t < horizon; ++t) {
    const Eigen::VectorXd f = env.features(t_lim);
    const ActionDist dist = act_dist(policy, f);
    const Eigen::VectorXd raw = sample_raw(dist, rng);
    const Eigen::VectorXd applied = clamp_torque(raw, t_lim);
    const double r = env.step(applied);
    if (env.faulted()) {
      traj.faulted = true;
      break;
    }
    const double u = env.safety_value();
    traj.features.push_back(f);
    traj.raw.push_back(raw);
    traj.applied.push_back(applied);
    traj.base_reward.push_back(r);
    traj.shaped_reward.push_back(penalized_reward(r, u, spec));
    traj.safety_u.push_back(u);
    traj.violation.push_back(is_violation(u, spec) ? 1 : 0);
  }
  return traj;
}

}  // namespace

RolloutBatch collect(const PolicyParams& policy, Env& env,
                     const SafetySpec& spec, double t_lim, int n_episodes,
                     int horizon, Rng& rng) {
  if (n_episodes < 1) {
    throw std::invalid_argument("collect: n_episodes must be >= 1");
  }
  if (horizon < 1) {
    throw std::invalid_argument("collect: horizon must be >= 1");
  }
  RolloutBatch batch;
  batch.t_lim = t_lim;
  batch.horizon = horizon;
  batch.trajectories.reserve(n_episodes);
  for (int e = 0; e < n_episodes; ++e) {
    batch.trajectories.push_back(
        run_episode(policy, env, spec, t_lim, horizon, rng));
  }
  return batch;
}

RolloutBatch collect_randomized_limit(const PolicyParams& policy, Env& env,
                                      const SafetySpec& spec, double t_lo,
                                      double t_hi, int n_episodes, int horizon,
                                      Rng& rng) {
  if (n_episodes < 1) {
    throw std::invalid_argument("collect_randomized_limit: n_episodes >= 1");
  }
  RolloutBatch batch;
  batch.horizon = horizon;
  batch.t_lim = t_hi;
  batch.trajectories.reserve(n_episodes);
  for (int e = 0; e < n_episodes; ++e) {
    const double t_lim = uniform_real(rng, t_lo, t_hi);
    batch.trajectories.push_back(
        run_episode(policy, env, spec, t_lim, horizon, rng));
  }
  return batch;
}

}  // namespace spt
