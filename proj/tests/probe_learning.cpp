// Scratch probe for learner behavior; not part of the build.
#include <cstdio>

#include "spt/learner.hpp"
#include "spt/pointmass.hpp"

using namespace spt;

int main() {
  const SafetySpec spec{1.5, 0.0, 1e-3};
  const GaeConfig gae{0.95, 0.98};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PointMassEnv env(PointMassModel{}, 1.0);
    PolicyParams policy(1, 4, 0.5);
    std::printf("seed %llu:\n", (unsigned long long)seed);
    for (int k = 0; k < 51; ++k) {
      Rng rng = make_rng(seed, 999, (std::uint64_t)k);
      const RolloutBatch batch = collect(policy, env, spec, 1.0, 5, 200, rng);
      double ret = 0.0;
      for (const auto& t : batch.trajectories) ret += t.shaped_return();
      ret /= batch.trajectories.size();
      const LinearBaseline baseline = LinearBaseline::fit(batch, gae);
      const auto adv = gae_advantages(batch, gae, baseline.as_value_fn());
      const Eigen::VectorXd grad = policy_gradient(batch, adv, policy);
      UpdateResult upd = kl_constrained_update(policy, grad, batch, 0.05);
      if (k % 5 == 0 || k < 5) {
        std::printf(
            "  it %3d ret %8.2f kl %.4f |g| %7.3f w=[%6.2f %6.2f %6.2f %6.2f] "
            "std %.3f\n",
            k, ret, upd.achieved_kl, grad.norm(), policy.weights(0, 0),
            policy.weights(0, 1), policy.weights(0, 2), policy.weights(0, 3),
            std::exp(policy.log_std[0]));
      }
      policy = upd.params;
    }
  }
  return 0;
}
