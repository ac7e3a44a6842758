#ifndef SPT_SAFETY_HPP_
#define SPT_SAFETY_HPP_

#include <string>

#include "spt/rollout.hpp"

namespace spt {

// Prediction variants: `full` uses both correction terms; v2/v3/v4 ablate
// them; fixed_limit disables the controller entirely (constant limit).
enum class Variant { full, v2_no_dpu1, v3_no_dpu2, v4_neither, fixed_limit };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct SafetyConfig {
  double d_safe = 0.5;      // expected-damage budget
  double t_min = 0.1;       // N·m; must stay below d_safe
  double t_max = 3.0;       // N·m
  double growth_cap = 1.05; // max per-iteration limit increase ratio
  double pu_floor = 1e-3;   // keeps d_safe / p'_u finite
  Variant variant = Variant::full;

  void validate() const;  // throws std::invalid_argument with a field path
};

// One iteration's safety ledger.
struct SafetyReport {
  double p_u = 0.0;
  double delta_pu1 = 0.0;
  double delta_pu2 = 0.0;
  double p_u_pred = 0.0;
  double t_lim_next = 0.0;
  double expected_damage = 0.0;
};

// Fraction of violating timesteps in the batch. Faulted episodes count every
// missing step (up to the horizon) as a violation.
double empirical_unsafety(const RolloutBatch& batch);

// Worst-case unsafety increase from moving the torque limit: the average over
// visited states of the probability mass the policy places outside
// [-t_lim, t_lim], joints combined by a union bound (sum, capped at 1).
// `t_lim` is the limit in force when the batch was collected; `policy` is the
// freshly updated policy that will act next.
double delta_pu1(const RolloutBatch& batch, const PolicyParams& policy,
                 double t_lim);

// Worst-case unsafety increase from the policy update: one minus the average
// per-state overlap of the old and new action Gaussians under the KL budget,
// the budget split equally across joints, joints combined by a union bound.
double delta_pu2(const RolloutBatch& batch, const PolicyParams& policy,
                 double delta_kl);

// p'_u per variant, clamped to [pu_floor, 1].
double predict_unsafety(double p_u, double dpu1, double dpu2, Variant variant,
                        double pu_floor);

// d_safe / p'_u, increases capped at growth_cap per iteration (decreases are
// immediate), clamped to [t_min, t_max]. fixed_limit returns the current
// limit unchanged.
double update_torque_limit(double p_u_pred, double t_lim_current,
                           const SafetyConfig& cfg);

double expected_damage(double p_u, double t_lim);

// Composes the per-iteration safety computation. The caller has already
// updated the policy from the same batch; `delta_kl` is the trust-region
// budget the update respected.
SafetyReport run_iteration(const PolicyParams& updated_policy,
                           const RolloutBatch& batch, double t_lim,
                           const SafetyConfig& cfg, double delta_kl);

}  // namespace spt

#endif  // SPT_SAFETY_HPP_
