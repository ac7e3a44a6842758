#include "spt/safety.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "spt/gauss.hpp"

namespace spt {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::v2_no_dpu1: return "v2_no_dpu1";
    case Variant::v3_no_dpu2: return "v3_no_dpu2";
    case Variant::v4_neither: return "v4_neither";
    case Variant::fixed_limit: return "fixed_limit";
  }
  return "full";
}

Variant variant_from_string(const std::string& s) {
  if (s == "full") return Variant::full;
  if (s == "v2_no_dpu1") return Variant::v2_no_dpu1;
  if (s == "v3_no_dpu2") return Variant::v3_no_dpu2;
  if (s == "v4_neither") return Variant::v4_neither;
  if (s == "fixed_limit") return Variant::fixed_limit;
  throw std::invalid_argument("unknown safety variant: " + s);
}

void SafetyConfig::validate() const {
  if (!(t_min > 0.0)) {
    throw std::invalid_argument("safety.t_min: must be > 0");
  }
  if (!(t_min < t_max)) {
    throw std::invalid_argument("safety.t_min: must be < safety.t_max");
  }
  if (!(t_min < d_safe)) {
    // Guarantees p_u * t_min < d_safe even at p_u = 1.
    throw std::invalid_argument("safety.t_min: must be < safety.d_safe");
  }
  if (!(growth_cap > 1.0)) {
    throw std::invalid_argument("safety.growth_cap: must be > 1");
  }
  if (!(pu_floor > 0.0) || pu_floor > 1.0) {
    throw std::invalid_argument("safety.pu_floor: must be in (0, 1]");
  }
}

double empirical_unsafety(const RolloutBatch& batch) {
  if (batch.trajectories.empty()) {
    throw std::invalid_argument("empirical_unsafety: empty batch");
  }
  long violations = 0;
  long total = 0;
  for (const auto& traj : batch.trajectories) {
    for (const auto v : traj.violation) violations += v;
    if (traj.faulted) {
      // Conservative: every step the faulted episode did not run is unsafe.
      violations += batch.horizon - traj.steps();
      total += batch.horizon;
    } else {
      total += traj.steps();
    }
  }
  return static_cast<double>(violations) / static_cast<double>(total);
}

double delta_pu1(const RolloutBatch& batch, const PolicyParams& policy,
                 double t_lim) {
  double sum = 0.0;
  long n = 0;
  for (const auto& traj : batch.trajectories) {
    for (const auto& f : traj.features) {
      const ActionDist dist = act_dist(policy, f);
      double per_state = 0.0;
      for (int j = 0; j < policy.action_dim(); ++j) {
        per_state += tail_mass(GaussParams(dist.mean[j], dist.std[j]), t_lim);
      }
      sum += std::min(per_state, 1.0);
      ++n;
    }
  }
  if (n == 0) return 0.0;
  return sum / static_cast<double>(n);
}

double delta_pu2(const RolloutBatch& batch, const PolicyParams& policy,
                 double delta_kl) {
  if (delta_kl < 0.0) {
    throw std::invalid_argument("delta_pu2: delta_kl must be >= 0");
  }
  const int joints = policy.action_dim();
  const double per_joint_kl = delta_kl / joints;
  double sum = 0.0;
  long n = 0;
  for (const auto& traj : batch.trajectories) {
    for (const auto& f : traj.features) {
      const ActionDist dist = act_dist(policy, f);
      double per_state = 0.0;
      for (int j = 0; j < joints; ++j) {
        per_state += 1.0 - intersection_area(dist.std[j], per_joint_kl);
      }
      sum += std::min(per_state, 1.0);
      ++n;
    }
  }
  if (n == 0) return 0.0;
  // Equals 1 - mean per-state intersection area.
  return sum / static_cast<double>(n);
}

double predict_unsafety(double p_u, double dpu1, double dpu2, Variant variant,
                        double pu_floor) {
  double pred = p_u;
  switch (variant) {
    case Variant::full: pred = p_u + dpu1 + dpu2; break;
    case Variant::v2_no_dpu1: pred = p_u + dpu2; break;
    case Variant::v3_no_dpu2: pred = p_u + dpu1; break;
    case Variant::v4_neither:
    case Variant::fixed_limit: pred = p_u; break;
  }
  return std::clamp(pred, pu_floor, 1.0);
}

double update_torque_limit(double p_u_pred, double t_lim_current,
                           const SafetyConfig& cfg) {
  if (cfg.variant == Variant::fixed_limit) {
    return t_lim_current;
  }
  const double raw = cfg.d_safe / p_u_pred;
  // Increases are rate-limited; decreases take effect immediately.
  const double capped = std::min(raw, cfg.growth_cap * t_lim_current);
  return std::clamp(capped, cfg.t_min, cfg.t_max);
}

double expected_damage(double p_u, double t_lim) { return p_u * t_lim; }

SafetyReport run_iteration(const PolicyParams& updated_policy,
                           const RolloutBatch& batch, double t_lim,
                           const SafetyConfig& cfg, double delta_kl) {
  SafetyReport report;
  report.p_u = empirical_unsafety(batch);
  report.delta_pu1 = delta_pu1(batch, updated_policy, t_lim);
  report.delta_pu2 = delta_pu2(batch, updated_policy, delta_kl);
  report.p_u_pred = predict_unsafety(report.p_u, report.delta_pu1,
                                     report.delta_pu2, cfg.variant,
                                     cfg.pu_floor);
  report.t_lim_next = update_torque_limit(report.p_u_pred, t_lim, cfg);
  report.expected_damage = expected_damage(report.p_u, t_lim);
  assert(cfg.variant == Variant::fixed_limit ||
         report.p_u_pred * report.t_lim_next <= cfg.d_safe + 1e-12);
  return report;
}

}  // namespace spt
