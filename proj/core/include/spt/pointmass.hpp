#ifndef SPT_POINTMASS_HPP_
#define SPT_POINTMASS_HPP_

#include "spt/env.hpp"

namespace spt {

// 1-D point mass on a short rail pushed by a bounded force. Exists for
// learner smoke tests; the safety value is the distance from the origin.
// The rail ends are dead stops: contact zeroes the velocity, which keeps the
// state space bounded whatever the policy does.
struct PointMassModel {
  double mass = 1.0;           // kg
  double damping = 0.2;        // N·s/m
  double dt = 0.05;            // s
  double position_limit = 3.0; // m, rail half-length
};

class PointMassEnv final : public Env {
 public:
  PointMassEnv(PointMassModel model, double start_range);

  int action_dim() const override { return 1; }
  int feature_dim() const override { return 4; }
  void reset(Rng& rng) override;
  Eigen::VectorXd features(double t_lim) const override;
  double step(const Eigen::VectorXd& applied) override;
  double safety_value() const override;
  bool faulted() const override { return fault_; }
  std::unique_ptr<Env> clone() const override;

  double position() const { return x_; }
  double velocity() const { return v_; }

 private:
  PointMassModel model_;
  double start_range_;
  double x_ = 0.0;
  double v_ = 0.0;
  bool fault_ = false;
};

}  // namespace spt

#endif  // SPT_POINTMASS_HPP_
