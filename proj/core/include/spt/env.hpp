#ifndef SPT_ENV_HPP_
#define SPT_ENV_HPP_

#include <Eigen/Core>
#include <memory>

#include "spt/rng.hpp"

namespace spt {

// Dynamics parameters of the 2-link planar arm. Links are uniform rods whose
// rotational inertia is inflated by inertia_scale to stand in for geared
// joints (reflected rotor inertia); the test model divides masses, damping
// and inertias to create a train/test mismatch.
struct ArmModel {
  Eigen::Vector2d link_masses{0.6, 0.4};     // kg
  Eigen::Vector2d link_lengths{0.15, 0.45};  // m
  Eigen::Vector2d damping{0.4, 0.4};         // N·m·s/rad
  double inertia_scale = 20.0;               // multiplier on rod inertias
  double gravity = 9.81;                     // m/s^2
  double dt = 0.05;                          // s
  // Mechanical joint stops (dead stops, joint velocity zeroed on contact).
  // The one-sided elbow range rules out the elbow-in mirror pose, so targets
  // in the right half-plane have a unique, low-tilt reaching solution. Stops
  // are hardware constants: the test model does not scale them.
  double shoulder_stop = 2.6;                  // rad, symmetric
  Eigen::Vector2d elbow_range{-2.6, 0.0};      // rad
};

// Joint state. Angles are measured from straight-down; velocities are
// hard-clamped to |v| <= 50 rad/s inside step() as a numerical rail.
struct EnvState {
  Eigen::Vector2d angles = Eigen::Vector2d::Zero();      // rad
  Eigen::Vector2d velocities = Eigen::Vector2d::Zero();  // rad/s
  int t = 0;
};

// Tilt thresholds and penalty weight for the shaped reward.
struct SafetySpec {
  double u_lim = 0.2;          // violation threshold, rad
  double u_prime_lim = 0.0;    // penalty onset, rad; <= u_lim
  double lambda_penalty = 1e-3;
};

struct StepResult {
  EnvState state;
  double base_reward = 0.0;
  bool fault = false;  // non-finite state after integration
};

// Number of steps per reference revolution; one revolution per episode at the
// default 200-step horizon.
inline constexpr int kSwirlPeriodSteps = 200;
inline constexpr double kSwirlRadius = 0.15;  // m
// Shoulder angle of the pose the reference circle is centred on.
inline constexpr double kSwirlPoseAngle = 0.5;  // rad
inline constexpr double kVelocityLimit = 50.0;  // rad/s

// End-effector position, base frame, y down-negative.
Eigen::Vector2d end_effector(const ArmModel& model, const EnvState& state);

// Reference the reward tracks: a circle of radius kSwirlRadius centred one
// distal-link length above the fully-extended end-effector, traversed once
// per kSwirlPeriodSteps. With these link lengths the circle coincides with
// the zero-tilt reachable set, so perfect tracking is possible at zero tilt.
Eigen::Vector2d reference_point(const ArmModel& model, int t);

// Semi-implicit Euler step. base_reward = -|ee(state') - ref(state'.t)|^2.
// The caller is responsible for clamping torques beforehand.
StepResult step(const ArmModel& model, const EnvState& state,
                const Eigen::Vector2d& applied);

// Tilt of the distal link from vertical, |angle1 + angle2| wrapped to [0, pi].
double safety_value(const EnvState& state);

bool is_violation(double u, const SafetySpec& spec);

// r' = r - lambda * max(0, u - u'_lim)^2
double penalized_reward(double r, double u, const SafetySpec& spec);

// Total mechanical energy relative to the hanging rest state (test oracle
// support for the zero-torque, zero-damping case).
double mechanical_energy(const ArmModel& model, const EnvState& state);

ArmModel make_train_model();

// Train model with masses/damping/inertia divided by the given factors.
ArmModel make_test_model(double mass_factor = 10.0, double damping_factor = 10.0,
                         double inertia_factor = 10.0);

// Angles uniform in [-angle_range, angle_range] per joint, zero velocities.
EnvState initial_state(Rng& rng, double angle_range);

// Rollout-facing interface: an environment owns its state, exposes features
// of the current state (torque limit included as an input), and reports the
// safety value after each step.
class Env {
 public:
  virtual ~Env() = default;
  virtual int action_dim() const = 0;
  virtual int feature_dim() const = 0;
  virtual void reset(Rng& rng) = 0;
  virtual Eigen::VectorXd features(double t_lim) const = 0;
  // Applies the (already clamped) torque, advances one step, returns the base
  // reward. Sets the fault flag if integration produced a non-finite state.
  virtual double step(const Eigen::VectorXd& applied) = 0;
  virtual double safety_value() const = 0;
  virtual bool faulted() const = 0;
  virtual std::unique_ptr<Env> clone() const = 0;
};

class ArmEnv final : public Env {
 public:
  ArmEnv(ArmModel model, double angle_range);

  int action_dim() const override { return 2; }
  int feature_dim() const override { return 8; }
  void reset(Rng& rng) override;
  Eigen::VectorXd features(double t_lim) const override;
  double step(const Eigen::VectorXd& applied) override;
  double safety_value() const override;
  bool faulted() const override { return fault_; }
  std::unique_ptr<Env> clone() const override;

  const EnvState& state() const { return state_; }
  const ArmModel& model() const { return model_; }

 private:
  ArmModel model_;
  double angle_range_;
  EnvState state_;
  bool fault_ = false;
};

}  // namespace spt

#endif  // SPT_ENV_HPP_
