#include "spt/env.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spt/policy.hpp"

namespace spt {

namespace {

double wrap_to_pi(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

}  // namespace

Eigen::Vector2d end_effector(const ArmModel& model, const EnvState& state) {
  const double l1 = model.link_lengths[0];
  const double l2 = model.link_lengths[1];
  const double a1 = state.angles[0];
  const double a12 = state.angles[0] + state.angles[1];
  return {l1 * std::sin(a1) + l2 * std::sin(a12),
          -l1 * std::cos(a1) - l2 * std::cos(a12)};
}

Eigen::Vector2d reference_point(const ArmModel& model, int t) {
  const double phi =
      2.0 * std::numbers::pi * static_cast<double>(t) / kSwirlPeriodSteps;
  const double l1 = model.link_lengths[0];
  const double l2 = model.link_lengths[1];
  // Circle centred on the zero-tilt pose with the shoulder at
  // kSwirlPoseAngle and the distal link hanging vertically. Holding the
  // centre takes about half a newton-metre on the shoulder, so the
  // attainable reward grows with the torque limit, and the best phase-blind
  // strategy (hold the centre) is a safe one.
  const double cx = l1 * std::sin(kSwirlPoseAngle);
  const double cy = -l2 - l1 * std::cos(kSwirlPoseAngle);
  return {cx - kSwirlRadius * std::cos(phi), cy - kSwirlRadius * std::sin(phi)};
}

StepResult step(const ArmModel& model, const EnvState& state,
                const Eigen::Vector2d& applied) {
  const double m1 = model.link_masses[0];
  const double m2 = model.link_masses[1];
  const double l1 = model.link_lengths[0];
  const double l2 = model.link_lengths[1];
  const double lc1 = 0.5 * l1;
  const double lc2 = 0.5 * l2;
  const double i1 = model.inertia_scale * m1 * l1 * l1 / 12.0;
  const double i2 = model.inertia_scale * m2 * l2 * l2 / 12.0;
  const double g = model.gravity;

  const double c2 = std::cos(state.angles[1]);
  const double s2 = std::sin(state.angles[1]);
  const double v1 = state.velocities[0];
  const double v2 = state.velocities[1];

  Eigen::Matrix2d mass;
  mass(0, 0) = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * c2) +
               i1 + i2;
  mass(0, 1) = m2 * (lc2 * lc2 + l1 * lc2 * c2) + i2;
  mass(1, 0) = mass(0, 1);
  mass(1, 1) = m2 * lc2 * lc2 + i2;

  const double h = -m2 * l1 * lc2 * s2;
  Eigen::Vector2d coriolis{h * v2 * v2 + 2.0 * h * v1 * v2, -h * v1 * v1};

  const double s1 = std::sin(state.angles[0]);
  const double s12 = std::sin(state.angles[0] + state.angles[1]);
  Eigen::Vector2d grav{(m1 * lc1 + m2 * l1) * g * s1 + m2 * lc2 * g * s12,
                       m2 * lc2 * g * s12};

  // Semi-implicit Euler with the damping term taken implicitly:
  //   (M + dt D) v' = M v + dt (tau - C v - G)
  // keeps the integrator stable on the lightly-inertial test models.
  const Eigen::Matrix2d lhs =
      mass + model.dt * model.damping.asDiagonal().toDenseMatrix();
  const Eigen::Vector2d rhs =
      mass * state.velocities + model.dt * (applied - coriolis - grav);

  StepResult out;
  out.state.velocities = lhs.ldlt().solve(rhs);
  out.state.velocities = out.state.velocities.cwiseMax(-kVelocityLimit)
                             .cwiseMin(kVelocityLimit);
  out.state.angles = state.angles + model.dt * out.state.velocities;
  out.state.t = state.t + 1;

  // Joint stops: clamp and kill the joint's velocity on contact.
  if (std::abs(out.state.angles[0]) > model.shoulder_stop) {
    out.state.angles[0] = std::clamp(out.state.angles[0], -model.shoulder_stop,
                                     model.shoulder_stop);
    out.state.velocities[0] = 0.0;
  }
  if (out.state.angles[1] < model.elbow_range[0] ||
      out.state.angles[1] > model.elbow_range[1]) {
    out.state.angles[1] = std::clamp(out.state.angles[1], model.elbow_range[0],
                                     model.elbow_range[1]);
    out.state.velocities[1] = 0.0;
  }

  if (!out.state.angles.allFinite() || !out.state.velocities.allFinite()) {
    out.fault = true;
    out.base_reward = 0.0;
    return out;
  }

  const Eigen::Vector2d err =
      end_effector(model, out.state) - reference_point(model, out.state.t);
  out.base_reward = -err.squaredNorm();
  return out;
}

double safety_value(const EnvState& state) {
  return std::abs(wrap_to_pi(state.angles[0] + state.angles[1]));
}

bool is_violation(double u, const SafetySpec& spec) { return u > spec.u_lim; }

double penalized_reward(double r, double u, const SafetySpec& spec) {
  const double excess = std::max(0.0, u - spec.u_prime_lim);
  return r - spec.lambda_penalty * excess * excess;
}

double mechanical_energy(const ArmModel& model, const EnvState& state) {
  const double m1 = model.link_masses[0];
  const double m2 = model.link_masses[1];
  const double l1 = model.link_lengths[0];
  const double l2 = model.link_lengths[1];
  const double lc1 = 0.5 * l1;
  const double lc2 = 0.5 * l2;
  const double i1 = model.inertia_scale * m1 * l1 * l1 / 12.0;
  const double i2 = model.inertia_scale * m2 * l2 * l2 / 12.0;

  const double c2 = std::cos(state.angles[1]);
  Eigen::Matrix2d mass;
  mass(0, 0) = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * c2) +
               i1 + i2;
  mass(0, 1) = m2 * (lc2 * lc2 + l1 * lc2 * c2) + i2;
  mass(1, 0) = mass(0, 1);
  mass(1, 1) = m2 * lc2 * lc2 + i2;
  const double kinetic =
      0.5 * state.velocities.dot(mass * state.velocities);

  const double c1 = std::cos(state.angles[0]);
  const double c12 = std::cos(state.angles[0] + state.angles[1]);
  // Potential relative to the hanging rest configuration.
  const double potential = m1 * model.gravity * lc1 * (1.0 - c1) +
                           m2 * model.gravity *
                               (l1 * (1.0 - c1) + lc2 * (1.0 - c12));
  return kinetic + potential;
}

ArmModel make_train_model() { return ArmModel{}; }

ArmModel make_test_model(double mass_factor, double damping_factor,
                         double inertia_factor) {
  if (mass_factor < 1.0 || damping_factor < 1.0 || inertia_factor < 1.0) {
    throw std::invalid_argument("make_test_model: factors must be >= 1");
  }
  ArmModel m = make_train_model();
  m.link_masses /= mass_factor;
  m.damping /= damping_factor;
  m.inertia_scale /= inertia_factor;
  return m;
}

EnvState initial_state(Rng& rng, double angle_range) {
  if (angle_range < 0.0) {
    throw std::invalid_argument("initial_state: angle_range must be >= 0");
  }
  EnvState s;
  s.angles[0] = uniform_real(rng, -angle_range, angle_range);
  s.angles[1] = uniform_real(rng, -angle_range, angle_range);
  return s;
}

ArmEnv::ArmEnv(ArmModel model, double angle_range)
    : model_(model), angle_range_(angle_range) {}

void ArmEnv::reset(Rng& rng) {
  state_ = initial_state(rng, angle_range_);
  fault_ = false;
}

Eigen::VectorXd ArmEnv::features(double t_lim) const {
  return arm_features(state_, t_lim);
}

double ArmEnv::step(const Eigen::VectorXd& applied) {
  StepResult r = spt::step(model_, state_, Eigen::Vector2d(applied));
  state_ = r.state;
  fault_ = fault_ || r.fault;
  return r.base_reward;
}

double ArmEnv::safety_value() const { return spt::safety_value(state_); }

std::unique_ptr<Env> ArmEnv::clone() const {
  return std::make_unique<ArmEnv>(*this);
}

}  // namespace spt
