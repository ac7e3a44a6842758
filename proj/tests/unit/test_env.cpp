#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spt/env.hpp"

using namespace spt;

TEST_CASE("equilibrium: zero torque, zero gravity, zero velocity") {
  ArmModel model = make_train_model();
  model.gravity = 0.0;
  EnvState s;
  s.angles << 0.3, -0.2;
  const StepResult r = step(model, s, Eigen::Vector2d::Zero());
  CHECK(r.state.angles == s.angles);
  CHECK(r.state.velocities == s.velocities);
  CHECK(r.state.t == 1);
  CHECK_FALSE(r.fault);
}

TEST_CASE("energy drift stays within 1% without torque and damping") {
  // The symplectic integrator's energy error oscillates but must not drift:
  // the mean energy over the last quarter of the trajectory has to match the
  // first quarter within 1% of the initial energy. A non-symplectic explicit
  // scheme gains energy secularly and fails this oracle.
  ArmModel model = make_train_model();
  model.damping.setZero();
  // Free swing: joint stops moved out of reach so no contact dissipates.
  model.shoulder_stop = 1e9;
  model.elbow_range << -1e9, 1e9;
  EnvState s;
  s.angles << 0.4, -0.2;
  s.velocities << 1.0, -0.5;
  const double e0 = mechanical_energy(model, s);
  REQUIRE(e0 > 0.0);
  double early = 0.0;
  double late = 0.0;
  double max_wobble = 0.0;
  for (int t = 0; t < 200; ++t) {
    s = step(model, s, Eigen::Vector2d::Zero()).state;
    const double e = mechanical_energy(model, s);
    if (t < 100) early += e;
    if (t >= 100) late += e;
    max_wobble = std::max(max_wobble, std::abs(e - e0));
  }
  CHECK(std::abs(late - early) / 100.0 <= 0.01 * e0);
  // Bounded oscillation, not an instability.
  CHECK(max_wobble < 0.5 * e0);
}

TEST_CASE("doubling damping shrinks velocities after one step from rest") {
  // Single-joint torque: with both joints driven the inertial coupling can
  // speed up the other joint when its neighbour is damped harder.
  ArmModel model = make_train_model();
  ArmModel heavy = model;
  heavy.damping *= 2.0;
  const Eigen::Vector2d torque(0.5, 0.0);
  const EnvState rest;
  const EnvState a = step(model, rest, torque).state;
  const EnvState b = step(heavy, rest, torque).state;
  CHECK(std::abs(b.velocities[0]) < std::abs(a.velocities[0]));
  CHECK(std::abs(b.velocities[1]) < std::abs(a.velocities[1]));
}

TEST_CASE("step is deterministic") {
  const ArmModel model = make_test_model();
  EnvState s;
  s.angles << 0.1, 0.2;
  s.velocities << -0.4, 0.7;
  const Eigen::Vector2d torque(0.3, -0.1);
  const StepResult r1 = step(model, s, torque);
  const StepResult r2 = step(model, s, torque);
  CHECK(r1.state.angles == r2.state.angles);
  CHECK(r1.state.velocities == r2.state.velocities);
  CHECK(r1.base_reward == r2.base_reward);
}

TEST_CASE("velocities decay without torque when damped, gravity off") {
  ArmModel model = make_train_model();
  model.gravity = 0.0;
  EnvState s;
  s.velocities << 2.0, -3.0;
  double prev = s.velocities.norm();
  for (int i = 0; i < 20; ++i) {
    s = step(model, s, Eigen::Vector2d::Zero()).state;
    const double cur = s.velocities.norm();
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("safety_value is the wrapped distal tilt") {
  EnvState s;
  CHECK(safety_value(s) == 0.0);

  s.angles << std::numbers::pi / 4.0, -std::numbers::pi / 4.0;
  CHECK(safety_value(s) == doctest::Approx(0.0));

  s.angles << std::numbers::pi / 2.0, 0.0;
  CHECK(safety_value(s) == doctest::Approx(std::numbers::pi / 2.0));

  SUBCASE("wraps into [0, pi]") {
    s.angles << 3.0, 3.0;  // 6 rad -> 2 pi - 6
    CHECK(safety_value(s) ==
          doctest::Approx(2.0 * std::numbers::pi - 6.0).epsilon(1e-12));
    s.angles << 100.0, 0.5;
    const double u = safety_value(s);
    CHECK(u >= 0.0);
    CHECK(u <= std::numbers::pi);
  }
}

TEST_CASE("is_violation is strict") {
  const SafetySpec spec{0.2, 0.0, 1e-3};
  CHECK_FALSE(is_violation(0.2, spec));
  CHECK(is_violation(0.2 + 1e-9, spec));
  CHECK_FALSE(is_violation(0.0, spec));
}

TEST_CASE("penalized_reward") {
  const SafetySpec spec{0.2, 0.0, 1e-3};
  CHECK(penalized_reward(1.0, 0.0, spec) == 1.0);
  CHECK(penalized_reward(0.0, 0.5, spec) == doctest::Approx(-0.00025));

  const SafetySpec loose{0.4, 0.3, 0.5};
  CHECK(penalized_reward(2.0, 0.25, loose) == 2.0);

  SUBCASE("monotone nonincreasing in u") {
    double prev = penalized_reward(1.0, 0.0, spec);
    for (int i = 1; i <= 20; ++i) {
      const double r = penalized_reward(1.0, 0.05 * i, spec);
      CHECK(r <= prev);
      prev = r;
    }
  }
}

TEST_CASE("test model scales down masses, damping and inertia") {
  const ArmModel train = make_train_model();
  const ArmModel test = make_test_model(10.0, 10.0, 10.0);
  CHECK(test.link_masses[0] == doctest::Approx(train.link_masses[0] / 10.0));
  CHECK(test.damping[1] == doctest::Approx(train.damping[1] / 10.0));
  CHECK(test.inertia_scale == doctest::Approx(train.inertia_scale / 10.0));
  CHECK(test.dt == train.dt);

  const ArmModel same = make_test_model(1.0, 1.0, 1.0);
  CHECK(same.link_masses == train.link_masses);
  CHECK(same.damping == train.damping);
  CHECK(same.inertia_scale == train.inertia_scale);

  ArmModel strong = make_train_model();
  strong.damping << 0.5, 0.5;
  CHECK(0.5 / 100.0 == doctest::Approx(0.005));
  CHECK(make_test_model(1.0, 100.0, 1.0).damping[0] ==
        doctest::Approx(train.damping[0] / 100.0));

  CHECK_THROWS_AS(make_test_model(0.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("initial_state sampling") {
  Rng rng(3);
  const EnvState zero = initial_state(rng, 0.0);
  CHECK(zero.angles == Eigen::Vector2d::Zero());
  CHECK(zero.velocities == Eigen::Vector2d::Zero());
  CHECK(zero.t == 0);

  Rng r1(9), r2(9);
  const EnvState a = initial_state(r1, 0.3);
  const EnvState b = initial_state(r2, 0.3);
  CHECK(a.angles == b.angles);

  Rng rmc(123);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const EnvState s = initial_state(rmc, 0.3);
    CHECK(s.angles.cwiseAbs().maxCoeff() <= 0.3);
    mean += s.angles;
  }
  mean /= static_cast<double>(n);
  CHECK(mean.cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("reference circle centre is reachable at zero tilt") {
  const ArmModel model = make_train_model();
  // The circle centre is the pose with the shoulder at kSwirlPoseAngle and
  // the distal link hanging vertically. Tilt there is exactly zero, so the
  // best phase-blind strategy (hold the centre) is also a safe one, and the
  // pose lies inside the joint-stop ranges.
  EnvState park;
  park.angles << kSwirlPoseAngle, -kSwirlPoseAngle;
  CHECK(park.angles[0] < model.shoulder_stop);
  CHECK(park.angles[1] > model.elbow_range[0]);
  CHECK(park.angles[1] <= model.elbow_range[1]);
  const Eigen::Vector2d centre(
      model.link_lengths[0] * std::sin(kSwirlPoseAngle),
      -model.link_lengths[1] - model.link_lengths[0] * std::cos(kSwirlPoseAngle));
  CHECK((end_effector(model, park) - centre).norm() < 1e-12);
  CHECK(safety_value(park) < 1e-12);

  // The reference itself stays at the circle radius from the centre and
  // completes one revolution per period.
  for (int t = 0; t <= kSwirlPeriodSteps; t += 10) {
    CHECK((reference_point(model, t) - centre).norm() ==
          doctest::Approx(kSwirlRadius).epsilon(1e-12));
  }
  CHECK((reference_point(model, kSwirlPeriodSteps) - reference_point(model, 0))
            .norm() < 1e-12);
}

TEST_CASE("ArmEnv reports faults on torque spikes driven to non-finite state") {
  // Force a fault by stepping from an absurd velocity state repeatedly with
  // a NaN torque, which the clamp layer would never produce on its own.
  ArmEnv env(make_test_model(), 0.0);
  Rng rng(1);
  env.reset(rng);
  Eigen::VectorXd bad(2);
  bad << std::numeric_limits<double>::quiet_NaN(), 0.0;
  env.step(bad);
  CHECK(env.faulted());
}
