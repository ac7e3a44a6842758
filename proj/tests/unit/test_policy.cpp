#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spt/policy.hpp"

using namespace spt;

namespace {

PolicyParams random_policy(int action_dim, int feature_dim, Rng& rng) {
  PolicyParams p(action_dim, feature_dim, 1.0);
  for (int i = 0; i < action_dim; ++i) {
    for (int j = 0; j < feature_dim; ++j) {
      p.weights(i, j) = uniform_real(rng, -1.0, 1.0);
    }
    p.bias[i] = uniform_real(rng, -1.0, 1.0);
    p.log_std[i] = uniform_real(rng, -1.5, 0.5);
  }
  return p;
}

Eigen::VectorXd random_vector(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform_real(rng, lo, hi);
  return v;
}

}  // namespace

TEST_CASE("arm_features layout") {
  EnvState rest;
  SUBCASE("t_lim occupies the penultimate slot") {
    const Eigen::VectorXd a = arm_features(rest, 0.1);
    const Eigen::VectorXd b = arm_features(rest, 3.0);
    CHECK(a.size() == 8);
    CHECK(a[6] == 0.1);
    CHECK(a[7] == 1.0);
    CHECK(b[6] == 3.0);
    for (int i = 0; i < 8; ++i) {
      if (i != 6) CHECK(a[i] == b[i]);
    }
  }
  SUBCASE("zero angles give sin 0, cos 1") {
    const Eigen::VectorXd f = arm_features(rest, 1.0);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 1.0);
    CHECK(f[2] == 0.0);
    CHECK(f[3] == 1.0);
    CHECK(f[4] == 0.0);
    CHECK(f[5] == 0.0);
  }
}

TEST_CASE("act_dist is linear in features") {
  PolicyParams p(2, 3, 1.0);
  Eigen::VectorXd f(3);
  f << 0.5, -1.0, 2.0;

  SUBCASE("zero weights and bias give zero mean") {
    const ActionDist d = act_dist(p, f);
    CHECK(d.mean.isZero());
  }
  SUBCASE("log_std = 0 gives unit std") {
    p.log_std.setZero();
    const ActionDist d = act_dist(p, f);
    CHECK(d.std[0] == doctest::Approx(1.0));
    CHECK(d.std[1] == doctest::Approx(1.0));
  }
  SUBCASE("identity row copies the feature") {
    p.weights(0, 2) = 1.0;
    const ActionDist d = act_dist(p, f);
    CHECK(d.mean[0] == doctest::Approx(2.0));
    CHECK(d.mean[1] == 0.0);
  }
  SUBCASE("dimension mismatch throws") {
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
    CHECK_THROWS_AS(act_dist(p, bad), std::invalid_argument);
  }
}

TEST_CASE("sample_raw determinism and degenerate std") {
  ActionDist d;
  d.mean = Eigen::Vector2d(0.3, -0.7);
  d.std = Eigen::Vector2d(1e-12, 1e-12);
  Rng rng(5);
  const Eigen::VectorXd s = sample_raw(d, rng);
  CHECK(std::abs(s[0] - 0.3) < 1e-9);
  CHECK(std::abs(s[1] + 0.7) < 1e-9);

  d.std = Eigen::Vector2d(1.0, 2.0);
  Rng r1(42), r2(42);
  CHECK(sample_raw(d, r1) == sample_raw(d, r2));
}

TEST_CASE("sample_raw statistics converge") {
  ActionDist d;
  d.mean = Eigen::VectorXd::Zero(1);
  d.std = Eigen::VectorXd::Ones(1);
  Rng rng(7);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_raw(d, rng)[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double std = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(std - 1.0) < 3.0 / std::sqrt(2.0 * n));
}

TEST_CASE("clamp_torque") {
  Eigen::VectorXd raw(2);
  raw << 5.0, -5.0;
  const Eigen::VectorXd c = clamp_torque(raw, 3.0);
  CHECK(c[0] == 3.0);
  CHECK(c[1] == -3.0);

  Eigen::VectorXd inside(1);
  inside << 0.05;
  CHECK(clamp_torque(inside, 0.1)[0] == 0.05);

  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = random_vector(3, rng, -10.0, 10.0);
    const double lim = uniform_real(rng, 0.01, 5.0);
    const Eigen::VectorXd once = clamp_torque(x, lim);
    CHECK(clamp_torque(once, lim) == once);
    CHECK(once.cwiseAbs().maxCoeff() <= lim);
  }
}

TEST_CASE("log_prob closed form") {
  ActionDist d;
  d.mean = Eigen::VectorXd::Zero(1);
  d.std = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd a(1);
  a << 0.0;
  CHECK(log_prob(d, a) == doctest::Approx(-0.918939).epsilon(1e-6));

  SUBCASE("at the mean the quadratic term vanishes") {
    ActionDist d3;
    d3.mean = Eigen::Vector3d(0.1, -0.2, 0.3);
    d3.std = Eigen::Vector3d(0.5, 1.0, 2.0);
    const double lp = log_prob(d3, d3.mean);
    const double expected = -std::log(0.5) - std::log(1.0) - std::log(2.0) -
                            1.5 * std::log(2.0 * std::numbers::pi);
    CHECK(lp == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("translation invariance") {
    ActionDist d1;
    d1.mean = Eigen::VectorXd::Constant(2, 0.4);
    d1.std = Eigen::Vector2d(0.7, 1.3);
    Eigen::VectorXd act(2);
    act << 1.0, -0.5;
    const double lp1 = log_prob(d1, act);
    ActionDist d2 = d1;
    d2.mean.array() += 10.0;
    const double lp2 = log_prob(d2, Eigen::VectorXd(act.array() + 10.0));
    CHECK(lp1 == doctest::Approx(lp2).epsilon(1e-12));
  }
}

TEST_CASE("grad_log_prob zero at the mean for weight and bias blocks") {
  Rng rng(13);
  PolicyParams p = random_policy(2, 4, rng);
  const Eigen::VectorXd f = random_vector(4, rng);
  const ActionDist d = act_dist(p, f);
  const Eigen::VectorXd g = grad_log_prob(p, f, d.mean);
  CHECK(g.head(2 * 4 + 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grad_log_prob matches central finite differences") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int a = 1 + static_cast<int>(uniform_real(rng, 0.0, 3.0));
    const int fdim = 2 + static_cast<int>(uniform_real(rng, 0.0, 4.0));
    const PolicyParams p = random_policy(a, fdim, rng);
    const Eigen::VectorXd f = random_vector(fdim, rng);
    const Eigen::VectorXd act = random_vector(a, rng, -2.0, 2.0);
    const Eigen::VectorXd analytic = grad_log_prob(p, f, act);

    const auto lp = [&](const Eigen::VectorXd& theta) {
      const PolicyParams q = PolicyParams::unflatten(theta, a, fdim);
      return log_prob(act_dist(q, f), act);
    };
    const Eigen::VectorXd theta = p.flatten();
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    for (int i = 0; i < theta.size(); ++i) {
      const double fd = oracles::central_difference(lp, theta, i);
      CHECK(std::abs(analytic[i] - fd) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("score function identity: expected gradient is zero") {
  Rng rng(19);
  const PolicyParams p = random_policy(1, 3, rng);
  Eigen::VectorXd f(3);
  f << 0.5, -0.25, 1.0;
  const ActionDist d = act_dist(p, f);
  const int n = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(p.param_count());
  for (int i = 0; i < n; ++i) {
    sum += grad_log_prob(p, f, sample_raw(d, rng));
  }
  sum /= static_cast<double>(n);
  CHECK(sum.cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("mean_kl") {
  Rng rng(23);
  const PolicyParams p = random_policy(2, 3, rng);
  std::vector<Eigen::VectorXd> states{random_vector(3, rng),
                                      random_vector(3, rng)};

  CHECK(mean_kl(p, p, states) == 0.0);
  CHECK_THROWS_AS(mean_kl(p, p, {}), std::invalid_argument);

  SUBCASE("mean shift of 0.2 at unit sigma gives 0.02 nats") {
    PolicyParams a(1, 2, 1.0);
    a.log_std.setZero();
    PolicyParams b = a;
    b.bias[0] = 0.2;
    std::vector<Eigen::VectorXd> s{Eigen::Vector2d(0.0, 0.0),
                                   Eigen::Vector2d(1.0, 1.0)};
    CHECK(mean_kl(a, b, s) == doctest::Approx(0.02).epsilon(1e-12));
  }
  SUBCASE("duplicated states do not change the mean") {
    PolicyParams b = p;
    b.bias[0] += 0.3;
    const double base = mean_kl(p, b, states);
    auto dup = states;
    dup.push_back(states[0]);
    dup.push_back(states[1]);
    CHECK(mean_kl(p, b, dup) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("flatten round trip is lossless") {
  Rng rng(29);
  const PolicyParams p = random_policy(3, 5, rng);
  CHECK(p.flatten().size() == 3 * (5 + 1) + 3);
  const PolicyParams q = PolicyParams::unflatten(p.flatten(), 3, 5);
  CHECK(p.weights == q.weights);
  CHECK(p.bias == q.bias);
  CHECK(p.log_std == q.log_std);
}

TEST_CASE("policy JSON round trip is lossless") {
  Rng rng(31);
  const PolicyParams p = random_policy(2, 8, rng);
  const PolicyParams q = policy_from_json(policy_to_json(p));
  CHECK(p.weights == q.weights);
  CHECK(p.bias == q.bias);
  CHECK(p.log_std == q.log_std);
  CHECK(q.action_dim() == 2);
  CHECK(q.feature_dim() == 8);
}
