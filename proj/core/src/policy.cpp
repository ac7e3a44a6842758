#include "spt/policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "spt/gauss.hpp"

namespace spt {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

PolicyParams::PolicyParams(int action_dim, int feature_dim, double initial_std) {
  if (action_dim <= 0 || feature_dim <= 0) {
    throw std::invalid_argument("PolicyParams: dims must be positive");
  }
  if (!(initial_std > 0.0)) {
    throw std::invalid_argument("PolicyParams: initial_std must be > 0");
  }
  weights = Eigen::MatrixXd::Zero(action_dim, feature_dim);
  bias = Eigen::VectorXd::Zero(action_dim);
  log_std = Eigen::VectorXd::Constant(action_dim, std::log(initial_std));
}

Eigen::VectorXd PolicyParams::flatten() const {
  const int a = action_dim();
  const int f = feature_dim();
  Eigen::VectorXd theta(param_count());
  for (int i = 0; i < a; ++i) {
    theta.segment(i * f, f) = weights.row(i);
  }
  theta.segment(a * f, a) = bias;
  theta.segment(a * f + a, a) = log_std;
  return theta;
}

PolicyParams PolicyParams::unflatten(const Eigen::VectorXd& theta,
                                     int action_dim, int feature_dim) {
  PolicyParams p(action_dim, feature_dim, 1.0);
  if (theta.size() != p.param_count()) {
    throw std::invalid_argument("PolicyParams::unflatten: size mismatch");
  }
  for (int i = 0; i < action_dim; ++i) {
    p.weights.row(i) = theta.segment(i * feature_dim, feature_dim);
  }
  p.bias = theta.segment(action_dim * feature_dim, action_dim);
  p.log_std = theta.segment(action_dim * feature_dim + action_dim, action_dim);
  return p;
}

Eigen::VectorXd arm_features(const EnvState& state, double t_lim) {
  Eigen::VectorXd f(8);
  f << std::sin(state.angles[0]), std::cos(state.angles[0]),
      std::sin(state.angles[1]), std::cos(state.angles[1]),
      state.velocities[0], state.velocities[1], t_lim, 1.0;
  return f;
}

ActionDist act_dist(const PolicyParams& params,
                    const Eigen::VectorXd& features) {
  if (features.size() != params.feature_dim()) {
    throw std::invalid_argument("act_dist: feature dimension mismatch");
  }
  ActionDist d;
  d.mean = params.weights * features + params.bias;
  d.std = params.log_std.array().exp();
  return d;
}

Eigen::VectorXd sample_raw(const ActionDist& dist, Rng& rng) {
  Eigen::VectorXd out(dist.mean.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = dist.mean[i] + dist.std[i] * standard_normal(rng);
  }
  return out;
}

Eigen::VectorXd clamp_torque(const Eigen::VectorXd& raw, double t_lim) {
  if (!(t_lim > 0.0)) {
    throw std::invalid_argument("clamp_torque: t_lim must be > 0");
  }
  return raw.cwiseMax(-t_lim).cwiseMin(t_lim);
}

double log_prob(const ActionDist& dist, const Eigen::VectorXd& raw) {
  if (raw.size() != dist.mean.size()) {
    throw std::invalid_argument("log_prob: action dimension mismatch");
  }
  double lp = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double z = (raw[i] - dist.mean[i]) / dist.std[i];
    lp += -std::log(dist.std[i]) - kHalfLog2Pi - 0.5 * z * z;
  }
  return lp;
}

Eigen::VectorXd grad_log_prob(const PolicyParams& params,
                              const Eigen::VectorXd& features,
                              const Eigen::VectorXd& raw) {
  const int a = params.action_dim();
  const int f = params.feature_dim();
  if (features.size() != f || raw.size() != a) {
    throw std::invalid_argument("grad_log_prob: dimension mismatch");
  }
  const ActionDist dist = act_dist(params, features);
  Eigen::VectorXd grad(params.param_count());
  for (int i = 0; i < a; ++i) {
    const double sigma = dist.std[i];
    const double dmean = (raw[i] - dist.mean[i]) / (sigma * sigma);
    grad.segment(i * f, f) = dmean * features;
    grad[a * f + i] = dmean;
    const double z = (raw[i] - dist.mean[i]) / sigma;
    grad[a * f + a + i] = z * z - 1.0;
  }
  return grad;
}

double mean_kl(const PolicyParams& old_params, const PolicyParams& new_params,
               const std::vector<Eigen::VectorXd>& states_features) {
  if (states_features.empty()) {
    throw std::invalid_argument("mean_kl: empty state list");
  }
  if (old_params.action_dim() != new_params.action_dim() ||
      old_params.feature_dim() != new_params.feature_dim()) {
    throw std::invalid_argument("mean_kl: parameter shape mismatch");
  }
  double total = 0.0;
  for (const auto& f : states_features) {
    const ActionDist d_old = act_dist(old_params, f);
    const ActionDist d_new = act_dist(new_params, f);
    for (int i = 0; i < old_params.action_dim(); ++i) {
      total += gauss_kl(GaussParams(d_old.mean[i], d_old.std[i]),
                        GaussParams(d_new.mean[i], d_new.std[i]));
    }
  }
  return total / static_cast<double>(states_features.size());
}

std::string policy_to_json(const PolicyParams& params) {
  nlohmann::json j;
  j["dims"] = {{"action_dim", params.action_dim()},
               {"feature_dim", params.feature_dim()}};
  std::vector<double> w(params.weights.size());
  for (int i = 0; i < params.action_dim(); ++i) {
    for (int k = 0; k < params.feature_dim(); ++k) {
      w[static_cast<size_t>(i) * params.feature_dim() + k] =
          params.weights(i, k);
    }
  }
  j["weights"] = w;
  j["bias"] = std::vector<double>(params.bias.begin(), params.bias.end());
  j["log_std"] =
      std::vector<double>(params.log_std.begin(), params.log_std.end());
  return j.dump(2);
}

PolicyParams policy_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const int a = j.at("dims").at("action_dim").get<int>();
  const int f = j.at("dims").at("feature_dim").get<int>();
  PolicyParams p(a, f, 1.0);
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto b = j.at("bias").get<std::vector<double>>();
  const auto ls = j.at("log_std").get<std::vector<double>>();
  if (w.size() != static_cast<size_t>(a) * f ||
      b.size() != static_cast<size_t>(a) || ls.size() != static_cast<size_t>(a)) {
    throw std::invalid_argument("policy_from_json: array size mismatch");
  }
  for (int i = 0; i < a; ++i) {
    for (int k = 0; k < f; ++k) {
      p.weights(i, k) = w[static_cast<size_t>(i) * f + k];
    }
  }
  p.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), a);
  p.log_std = Eigen::Map<const Eigen::VectorXd>(ls.data(), a);
  return p;
}

}  // namespace spt
