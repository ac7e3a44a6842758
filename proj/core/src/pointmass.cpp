#include "spt/pointmass.hpp"

#include <cmath>
#include <stdexcept>

namespace spt {

PointMassEnv::PointMassEnv(PointMassModel model, double start_range)
    : model_(model), start_range_(start_range) {
  if (start_range < 0.0) {
    throw std::invalid_argument("PointMassEnv: start_range must be >= 0");
  }
}

void PointMassEnv::reset(Rng& rng) {
  x_ = uniform_real(rng, -start_range_, start_range_);
  v_ = 0.0;
  fault_ = false;
}

Eigen::VectorXd PointMassEnv::features(double t_lim) const {
  Eigen::VectorXd f(4);
  f << x_, v_, t_lim, 1.0;
  return f;
}

double PointMassEnv::step(const Eigen::VectorXd& applied) {
  const double force = applied[0];
  v_ += model_.dt * (force - model_.damping * v_) / model_.mass;
  v_ = std::clamp(v_, -kVelocityLimit, kVelocityLimit);
  x_ += model_.dt * v_;
  if (std::abs(x_) > model_.position_limit) {
    x_ = std::clamp(x_, -model_.position_limit, model_.position_limit);
    v_ = 0.0;  // dead stop at the rail end
  }
  if (!std::isfinite(x_) || !std::isfinite(v_)) {
    fault_ = true;
    return 0.0;
  }
  return -(x_ * x_ + 0.1 * v_ * v_);
}

double PointMassEnv::safety_value() const { return std::abs(x_); }

std::unique_ptr<Env> PointMassEnv::clone() const {
  return std::make_unique<PointMassEnv>(*this);
}

}  // namespace spt
