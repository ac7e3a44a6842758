#include "spt/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spt {

namespace {
constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}
}  // namespace

GaussParams::GaussParams(double mu, double sigma) : mu(mu), sigma(sigma) {
  check_finite(mu, "GaussParams.mu");
  check_finite(sigma, "GaussParams.sigma");
  if (sigma <= 0.0) {
    throw std::invalid_argument("GaussParams.sigma must be > 0");
  }
}

TruncatedGauss::TruncatedGauss(GaussParams base, double t_lim)
    : base(base), t_lim(t_lim) {
  check_finite(t_lim, "TruncatedGauss.t_lim");
  if (t_lim <= 0.0) {
    throw std::invalid_argument("TruncatedGauss.t_lim must be > 0");
  }
}

double normal_pdf(double x, const GaussParams& p) {
  const double z = (x - p.mu) / p.sigma;
  return kInvSqrt2Pi / p.sigma * std::exp(-0.5 * z * z);
}

double normal_cdf(double x, const GaussParams& p) {
  const double z = (x - p.mu) / p.sigma;
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

TruncProb trunc_prob(const TruncatedGauss& d, double t) {
  TruncProb out;
  if (t == -d.t_lim) {
    out.point_mass = normal_cdf(-d.t_lim, d.base);
  } else if (t == d.t_lim) {
    out.point_mass = 1.0 - normal_cdf(d.t_lim, d.base);
  } else if (std::abs(t) < d.t_lim) {
    out.density = normal_pdf(t, d.base);
  }
  return out;
}

double tail_mass(const GaussParams& p, double t_lim) {
  if (!(t_lim > 0.0)) {
    throw std::invalid_argument("tail_mass: t_lim must be > 0");
  }
  // 1 - F(t_lim) and F(-t_lim) via erfc complements to keep small tails exact.
  const double upper = 0.5 * std::erfc((t_lim - p.mu) / p.sigma * kInvSqrt2);
  const double lower = 0.5 * std::erfc((t_lim + p.mu) / p.sigma * kInvSqrt2);
  return std::clamp(upper + lower, 0.0, 1.0);
}

double gauss_kl(const GaussParams& p1, const GaussParams& p2) {
  const double dm = p1.mu - p2.mu;
  const double kl = std::log(p2.sigma / p1.sigma) +
                    (p1.sigma * p1.sigma + dm * dm) /
                        (2.0 * p2.sigma * p2.sigma) -
                    0.5;
  return std::max(kl, 0.0);
}

double mean_shift_from_kl(double sigma, double delta_kl) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("mean_shift_from_kl: sigma must be > 0");
  }
  if (delta_kl < 0.0) {
    throw std::invalid_argument("mean_shift_from_kl: delta_kl must be >= 0");
  }
  return sigma * std::sqrt(2.0 * delta_kl);
}

double intersection_area(double sigma, double delta_kl) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("intersection_area: sigma must be > 0");
  }
  if (delta_kl < 0.0) {
    throw std::invalid_argument("intersection_area: delta_kl must be >= 0");
  }
  return 2.0 * normal_cdf(-std::sqrt(delta_kl / 2.0), GaussParams(0.0, 1.0));
}

}  // namespace spt
