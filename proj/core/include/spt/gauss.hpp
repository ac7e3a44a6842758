#ifndef SPT_GAUSS_HPP_
#define SPT_GAUSS_HPP_

namespace spt {

// Scalar Gaussian N(mu, sigma^2). Construction rejects sigma <= 0.
struct GaussParams {
  double mu;
  double sigma;
  GaussParams(double mu, double sigma);
};

// Gaussian truncated symmetrically at +/- t_lim. Sampling truncates after the
// draw, so the bounds carry point masses instead of renormalized density.
struct TruncatedGauss {
  GaussParams base;
  double t_lim;
  TruncatedGauss(GaussParams base, double t_lim);
};

// Mixed continuous/discrete probability at a point of a TruncatedGauss.
// Exactly one of the two fields is nonzero (both zero outside the support).
struct TruncProb {
  double density = 0.0;
  double point_mass = 0.0;
};

double normal_pdf(double x, const GaussParams& p);

// Phi((x - mu) / sigma), accurate to ~1e-15 absolute error (erfc-based).
double normal_cdf(double x, const GaussParams& p);

// Density for |t| < t_lim, point mass F(-t_lim) at t = -t_lim and
// 1 - F(t_lim) at t = +t_lim, zero outside.
TruncProb trunc_prob(const TruncatedGauss& d, double t);

// Probability mass outside [-t_lim, t_lim]: 1 - F(t_lim) + F(-t_lim).
double tail_mass(const GaussParams& p, double t_lim);

// KL(p1 || p2) in nats: log(s2/s1) + (s1^2 + (m1-m2)^2) / (2 s2^2) - 1/2.
double gauss_kl(const GaussParams& p1, const GaussParams& p2);

// Mean displacement |mu1 - mu2| = sigma * sqrt(2 delta_kl) implied by a KL
// budget when the variance is held fixed.
double mean_shift_from_kl(double sigma, double delta_kl);

// Overlap area of two equal-variance Gaussians whose means differ by the
// KL-implied shift: 2 Phi(-sqrt(delta_kl / 2)). Translation- and
// scale-invariant; sigma is validated but cancels out of the closed form.
double intersection_area(double sigma, double delta_kl);

}  // namespace spt

#endif  // SPT_GAUSS_HPP_
