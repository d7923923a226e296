#pragma once

#include <cmath>
#include <random>

#include "gif/linalg.hpp"

namespace gif {

// Modified Bessel function of the second kind, natural log: log K_v(x), x > 0.
// Half-integer orders use the closed form and upward recurrence; other orders
// go through std::cyl_bessel_k with an asymptotic branch for large x.
double log_bessel_k(double order, double x);

// Symmetric multivariate Laplace distribution with mean mu and covariance Sigma.
class MlDistribution {
 public:
  MlDistribution(Vector mean, Matrix covariance);

  Eigen::Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  const Matrix& chol() const { return chol_; }
  // v = (2 - d) / 2
  double bessel_order() const { return bessel_order_; }

  // (x - mu)^T Sigma^{-1} (x - mu)
  double mahalanobis_sq(const Vector& x) const;

 private:
  Vector mean_;
  Matrix covariance_;
  Matrix chol_;
  double bessel_order_;
};

// Density. Throws PoleError at x == mu when d >= 2 and DomainError on dimension mismatch.
double ml_pdf(const MlDistribution& dist, const Vector& x);
double ml_log_pdf(const MlDistribution& dist, const Vector& x);

// Draws Y = sqrt(Z) X + mu with Z ~ Exp(1) (inverse CDF) and X ~ N(0, Sigma).
template <class Rng>
Vector ml_sample(const MlDistribution& dist, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z = -std::log1p(-uniform(rng));
  Vector x(dist.dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
  return std::sqrt(z) * (dist.chol() * x) + dist.mean();
}

// One component of the continuous mixture  int_0^inf e^{-z} N(x; mu, z Sigma) dz.
struct CgmmMixandParams {
  Vector mean;
  Matrix covariance;
  double log_density;  // log of the mixing density e^{-z}
};

CgmmMixandParams cgmm_mixand(const MlDistribution& dist, double z);

// log N(x; mean, covariance)
double normal_log_pdf(const Vector& x, const Vector& mean, const Matrix& covariance);

}  // namespace gif
