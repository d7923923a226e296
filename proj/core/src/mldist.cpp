#include "gif/mldist.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gif/errors.hpp"

namespace gif {

namespace {

bool is_half_integer(double v) {
  const double twice = 2.0 * std::abs(v);
  return std::abs(twice - std::round(twice)) == 0.0 && std::fmod(std::round(twice), 2.0) == 1.0;
}

}  // namespace

double log_bessel_k(double order, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_bessel_k: argument must be positive and finite");
  }
  const double v = std::abs(order);  // K_{-v} = K_v
  const double log_half = 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x;

  if (is_half_integer(v)) {
    // K_{m+1/2}(x) = sqrt(pi/2x) e^{-x} * k_m, with k_0 = 1, k_1 = 1 + 1/x and
    // k_{j+1} = k_{j-1} + (2 (j + 1/2) / x) k_j.
    const int m = static_cast<int>(std::round(v - 0.5));
    double km1 = 1.0;
    double k = 1.0;
    for (int j = 0; j < m; ++j) {
      const double next = (j == 0) ? 1.0 + 1.0 / x : km1 + (2.0 * (j + 0.5) / x) * k;
      km1 = k;
      k = next;
    }
    return log_half + std::log(k);
  }

  if (x > 500.0) {
    const double mu = 4.0 * v * v;
    const double series = 1.0 + (mu - 1.0) / (8.0 * x) + (mu - 1.0) * (mu - 9.0) / (128.0 * x * x);
    return log_half + std::log(series);
  }
  return std::log(std::cyl_bessel_k(v, x));
}

MlDistribution::MlDistribution(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (mean_.size() == 0) throw DomainError("MlDistribution: empty mean");
  if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size()) {
    throw DomainError("MlDistribution: covariance dimension does not match mean");
  }
  if (asymmetry(covariance_) > 1e-12) {
    throw DomainError("MlDistribution: covariance is not symmetric");
  }
  chol_ = lower_cholesky(covariance_, "MlDistribution covariance");
  bessel_order_ = (2.0 - static_cast<double>(mean_.size())) / 2.0;
}

double MlDistribution::mahalanobis_sq(const Vector& x) const {
  const Vector u = chol_.triangularView<Eigen::Lower>().solve(x - mean_);
  return u.squaredNorm();
}

double ml_log_pdf(const MlDistribution& dist, const Vector& x) {
  if (x.size() != dist.dim()) {
    throw DomainError("ml_pdf: expected dimension " + std::to_string(dist.dim()) + ", got " +
                      std::to_string(x.size()));
  }
  const double d = static_cast<double>(dist.dim());
  const double log_det = 2.0 * dist.chol().diagonal().array().log().sum();
  const double log_norm = std::log(2.0) - 0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det);
  const double q = dist.mahalanobis_sq(x);
  if (q == 0.0) {
    if (dist.dim() >= 2) throw PoleError("ml_pdf: density diverges at the mean for d >= 2");
    // d = 1: (q/2)^{1/4} K_{1/2}(sqrt(2q)) -> sqrt(pi)/2
    return log_norm + 0.5 * std::log(std::numbers::pi) - std::log(2.0);
  }
  const double v = dist.bessel_order();
  return log_norm + 0.5 * v * std::log(0.5 * q) + log_bessel_k(v, std::sqrt(2.0 * q));
}

double ml_pdf(const MlDistribution& dist, const Vector& x) { return std::exp(ml_log_pdf(dist, x)); }

CgmmMixandParams cgmm_mixand(const MlDistribution& dist, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw DomainError("cgmm_mixand: z must be positive, got " + format_double(z));
  }
  return {dist.mean(), z * dist.covariance(), -z};
}

double normal_log_pdf(const Vector& x, const Vector& mean, const Matrix& covariance) {
  if (x.size() != mean.size() || covariance.rows() != mean.size()) {
    throw DomainError("normal_log_pdf: dimension mismatch");
  }
  const Matrix l = lower_cholesky(covariance, "normal_log_pdf covariance");
  const Vector u = l.triangularView<Eigen::Lower>().solve(x - mean);
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) + log_det +
                 u.squaredNorm());
}

}  // namespace gif
