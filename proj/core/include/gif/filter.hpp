#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "gif/interp.hpp"
#include "gif/linalg.hpp"
#include "gif/quadrature.hpp"

namespace gif {

struct GaussianState {
  Vector mean;
  Matrix covariance;

  // Throws DomainError when the covariance shape does not match the mean, and
  // NumericalError for non-finite entries, asymmetry above 1e-12 or a failed
  // factorization.
  void validate(std::string_view what = "GaussianState") const;
};

// x_k = f(x_{k-1}, v_{k-1}) with non-additive process noise v.
struct Dynamics {
  Eigen::Index state_dim = 0;
  Eigen::Index noise_dim = 0;
  std::function<Vector(const Vector& x, const Vector& v)> propagate;
  // Optional Jacobians at (x, v = 0). Central differences of `propagate` are used when empty.
  std::function<Matrix(const Vector& x)> state_jacobian;
  std::function<Matrix(const Vector& x)> noise_jacobian;
};

// y = h(x) + w with additive Gaussian w.
struct MeasurementModel {
  Eigen::Index dim = 0;
  std::function<Vector(const Vector& x)> predict;
  std::function<Matrix(const Vector& x)> jacobian;       // optional
  std::function<Vector(const Vector& residual)> wrap;    // optional, identity when empty
};

// Central-difference Jacobians. Component j is stepped by
// cbrt(eps) * max(1, |x_j|, 1e-3 * max_i |x_i|); noise components by cbrt(eps).
Matrix numeric_state_jacobian(const Dynamics& dynamics, const Vector& x);
Matrix numeric_noise_jacobian(const Dynamics& dynamics, const Vector& x);
Matrix numeric_measurement_jacobian(const MeasurementModel& model, const Vector& x);

enum class BankFlavor { ekf, ukf };

std::string_view to_string(BankFlavor flavor);

// Unscented transform with alpha = 1, beta = 2, kappa = 3 - n, so lambda = 3 - n
// and the sigma-point spread is sqrt(3) regardless of n.
struct UnscentedWeights {
  double mean0 = 0.0;
  double cov0 = 0.0;
  double other = 0.0;
  double spread = 0.0;

  static UnscentedWeights for_dimension(Eigen::Index n);
};

struct GifConfig {
  std::size_t n_t = 10;
  std::size_t n_m = 10;
  std::size_t n_q = 10;
  BankFlavor flavor = BankFlavor::ukf;
  InterpScale scale = InterpScale::sqrt_z;  // abscissa for node remapping

  // Throws ConfigError on inconsistent counts or grids that violate nesting.
  void validate() const;
};

// Node grids of one filter configuration. Measurement nodes are the order-n_m
// Gauss-Laguerre roots. Time nodes equal them when n_t == n_m; otherwise the
// end nodes are pinned to the measurement extremes and interior nodes are
// equally spaced in sqrt(z).
struct GifGrids {
  NodeGrid time;
  NodeGrid measurement;
  GaussLaguerreRule rule;

  static GifGrids from_config(const GifConfig& config);
  NodeGrid quadrature() const;
};

NodeGrid sqrt_spaced_time_grid(double first, double last, std::size_t count);

struct WeightedComponent {
  double weight = 0.0;
  GaussianState state;
  double z = 0.0;  // mixing-parameter node the component came from
};

struct WeightedGmm {
  std::vector<WeightedComponent> components;
};

struct EigenWeight {
  double z = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double weight = 0.0;
};

// Propagates a Gaussian prior through the dynamics for every node, with
// process noise covariance z_i Q at node i. Log-weights start at zero.
CgmmBelief time_update(const GaussianState& prior, const Dynamics& dynamics, const Matrix& q,
                       const NodeGrid& grid, BankFlavor flavor);

// Kalman update of every mixand; the log-likelihood of y under each mixand is
// added to its log-weight.
CgmmBelief measurement_update(const CgmmBelief& belief, const Vector& y,
                              const MeasurementModel& model, const Matrix& r, BankFlavor flavor);

// Remaps onto the rule nodes and forms weights w_i exp(s_l(z_i)), normalized.
WeightedGmm quadrature_reduce(const CgmmBelief& belief, const GaussLaguerreRule& rule,
                              InterpScale scale = InterpScale::z);

GaussianState moment_match(const WeightedGmm& gmm);

std::vector<EigenWeight> eigen_weight_profile(const WeightedGmm& gmm);

struct GifDiagnostics {
  WeightedGmm posterior_mixture;
  std::vector<EigenWeight> profile;
};

struct GifStepResult {
  GaussianState posterior;
  GifDiagnostics diagnostics;
};

// One prediction/correction cycle with precomputed grids.
class GaussianIntegralFilter {
 public:
  explicit GaussianIntegralFilter(GifConfig config);

  const GifConfig& config() const { return config_; }
  const GifGrids& grids() const { return grids_; }

  GifStepResult step(const GaussianState& prior, const Vector& y, const Dynamics& dynamics,
                     const MeasurementModel& model, const Matrix& q, const Matrix& r) const;

 private:
  GifConfig config_;
  GifGrids grids_;
};

GifStepResult gif_step(const GaussianState& prior, const Vector& y, const Dynamics& dynamics,
                       const MeasurementModel& model, const Matrix& q, const Matrix& r,
                       const GifConfig& config);

// Single-filter references with the same process noise covariance.
GaussianState baseline_ukf_step(const GaussianState& prior, const Vector& y,
                                const Dynamics& dynamics, const MeasurementModel& model,
                                const Matrix& q, const Matrix& r);
GaussianState baseline_ekf_step(const GaussianState& prior, const Vector& y,
                                const Dynamics& dynamics, const MeasurementModel& model,
                                const Matrix& q, const Matrix& r);

}  // namespace gif
