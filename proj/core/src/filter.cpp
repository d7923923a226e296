#include "gif/filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gif/errors.hpp"

namespace gif {

namespace {

Vector wrapped(const MeasurementModel& model, Vector residual) {
  return model.wrap ? model.wrap(residual) : residual;
}

Vector checked_propagation(const Dynamics& dynamics, const Vector& x, const Vector& v) {
  Vector out = dynamics.propagate(x, v);
  if (out.size() != dynamics.state_dim || !out.allFinite()) {
    throw PropagationError("dynamics returned a non-finite or mis-sized state");
  }
  return out;
}

Matrix state_jacobian(const Dynamics& dynamics, const Vector& x) {
  return dynamics.state_jacobian ? dynamics.state_jacobian(x) : numeric_state_jacobian(dynamics, x);
}

Matrix noise_jacobian(const Dynamics& dynamics, const Vector& x) {
  return dynamics.noise_jacobian ? dynamics.noise_jacobian(x) : numeric_noise_jacobian(dynamics, x);
}

Matrix measurement_jacobian(const MeasurementModel& model, const Vector& x) {
  return model.jacobian ? model.jacobian(x) : numeric_measurement_jacobian(model, x);
}

// Central differences balance truncation (h^2) against rounding (eps / h) at
// h ~ cbrt(eps). Components near zero inside a large state are stepped
// relative to a thousandth of the largest magnitude, so e.g. a 1 m/s velocity
// component next to 7e6 m positions is not differenced at 1e-6 m/s.
double fd_step(double value, double state_scale) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max({1.0, std::abs(value), 1e-3 * state_scale});
}

void check_dims(const CgmmBelief& belief, const Vector& y, const MeasurementModel& model,
                const Matrix& r) {
  if (y.size() != model.dim || r.rows() != model.dim || r.cols() != model.dim) {
    throw DomainError("measurement_update: measurement dimension mismatch");
  }
  if (belief.size() == 0) throw DomainError("measurement_update: empty belief");
}

Eigen::LLT<Matrix> innovation_factor(const Matrix& s) {
  Eigen::LLT<Matrix> llt(symmetrized(s));
  if (llt.info() != Eigen::Success || !s.allFinite()) {
    throw NumericalError("innovation covariance is not invertible");
  }
  return llt;
}

// -1/2 [log|2 pi S| + dy^T S^{-1} dy]
double log_likelihood(const Vector& dy, const Eigen::LLT<Matrix>& s_factor) {
  const Matrix l = s_factor.matrixL();
  const Vector u = l.triangularView<Eigen::Lower>().solve(dy);
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double m = static_cast<double>(dy.size());
  return -0.5 * (m * std::log(2.0 * std::numbers::pi) + log_det + u.squaredNorm());
}

struct Correction {
  Vector mean;
  Matrix chol;
  double log_likelihood = 0.0;
};

// Joseph-form EKF correction given the shared prediction h(x) and Jacobian H.
Correction ekf_correct(const Vector& mean, const Matrix& cov, const Vector& dy, const Matrix& h,
                       const Matrix& r) {
  const Matrix s = h * cov * h.transpose() + r;
  const auto s_factor = innovation_factor(s);
  const Matrix gain = s_factor.solve(h * cov).transpose();
  const Eigen::Index n = mean.size();
  const Matrix i_kh = Matrix::Identity(n, n) - gain * h;
  const Matrix updated = i_kh * cov * i_kh.transpose() + gain * r * gain.transpose();
  return {mean + gain * dy, lower_cholesky(updated, "EKF posterior covariance"),
          log_likelihood(dy, s_factor)};
}

// Unscented correction from a mixand's mean and Cholesky factor.
Correction ukf_correct(const Vector& mean, const Matrix& chol, const Vector& y,
                       const MeasurementModel& model, const Matrix& r) {
  const Eigen::Index n = mean.size();
  const auto w = UnscentedWeights::for_dimension(n);
  const Eigen::Index count = 2 * n + 1;

  Matrix points(n, count);
  points.col(0) = mean;
  for (Eigen::Index j = 0; j < n; ++j) {
    points.col(1 + j) = mean + w.spread * chol.col(j);
    points.col(1 + n + j) = mean - w.spread * chol.col(j);
  }
  Matrix predicted(model.dim, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    predicted.col(i) = model.predict(points.col(i));
  }
  if (!predicted.allFinite()) throw NumericalError("measurement model returned non-finite values");

  // Mean measurement as the centre point plus weighted (wrapped) offsets.
  const Vector centre = predicted.col(0);
  Vector offset = Vector::Zero(model.dim);
  for (Eigen::Index i = 1; i < count; ++i) {
    offset += w.other * wrapped(model, predicted.col(i) - centre);
  }
  const Vector y_mean = centre + offset;

  Matrix s = r;
  Matrix cross = Matrix::Zero(n, model.dim);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double wc = (i == 0) ? w.cov0 : w.other;
    const Vector dy_i = wrapped(model, predicted.col(i) - y_mean);
    s.noalias() += wc * dy_i * dy_i.transpose();
    cross.noalias() += wc * (points.col(i) - mean) * dy_i.transpose();
  }
  const auto s_factor = innovation_factor(s);
  const Matrix gain = s_factor.solve(cross.transpose()).transpose();
  const Vector dy = wrapped(model, y - y_mean);
  const Matrix cov = chol * chol.transpose();
  const Matrix updated = cov - gain * symmetrized(s) * gain.transpose();
  return {mean + gain * dy, lower_cholesky(updated, "UKF posterior covariance"),
          log_likelihood(dy, s_factor)};
}

}  // namespace

void GaussianState::validate(std::string_view what) const {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size()) {
    throw DomainError(std::string(what) + ": covariance dimension mismatch");
  }
  if (!mean.allFinite() || !covariance.allFinite()) {
    throw NumericalError(std::string(what) + ": non-finite entries");
  }
  if (asymmetry(covariance) > 1e-12) {
    throw NumericalError(std::string(what) + ": covariance is not symmetric");
  }
  (void)psd_sqrt(covariance, what);
}

Matrix numeric_state_jacobian(const Dynamics& dynamics, const Vector& x) {
  const Vector v0 = Vector::Zero(dynamics.noise_dim);
  Matrix jac(dynamics.state_dim, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = fd_step(x[j], x.cwiseAbs().maxCoeff());
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (checked_propagation(dynamics, xp, v0) - checked_propagation(dynamics, xm, v0)) /
                 (2.0 * h);
  }
  return jac;
}

Matrix numeric_noise_jacobian(const Dynamics& dynamics, const Vector& x) {
  Matrix jac(dynamics.state_dim, dynamics.noise_dim);
  for (Eigen::Index j = 0; j < dynamics.noise_dim; ++j) {
    const double h = fd_step(0.0, 0.0);
    Vector vp = Vector::Zero(dynamics.noise_dim), vm = vp;
    vp[j] = h;
    vm[j] = -h;
    jac.col(j) = (checked_propagation(dynamics, x, vp) - checked_propagation(dynamics, x, vm)) /
                 (2.0 * h);
  }
  return jac;
}

Matrix numeric_measurement_jacobian(const MeasurementModel& model, const Vector& x) {
  Matrix jac(model.dim, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = fd_step(x[j], x.cwiseAbs().maxCoeff());
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = wrapped(model, model.predict(xp) - model.predict(xm)) / (2.0 * h);
  }
  return jac;
}

std::string_view to_string(BankFlavor flavor) {
  return flavor == BankFlavor::ekf ? "ekf" : "ukf";
}

UnscentedWeights UnscentedWeights::for_dimension(Eigen::Index n) {
  constexpr double alpha = 1.0;
  constexpr double beta = 2.0;
  const double nd = static_cast<double>(n);
  const double kappa = 3.0 - nd;
  const double lambda = alpha * alpha * (nd + kappa) - nd;
  const double c = nd + lambda;
  UnscentedWeights w;
  w.mean0 = lambda / c;
  w.cov0 = lambda / c + (1.0 - alpha * alpha + beta);
  w.other = 1.0 / (2.0 * c);
  w.spread = std::sqrt(c);
  return w;
}

namespace {

void check_counts(const GifConfig& c) {
  const auto in_range = [](std::size_t n) { return n >= 1 && n <= kMaxQuadratureOrder; };
  if (!in_range(c.n_t) || !in_range(c.n_m) || !in_range(c.n_q)) {
    throw ConfigError("node counts must lie in [1, " + std::to_string(kMaxQuadratureOrder) + "]");
  }
  if (c.n_m < c.n_t) throw ConfigError("n_m must be at least n_t");
  if (c.n_t == 1 && c.n_m != 1) {
    throw ConfigError("a single time-update node cannot be interpolated to n_m > 1 nodes");
  }
}

}  // namespace

void GifConfig::validate() const { (void)GifGrids::from_config(*this); }

NodeGrid sqrt_spaced_time_grid(double first, double last, std::size_t count) {
  if (count < 2 || !(first > 0.0) || !(last > first)) {
    throw ConfigError("time grid needs at least 2 nodes over a positive, non-empty span");
  }
  std::vector<double> nodes(count);
  const double s0 = std::sqrt(first);
  const double s1 = std::sqrt(last);
  for (std::size_t j = 0; j < count; ++j) {
    const double s = s0 + (s1 - s0) * static_cast<double>(j) / static_cast<double>(count - 1);
    nodes[j] = s * s;
  }
  nodes.front() = first;
  nodes.back() = last;
  return NodeGrid(std::move(nodes), GridPurpose::time_update);
}

GifGrids GifGrids::from_config(const GifConfig& config) {
  check_counts(config);
  const GaussLaguerreRule measurement_rule(config.n_m);
  NodeGrid measurement({measurement_rule.nodes().begin(), measurement_rule.nodes().end()},
                       GridPurpose::measurement_update);
  NodeGrid time = (config.n_t == config.n_m)
                      ? measurement.with_purpose(GridPurpose::time_update)
                      : sqrt_spaced_time_grid(measurement.front(), measurement.back(), config.n_t);
  GifGrids grids{std::move(time), std::move(measurement), GaussLaguerreRule(config.n_q)};
  const std::array<NodeGrid, 3> pipeline{grids.time, grids.measurement, grids.quadrature()};
  if (auto violation = check_nesting(pipeline)) {
    throw ConfigError("node grids violate nesting: " + violation->message());
  }
  return grids;
}

NodeGrid GifGrids::quadrature() const {
  return NodeGrid({rule.nodes().begin(), rule.nodes().end()}, GridPurpose::quadrature);
}

CgmmBelief time_update(const GaussianState& prior, const Dynamics& dynamics, const Matrix& q,
                       const NodeGrid& grid, BankFlavor flavor) {
  const Eigen::Index n = dynamics.state_dim;
  const Eigen::Index nv = dynamics.noise_dim;
  if (prior.mean.size() != n || q.rows() != nv || q.cols() != nv) {
    throw DomainError("time_update: dimension mismatch");
  }
  std::vector<Mixand> mixands(grid.size());

  if (flavor == BankFlavor::ekf) {
    const Vector predicted = checked_propagation(dynamics, prior.mean, Vector::Zero(nv));
    const Matrix f = state_jacobian(dynamics, prior.mean);
    const Matrix gamma = noise_jacobian(dynamics, prior.mean);
    const Matrix base = f * prior.covariance * f.transpose();
    const Matrix noise = gamma * symmetrized(q) * gamma.transpose();
    (void)psd_sqrt(q, "process noise covariance");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      mixands[i] = {grid[i], predicted,
                    lower_cholesky(base + grid[i] * noise, "predicted mixand covariance"), 0.0};
    }
    return CgmmBelief(grid, std::move(mixands));
  }

  // Augmented unscented transform over [x; v] with covariance diag(P, z Q).
  // The 2n + 1 points that leave v at zero do not depend on z and are
  // propagated once; each node adds its own 2 dim(v) noise points.
  const auto w = UnscentedWeights::for_dimension(n + nv);
  const Matrix chol_p = lower_cholesky(prior.covariance, "prior covariance");
  const Matrix sqrt_q = psd_sqrt(q, "process noise covariance");
  const Vector v0 = Vector::Zero(nv);

  const Vector centre = checked_propagation(dynamics, prior.mean, v0);
  Matrix shared(n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    shared.col(j) = checked_propagation(dynamics, prior.mean + w.spread * chol_p.col(j), v0);
    shared.col(n + j) = checked_propagation(dynamics, prior.mean - w.spread * chol_p.col(j), v0);
  }

  Matrix noise_points(n, 2 * nv);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double scale = w.spread * std::sqrt(grid[i]);
    for (Eigen::Index j = 0; j < nv; ++j) {
      noise_points.col(j) = checked_propagation(dynamics, prior.mean, scale * sqrt_q.col(j));
      noise_points.col(nv + j) = checked_propagation(dynamics, prior.mean, -scale * sqrt_q.col(j));
    }
    const Vector mean =
        w.mean0 * centre + w.other * (shared.rowwise().sum() + noise_points.rowwise().sum());
    Matrix cov = w.cov0 * (centre - mean) * (centre - mean).transpose();
    const Matrix ds = shared.colwise() - mean;
    const Matrix dn = noise_points.colwise() - mean;
    cov.noalias() += w.other * (ds * ds.transpose());
    cov.noalias() += w.other * (dn * dn.transpose());
    mixands[i] = {grid[i], mean, lower_cholesky(cov, "predicted mixand covariance"), 0.0};
  }
  return CgmmBelief(grid, std::move(mixands));
}

CgmmBelief measurement_update(const CgmmBelief& belief, const Vector& y,
                              const MeasurementModel& model, const Matrix& r, BankFlavor flavor) {
  check_dims(belief, y, model, r);
  (void)lower_cholesky(r, "measurement noise covariance");
  std::vector<Mixand> out = belief.mixands();

  if (flavor == BankFlavor::ekf) {
    // h(x) and H are shared by all mixands with the same predicted mean.
    Vector shared_at;
    Vector dy;
    Matrix h;
    for (Mixand& m : out) {
      if (shared_at.size() == 0 || shared_at != m.mean) {
        const Vector expected = model.predict(m.mean);
        if (!expected.allFinite()) {
          throw NumericalError("measurement model returned non-finite values");
        }
        dy = wrapped(model, y - expected);
        h = measurement_jacobian(model, m.mean);
        shared_at = m.mean;
      }
      const Correction c = ekf_correct(m.mean, m.covariance(), dy, h, r);
      m.log_weight += c.log_likelihood;
      m.mean = c.mean;
      m.chol = c.chol;
    }
    return CgmmBelief(belief.grid(), std::move(out));
  }

  for (Mixand& m : out) {
    const Correction c = ukf_correct(m.mean, m.chol, y, model, r);
    m.log_weight += c.log_likelihood;
    m.mean = c.mean;
    m.chol = c.chol;
  }
  return CgmmBelief(belief.grid(), std::move(out));
}

WeightedGmm quadrature_reduce(const CgmmBelief& belief, const GaussLaguerreRule& rule,
                              InterpScale scale) {
  const NodeGrid nodes({rule.nodes().begin(), rule.nodes().end()}, GridPurpose::quadrature);
  const CgmmBelief remapped = remap_belief(belief, nodes, scale);
  const auto w = rule.weights();

  std::vector<double> log_hat(remapped.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < remapped.size(); ++i) {
    const double lw = remapped.mixands()[i].log_weight;
    if (std::isnan(lw)) throw NumericalError("quadrature_reduce: NaN log-weight");
    log_hat[i] = std::log(w[i]) + lw;
    max_log = std::max(max_log, log_hat[i]);
  }
  if (!std::isfinite(max_log)) {
    throw DegeneratePosteriorError("quadrature_reduce: all posterior weights vanished");
  }
  double total = 0.0;
  for (double& v : log_hat) {
    v = std::exp(v - max_log);
    total += v;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegeneratePosteriorError("quadrature_reduce: weights do not normalize");
  }

  WeightedGmm gmm;
  gmm.components.reserve(remapped.size());
  for (std::size_t i = 0; i < remapped.size(); ++i) {
    const Mixand& m = remapped.mixands()[i];
    gmm.components.push_back({log_hat[i] / total, GaussianState{m.mean, m.covariance()}, m.z});
  }
  return gmm;
}

GaussianState moment_match(const WeightedGmm& gmm) {
  if (gmm.components.empty()) throw DomainError("moment_match: empty mixture");
  const Eigen::Index n = gmm.components.front().state.mean.size();
  Vector mean = Vector::Zero(n);
  for (const auto& c : gmm.components) mean += c.weight * c.state.mean;
  Matrix cov = Matrix::Zero(n, n);
  for (const auto& c : gmm.components) {
    const Vector d = c.state.mean - mean;
    cov += c.weight * (c.state.covariance + d * d.transpose());
  }
  return {mean, symmetrized(cov)};
}

std::vector<EigenWeight> eigen_weight_profile(const WeightedGmm& gmm) {
  std::vector<EigenWeight> out;
  out.reserve(gmm.components.size());
  for (const auto& c : gmm.components) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(c.state.covariance),
                                                 Eigen::EigenvaluesOnly);
    const Vector& ev = solver.eigenvalues();
    out.push_back({c.z, ev.minCoeff(), ev.maxCoeff(), c.weight});
  }
  return out;
}

GaussianIntegralFilter::GaussianIntegralFilter(GifConfig config)
    : config_(config), grids_(GifGrids::from_config(config)) {}

GifStepResult GaussianIntegralFilter::step(const GaussianState& prior, const Vector& y,
                                           const Dynamics& dynamics, const MeasurementModel& model,
                                           const Matrix& q, const Matrix& r) const {
  const CgmmBelief predicted = time_update(prior, dynamics, q, grids_.time, config_.flavor);
  const CgmmBelief at_measurement = remap_belief(predicted, grids_.measurement, config_.scale);
  const CgmmBelief updated = measurement_update(at_measurement, y, model, r, config_.flavor);
  GifStepResult result;
  result.diagnostics.posterior_mixture = quadrature_reduce(updated, grids_.rule, config_.scale);
  result.diagnostics.profile = eigen_weight_profile(result.diagnostics.posterior_mixture);
  result.posterior = moment_match(result.diagnostics.posterior_mixture);
  result.posterior.validate("GIF posterior");
  return result;
}

GifStepResult gif_step(const GaussianState& prior, const Vector& y, const Dynamics& dynamics,
                       const MeasurementModel& model, const Matrix& q, const Matrix& r,
                       const GifConfig& config) {
  return GaussianIntegralFilter(config).step(prior, y, dynamics, model, q, r);
}

GaussianState baseline_ukf_step(const GaussianState& prior, const Vector& y,
                                const Dynamics& dynamics, const MeasurementModel& model,
                                const Matrix& q, const Matrix& r) {
  const Eigen::Index n = dynamics.state_dim;
  const Eigen::Index nv = dynamics.noise_dim;
  if (prior.mean.size() != n || q.rows() != nv || y.size() != model.dim) {
    throw DomainError("baseline_ukf_step: dimension mismatch");
  }
  const Eigen::Index na = n + nv;
  const auto w = UnscentedWeights::for_dimension(na);

  Matrix sqrt_aug = Matrix::Zero(na, na);
  sqrt_aug.topLeftCorner(n, n) = lower_cholesky(prior.covariance, "prior covariance");
  sqrt_aug.bottomRightCorner(nv, nv) = psd_sqrt(q, "process noise covariance");
  Vector aug = Vector::Zero(na);
  aug.head(n) = prior.mean;

  const Eigen::Index count = 2 * na + 1;
  Matrix propagated(n, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    Vector point = aug;
    if (i > 0) {
      const Eigen::Index j = (i - 1) % na;
      const double sign = (i <= na) ? 1.0 : -1.0;
      point += sign * w.spread * sqrt_aug.col(j);
    }
    propagated.col(i) = checked_propagation(dynamics, point.head(n), point.tail(nv));
  }
  Vector mean = w.mean0 * propagated.col(0);
  for (Eigen::Index i = 1; i < count; ++i) mean += w.other * propagated.col(i);
  Matrix cov = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vector d = propagated.col(i) - mean;
    cov += ((i == 0) ? w.cov0 : w.other) * d * d.transpose();
  }
  const Correction c =
      ukf_correct(mean, lower_cholesky(cov, "UKF predicted covariance"), y, model, r);
  GaussianState out{c.mean, c.chol * c.chol.transpose()};
  out.validate("UKF posterior");
  return out;
}

GaussianState baseline_ekf_step(const GaussianState& prior, const Vector& y,
                                const Dynamics& dynamics, const MeasurementModel& model,
                                const Matrix& q, const Matrix& r) {
  const Eigen::Index nv = dynamics.noise_dim;
  if (prior.mean.size() != dynamics.state_dim || q.rows() != nv || y.size() != model.dim) {
    throw DomainError("baseline_ekf_step: dimension mismatch");
  }
  const Vector predicted = checked_propagation(dynamics, prior.mean, Vector::Zero(nv));
  const Matrix f = state_jacobian(dynamics, prior.mean);
  const Matrix gamma = noise_jacobian(dynamics, prior.mean);
  const Matrix cov = f * prior.covariance * f.transpose() + gamma * q * gamma.transpose();
  const Vector dy = wrapped(model, y - model.predict(predicted));
  const Correction c = ekf_correct(predicted, symmetrized(cov), dy,
                                   measurement_jacobian(model, predicted), r);
  GaussianState out{c.mean, c.chol * c.chol.transpose()};
  out.validate("EKF posterior");
  return out;
}

}  // namespace gif
