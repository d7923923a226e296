#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "gif/errors.hpp"
#include "gif/filter.hpp"
#include "gif/linalg.hpp"
#include "gif/models.hpp"

namespace {

using namespace gif;
using models::LinearModel;

Matrix random_spd(Eigen::Index d, std::mt19937_64& rng, double floor = 0.3) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a = Matrix::NullaryExpr(d, d, [&] { return n(rng); });
  return a * a.transpose() + floor * Matrix::Identity(d, d);
}

NodeGrid rule_grid(std::size_t n, GridPurpose purpose) {
  GaussLaguerreRule rule(n);
  return NodeGrid({rule.nodes().begin(), rule.nodes().end()}, purpose);
}

double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

LinearModel random_linear(std::mt19937_64& rng, int nx, int nv, int ny) {
  std::normal_distribution<double> n(0.0, 1.0);
  LinearModel m;
  m.f = Matrix::Identity(nx, nx) + 0.3 * Matrix::NullaryExpr(nx, nx, [&] { return n(rng); });
  m.gamma = Matrix::NullaryExpr(nx, nv, [&] { return n(rng); });
  m.h = Matrix::NullaryExpr(ny, nx, [&] { return n(rng); });
  m.r = random_spd(ny, rng, 0.5);
  return m;
}

TEST(UnscentedWeights, ParametersForDimension) {
  for (Eigen::Index n : {1, 3, 6, 9}) {
    const auto w = UnscentedWeights::for_dimension(n);
    const double lambda = 3.0 - static_cast<double>(n);
    EXPECT_NEAR(w.mean0, lambda / 3.0, 1e-15);
    EXPECT_NEAR(w.cov0, lambda / 3.0 + 2.0, 1e-15);
    EXPECT_NEAR(w.other, 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(w.spread, std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(w.mean0 + 2.0 * static_cast<double>(n) * w.other, 1.0, 1e-14);
  }
}

TEST(GifGrids, ConstantAndInterpolatedLayouts) {
  const auto constant = GifGrids::from_config({10, 10, 10, BankFlavor::ukf});
  EXPECT_TRUE(constant.time.same_nodes(constant.measurement));
  EXPECT_TRUE(constant.quadrature().same_nodes(constant.measurement));

  const auto interp = GifGrids::from_config({3, 15, 15, BankFlavor::ukf});
  ASSERT_EQ(interp.time.size(), 3u);
  EXPECT_EQ(interp.time.front(), interp.measurement.front());
  EXPECT_EQ(interp.time.back(), interp.measurement.back());
  const double mid = 0.5 * (std::sqrt(interp.time.front()) + std::sqrt(interp.time.back()));
  EXPECT_NEAR(interp.time[1], mid * mid, 1e-12);

  const auto single = GifGrids::from_config({1, 1, 1, BankFlavor::ekf});
  EXPECT_DOUBLE_EQ(single.time[0], 1.0);
}

TEST(GifGrids, InvalidCountsAreConfigErrors) {
  EXPECT_THROW(GifGrids::from_config({0, 10, 10}), ConfigError);
  EXPECT_THROW(GifGrids::from_config({5, 3, 3}), ConfigError);
  EXPECT_THROW(GifGrids::from_config({1, 10, 10}), ConfigError);
  EXPECT_THROW(GifGrids::from_config({2, 10, 11}), ConfigError);  // quadrature beyond measurement span
  EXPECT_THROW(GifGrids::from_config({2, 65, 65}), ConfigError);
  EXPECT_NO_THROW(GifGrids::from_config({2, 10, 9}));
}

TEST(TimeUpdate, ToyNodeOneDoublesCovariance) {
  const LinearModel toy = LinearModel::toy_full_rank();
  const GaussianState prior{Vector::Zero(3), Matrix::Identity(3, 3)};
  const NodeGrid g({1.0, 2.0}, GridPurpose::time_update);
  for (BankFlavor flavor : {BankFlavor::ekf, BankFlavor::ukf}) {
    const CgmmBelief b = time_update(prior, toy.dynamics(), Matrix::Identity(3, 3), g, flavor);
    EXPECT_TRUE(b.mixands()[0].covariance().isApprox(2.0 * Matrix::Identity(3, 3), 1e-13));
    EXPECT_TRUE(b.mixands()[1].covariance().isApprox(3.0 * Matrix::Identity(3, 3), 1e-13));
    for (const auto& m : b.mixands()) EXPECT_EQ(m.log_weight, 0.0);
  }
}

TEST(TimeUpdate, ZeroNoiseGivesIdenticalMixands) {
  std::mt19937_64 rng(4);
  const LinearModel m = random_linear(rng, 4, 2, 2);
  const GaussianState prior{Vector::Ones(4), random_spd(4, rng)};
  const NodeGrid g = rule_grid(6, GridPurpose::time_update);
  const Matrix expected = m.f * prior.covariance * m.f.transpose();
  for (BankFlavor flavor : {BankFlavor::ekf, BankFlavor::ukf}) {
    const CgmmBelief b = time_update(prior, m.dynamics(), Matrix::Zero(2, 2), g, flavor);
    for (const auto& mix : b.mixands()) {
      EXPECT_LT(rel_diff(mix.covariance(), expected), 1e-12);
      EXPECT_TRUE(mix.mean.isApprox(m.f * prior.mean, 1e-13));
    }
  }
}

TEST(TimeUpdate, SharedStateSigmaPointsInUkfBank) {
  const models::PhysicalConstants consts;
  Dynamics dyn = models::orbit_dynamics(10'000.0, consts);
  int calls = 0;
  auto inner = dyn.propagate;
  dyn.propagate = [&](const Vector& x, const Vector& v) {
    ++calls;
    return inner(x, v);
  };
  GaussianState prior{Vector(6), Matrix::Identity(6, 6)};
  prior.mean << 0.0, 7.0e6, 0.0, 5335.865, 0.0, 5335.865;
  prior.covariance.topLeftCorner(3, 3) *= 1e4;
  prior.covariance.bottomRightCorner(3, 3) *= 1e-2;
  const NodeGrid g = rule_grid(10, GridPurpose::time_update);
  time_update(prior, dyn, 1e-10 * Matrix::Identity(3, 3), g, BankFlavor::ukf);
  EXPECT_EQ(calls, 19 + 9 * 6);
}

TEST(MeasurementUpdate, ScalarKalmanOracle) {
  const NodeGrid g({1.0}, GridPurpose::measurement_update);
  CgmmBelief b(g, {{1.0, Vector::Zero(1), std::sqrt(2.0) * Matrix::Identity(1, 1), 0.0}});
  LinearModel m{Matrix::Identity(1, 1), Matrix::Identity(1, 1), Matrix::Identity(1, 1),
                Matrix::Identity(1, 1)};
  const Vector y = Vector::Constant(1, 3.0);
  for (BankFlavor flavor : {BankFlavor::ekf, BankFlavor::ukf}) {
    const CgmmBelief post = measurement_update(b, y, m.measurement(), m.r, flavor);
    EXPECT_NEAR(post.mixands()[0].mean[0], 2.0, 1e-12);
    EXPECT_NEAR(post.mixands()[0].covariance()(0, 0), 2.0 / 3.0, 1e-12);
    const double loglik = -0.5 * (std::log(2 * std::numbers::pi * 3.0) + 9.0 / 3.0);
    EXPECT_NEAR(post.mixands()[0].log_weight, loglik, 1e-12);
  }
}

TEST(MeasurementUpdate, UninformativeMeasurementLeavesPrior) {
  const LinearModel toy = LinearModel::toy_full_rank();
  const GaussianState prior{Vector::Zero(3), Matrix::Identity(3, 3)};
  const NodeGrid g = rule_grid(8, GridPurpose::measurement_update);
  const CgmmBelief b =
      time_update(prior, toy.dynamics(), Matrix::Identity(3, 3), g, BankFlavor::ekf);
  const Vector y = (Vector(3) << 0.0, -15.0, -6.0).finished();
  for (BankFlavor flavor : {BankFlavor::ekf, BankFlavor::ukf}) {
    const CgmmBelief post =
        measurement_update(b, y, toy.measurement(), 1e12 * Matrix::Identity(3, 3), flavor);
    for (std::size_t i = 0; i < b.size(); ++i) {
      EXPECT_LT(rel_diff(post.mixands()[i].covariance(), b.mixands()[i].covariance()), 1e-6);
      EXPECT_LT((post.mixands()[i].mean - b.mixands()[i].mean).norm(), 1e-6);
      EXPECT_NEAR(post.mixands()[i].log_weight, post.mixands()[0].log_weight, 1e-9);
    }
  }
}

TEST(MeasurementUpdate, LargeInnovationFavoursInflatedNodes) {
  const LinearModel toy = LinearModel::toy_full_rank();
  const GaussianState prior{Vector::Zero(3), Matrix::Identity(3, 3)};
  const NodeGrid g = rule_grid(10, GridPurpose::measurement_update);
  const CgmmBelief b =
      time_update(prior, toy.dynamics(), Matrix::Identity(3, 3), g, BankFlavor::ukf);
  const Vector y = (Vector(3) << 0.0, -15.0, -6.0).finished();
  const CgmmBelief post = measurement_update(b, y, toy.measurement(), toy.r, BankFlavor::ukf);
  EXPECT_LT(post.mixands()[0].log_weight, post.mixands()[5].log_weight);
  EXPECT_LT(post.mixands()[1].log_weight, post.mixands()[5].log_weight);
}

TEST(MeasurementUpdate, JosephFormKeepsCovarianceSymmetricPsd) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const LinearModel m = random_linear(rng, 5, 3, 3);
    const NodeGrid g = rule_grid(5, GridPurpose::measurement_update);
    const GaussianState prior{Vector::NullaryExpr(5, [&] { return n(rng); }), random_spd(5, rng)};
    const CgmmBelief b = time_update(prior, m.dynamics(), random_spd(3, rng), g, BankFlavor::ekf);
    const Vector y = Vector::NullaryExpr(3, [&] { return 10.0 * n(rng); });
    for (BankFlavor flavor : {BankFlavor::ekf, BankFlavor::ukf}) {
      const CgmmBelief post = measurement_update(b, y, m.measurement(), m.r, flavor);
      for (const auto& mix : post.mixands()) EXPECT_TRUE(is_symmetric_psd(mix.covariance()));
    }
  }
}

TEST(QuadratureReduce, UniformLogWeightsGiveRuleWeights) {
  const GaussLaguerreRule rule(6);
  const NodeGrid g = rule_grid(6, GridPurpose::measurement_update);
  std::vector<Mixand> mix;
  for (double z : g.nodes()) mix.push_back({z, Vector::Zero(2), std::sqrt(z) * Matrix::Identity(2, 2), 4.2});
  const WeightedGmm gmm = quadrature_reduce(CgmmBelief(g, mix), rule);
  for (std::size_t i = 0; i < rule.order(); ++i) {
    EXPECT_NEAR(gmm.components[i].weight, rule.weights()[i], 1e-14);
  }
}

TEST(QuadratureReduce, PriorDensityWeightsOrderTwo) {
  const GaussLaguerreRule rule(2);
  const NodeGrid g = rule_grid(2, GridPurpose::measurement_update);
  std::vector<Mixand> mix;
  for (double z : g.nodes()) mix.push_back({z, Vector::Zero(1), Matrix::Identity(1, 1), -z});
  const WeightedGmm gmm = quadrature_reduce(CgmmBelief(g, mix), rule);
  const double z1 = 2.0 - std::sqrt(2.0), z2 = 2.0 + std::sqrt(2.0);
  const double w1 = (2.0 + std::sqrt(2.0)) / 4.0, w2 = (2.0 - std::sqrt(2.0)) / 4.0;
  const double ratio = (w1 * std::exp(-z1)) / (w2 * std::exp(-z2));
  EXPECT_NEAR(gmm.components[0].weight / gmm.components[1].weight, ratio, 1e-12 * ratio);
  EXPECT_NEAR(gmm.components[0].weight + gmm.components[1].weight, 1.0, 1e-15);
}

TEST(QuadratureReduce, NormalizedAndShiftInvariant) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 1.0);
  const GaussLaguerreRule rule(12);
  const NodeGrid source = NodeGrid({rule.nodes().front(), 1.0, 4.0, rule.nodes().back()},
                                   GridPurpose::measurement_update);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Mixand> mix;
    for (double z : source.nodes()) {
      mix.push_back({z, Vector::NullaryExpr(2, [&] { return n(rng); }),
                     std::sqrt(z) * Matrix::Identity(2, 2), 50.0 * n(rng)});
    }
    const CgmmBelief b(source, mix);
    for (InterpScale scale : {InterpScale::z, InterpScale::sqrt_z}) {
      const WeightedGmm a = quadrature_reduce(b, rule, scale);
      double sum = 0.0;
      for (const auto& c : a.components) sum += c.weight;
      EXPECT_NEAR(sum, 1.0, 1e-12);

      CgmmBelief shifted = b;
      for (auto& m : shifted.mixands()) m.log_weight += 1234.5;
      const WeightedGmm s = quadrature_reduce(shifted, rule, scale);
      for (std::size_t i = 0; i < a.components.size(); ++i) {
        EXPECT_NEAR(s.components[i].weight, a.components[i].weight, 1e-12);
      }
    }
  }
}

TEST(QuadratureReduce, Errors) {
  const GaussLaguerreRule rule(3);
  const NodeGrid narrow({1.0, 2.0}, GridPurpose::measurement_update);
  std::vector<Mixand> mix{{1.0, Vector::Zero(1), Matrix::Identity(1, 1), 0.0},
                          {2.0, Vector::Zero(1), Matrix::Identity(1, 1), 0.0}};
  EXPECT_THROW(quadrature_reduce(CgmmBelief(narrow, mix), rule), NestingError);

  const NodeGrid g = rule_grid(3, GridPurpose::measurement_update);
  std::vector<Mixand> dead;
  for (double z : g.nodes()) {
    dead.push_back({z, Vector::Zero(1), Matrix::Identity(1, 1), -INFINITY});
  }
  EXPECT_THROW(quadrature_reduce(CgmmBelief(g, dead), rule), DegeneratePosteriorError);
}

TEST(MomentMatch, Examples) {
  Matrix p(2, 2);
  p << 2.0, 0.3, 0.3, 1.0;
  WeightedGmm one{{{1.0, {Vector::Ones(2), p}, 1.0}}};
  const GaussianState s = moment_match(one);
  EXPECT_EQ(s.mean, Vector::Ones(2));
  EXPECT_TRUE(s.covariance.isApprox(p, 1e-15));

  const Vector a = (Vector(2) << 1.5, -0.5).finished();
  WeightedGmm two{{{0.5, {a, p}, 1.0}, {0.5, {-a, p}, 2.0}}};
  const GaussianState t = moment_match(two);
  EXPECT_LT(t.mean.norm(), 1e-15);
  EXPECT_TRUE(t.covariance.isApprox(p + a * a.transpose(), 1e-14));

  EXPECT_THROW(moment_match(WeightedGmm{}), DomainError);
}

TEST(MomentMatch, AgreesWithSampling) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 1.0);
  WeightedGmm gmm;
  std::vector<double> w{0.1, 0.3, 0.2, 0.25, 0.15};
  for (double wi : w) {
    gmm.components.push_back(
        {wi, {Vector::NullaryExpr(3, [&] { return 3.0 * n(rng); }), random_spd(3, rng)}, 1.0});
  }
  const GaussianState mm = moment_match(gmm);
  std::discrete_distribution<int> pick(w.begin(), w.end());
  std::vector<Matrix> chol;
  for (const auto& c : gmm.components) chol.push_back(lower_cholesky(c.state.covariance, "c"));
  const int count = 1'000'000;
  Vector sum = Vector::Zero(3);
  Matrix outer = Matrix::Zero(3, 3);
  for (int i = 0; i < count; ++i) {
    const int k = pick(rng);
    const Vector x = gmm.components[k].state.mean +
                     chol[k] * Vector::NullaryExpr(3, [&] { return n(rng); });
    sum += x;
    outer += x * x.transpose();
  }
  const Vector mean = sum / count;
  const Matrix cov = outer / count - mean * mean.transpose();
  const double scale = mm.covariance.diagonal().maxCoeff();
  EXPECT_LT((mean - mm.mean).cwiseAbs().maxCoeff(), 0.01 * std::sqrt(scale));
  EXPECT_LT((cov - mm.covariance).cwiseAbs().maxCoeff(), 0.01 * scale);
}

TEST(EigenWeightProfile, Eigenvalues) {
  WeightedGmm gmm;
  gmm.components.push_back({0.4, {Vector::Zero(3), 2.5 * Matrix::Identity(3, 3)}, 1.0});
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 4.0, 1.0;
  gmm.components.push_back({0.6, {Vector::Zero(2), d}, 2.0});
  const auto p = eigen_weight_profile(gmm);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0].min_eigenvalue, 2.5, 1e-14);
  EXPECT_NEAR(p[0].max_eigenvalue, 2.5, 1e-14);
  EXPECT_NEAR(p[1].min_eigenvalue, 1.0, 1e-14);
  EXPECT_NEAR(p[1].max_eigenvalue, 4.0, 1e-14);
  EXPECT_EQ(p[1].weight, 0.6);
  EXPECT_EQ(p[1].z, 2.0);
}

TEST(Jacobians, NumericMatchesLinearModel) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  const LinearModel m = random_linear(rng, 4, 2, 3);
  const Vector x = Vector::NullaryExpr(4, [&] { return n(rng); });
  EXPECT_LT(rel_diff(numeric_state_jacobian(m.dynamics(), x), m.f), 1e-8);
  EXPECT_LT(rel_diff(numeric_noise_jacobian(m.dynamics(), x), m.gamma), 1e-8);
  EXPECT_LT(rel_diff(numeric_measurement_jacobian(m.measurement(), x), m.h), 1e-8);
}

TEST(Jacobians, OrbitDynamicsCentralDifferences) {
  // Oracle: Richardson-extrapolated central differences with their own steps.
  const models::PhysicalConstants consts;
  const Dynamics dyn = models::orbit_dynamics(10'000.0, consts);
  std::mt19937_64 rng(14);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto central = [&](const Vector& x, int j, double h) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    return Vector((dyn.propagate(xp, Vector::Zero(3)) - dyn.propagate(xm, Vector::Zero(3))) /
                  (2 * h));
  };
  for (int trial = 0; trial < 5; ++trial) {
    Vector x(6);
    x << 1e4 * n(rng), 7.0e6 + 1e4 * n(rng), 1e4 * n(rng), 5335.865 + n(rng), n(rng),
        5335.865 + n(rng);
    const Matrix f = numeric_state_jacobian(dyn, x);
    for (int j = 0; j < 6; ++j) {
      const double h = 2e-5 * (j < 3 ? 7e6 : 7.5e3);
      const Vector oracle = (4.0 * central(x, j, h / 2) - central(x, j, h)) / 3.0;
      EXPECT_LT((f.col(j) - oracle).norm(), 1e-5 * oracle.norm())
          << "trial " << trial << " column " << j;
    }
  }
}

TEST(GifStep, ZeroNoiseMatchesSingleFilters) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 1.0);
  const LinearModel m = random_linear(rng, 4, 2, 3);
  const GaussianState prior{Vector::NullaryExpr(4, [&] { return n(rng); }), random_spd(4, rng)};
  const Vector y = Vector::NullaryExpr(3, [&] { return n(rng); });
  const Matrix q = Matrix::Zero(2, 2);
  const auto ekf = baseline_ekf_step(prior, y, m.dynamics(), m.measurement(), q, m.r);
  const auto ukf = baseline_ukf_step(prior, y, m.dynamics(), m.measurement(), q, m.r);
  const auto ge = gif_step(prior, y, m.dynamics(), m.measurement(), q, m.r, {8, 8, 8, BankFlavor::ekf});
  const auto gu = gif_step(prior, y, m.dynamics(), m.measurement(), q, m.r, {3, 8, 8, BankFlavor::ukf});
  EXPECT_LT(rel_diff(ge.posterior.mean, ekf.mean), 1e-10);
  EXPECT_LT(rel_diff(ge.posterior.covariance, ekf.covariance), 1e-10);
  EXPECT_LT(rel_diff(gu.posterior.mean, ukf.mean), 1e-10);
  EXPECT_LT(rel_diff(gu.posterior.covariance, ukf.covariance), 1e-10);
  // For a linear model both references are the Kalman filter.
  const Matrix pp = m.f * prior.covariance * m.f.transpose();
  const Matrix s = m.h * pp * m.h.transpose() + m.r;
  const Matrix k = pp * m.h.transpose() * s.inverse();
  EXPECT_LT(rel_diff(ukf.covariance, pp - k * s * k.transpose()), 1e-9);
  EXPECT_LT(rel_diff(ukf.mean, m.f * prior.mean + k * (y - m.h * m.f * prior.mean)), 1e-9);
}

TEST(GifStep, SingleUnitNodeMatchesSingleFilters) {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> n(0.0, 1.0);
  const LinearModel m = random_linear(rng, 3, 3, 2);
  const GaussianState prior{Vector::NullaryExpr(3, [&] { return n(rng); }), random_spd(3, rng)};
  const Vector y = Vector::NullaryExpr(2, [&] { return n(rng); });
  const Matrix q = random_spd(3, rng);
  const auto ekf = baseline_ekf_step(prior, y, m.dynamics(), m.measurement(), q, m.r);
  const auto ukf = baseline_ukf_step(prior, y, m.dynamics(), m.measurement(), q, m.r);
  const auto ge = gif_step(prior, y, m.dynamics(), m.measurement(), q, m.r, {1, 1, 1, BankFlavor::ekf});
  const auto gu = gif_step(prior, y, m.dynamics(), m.measurement(), q, m.r, {1, 1, 1, BankFlavor::ukf});
  EXPECT_LT(rel_diff(ge.posterior.mean, ekf.mean), 1e-12);
  EXPECT_LT(rel_diff(ge.posterior.covariance, ekf.covariance), 1e-12);
  EXPECT_LT(rel_diff(gu.posterior.mean, ukf.mean), 1e-12);
  EXPECT_LT(rel_diff(gu.posterior.covariance, ukf.covariance), 1e-12);
}

TEST(GifStep, ConstantNodesSkipRemap) {
  const LinearModel toy = LinearModel::toy_full_rank();
  const GaussianState prior{Vector::Zero(3), Matrix::Identity(3, 3)};
  const Vector y = (Vector(3) << 0.0, -15.0, -6.0).finished();
  const GifConfig config{10, 10, 10, BankFlavor::ukf};
  const auto step = gif_step(prior, y, toy.dynamics(), toy.measurement(), Matrix::Identity(3, 3),
                             toy.r, config);
  // Manual composition without any remapping.
  const GaussLaguerreRule rule(10);
  const NodeGrid g = rule_grid(10, GridPurpose::measurement_update);
  const CgmmBelief tu = time_update(prior, toy.dynamics(), Matrix::Identity(3, 3), g, BankFlavor::ukf);
  const CgmmBelief mu = measurement_update(tu, y, toy.measurement(), toy.r, BankFlavor::ukf);
  std::vector<double> lw;
  for (const auto& m : mu.mixands()) lw.push_back(m.log_weight);
  const double top = *std::max_element(lw.begin(), lw.end());
  double total = 0.0;
  for (std::size_t i = 0; i < lw.size(); ++i) total += rule.weights()[i] * std::exp(lw[i] - top);
  for (std::size_t i = 0; i < lw.size(); ++i) {
    const auto& c = step.diagnostics.posterior_mixture.components[i];
    EXPECT_NEAR(c.weight, rule.weights()[i] * std::exp(lw[i] - top) / total, 1e-13);
    EXPECT_EQ(c.state.mean, mu.mixands()[i].mean);
  }
}

TEST(GifStep, PosteriorSymmetricPsdOnOrbitProblem) {
  const models::PhysicalConstants consts;
  const Dynamics dyn = models::orbit_dynamics(10'000.0, consts);
  const MeasurementModel radar = models::radar_model();
  GaussianState state{Vector(6), Matrix::Zero(6, 6)};
  state.mean << 0.0, 7.0e6, 0.0, 5335.865, 0.0, 5335.865;
  state.covariance.diagonal() << 1e4, 1e4, 1e4, 1e-2, 1e-2, 1e-2;
  models::OrbitState truth = models::OrbitState::from_vector(state.mean);
  Matrix r = Matrix::Zero(4, 4);
  const double ang = 0.015 * std::numbers::pi / 180.0;
  r.diagonal() << 9.0, 9e-4, ang * ang, ang * ang;
  const Matrix q = 1e-10 * Matrix::Identity(3, 3);
  const GaussianIntegralFilter filter({2, 10, 10, BankFlavor::ukf});
  for (int k = 0; k < 4; ++k) {
    truth = models::propagate(truth, models::AlongTrackThrust{3e-4}, 10'000.0, consts);
    const Vector y = models::radar_measure(truth);
    const auto step = filter.step(state, y, dyn, radar, q, r);
    EXPECT_TRUE(is_symmetric_psd(step.posterior.covariance, 1e-10));
    for (const auto& c : step.diagnostics.posterior_mixture.components) {
      EXPECT_TRUE(is_symmetric_psd(c.state.covariance, 1e-10));
    }
    state = step.posterior;
  }
}

TEST(GaussianState, Validate) {
  GaussianState ok{Vector::Zero(2), Matrix::Identity(2, 2)};
  EXPECT_NO_THROW(ok.validate());
  GaussianState wrong{Vector::Zero(3), Matrix::Identity(2, 2)};
  EXPECT_THROW(wrong.validate(), DomainError);
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.5;
  EXPECT_THROW((GaussianState{Vector::Zero(2), asym}.validate()), NumericalError);
  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  EXPECT_THROW((GaussianState{Vector::Zero(2), indefinite}.validate()), NumericalError);
}

}  // namespace
