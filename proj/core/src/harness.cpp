#include "gif/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "gif/errors.hpp"
#include "gif/models.hpp"

namespace gif::harness {

std::mt19937_64 run_stream(std::uint64_t seed, std::size_t run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

EigenWeightTable linear_toy_case(const ScenarioConfig& config, bool full_rank, std::size_t n_m) {
  const auto model = full_rank ? models::LinearModel::toy_full_rank()
                               : models::LinearModel::toy_rank_deficient();
  const GaussianState prior{Vector::Zero(3), Matrix::Identity(3, 3)};
  const Matrix q = config.linear_q_scale * Matrix::Identity(3, 3);
  const GifConfig gif_config{n_m, n_m, n_m, config.gif.flavor};
  const auto result = gif_step(prior, config.linear_y, model.dynamics(), model.measurement(), q,
                               model.r, gif_config);
  return {full_rank ? "full_rank" : "rank_deficient", n_m, result.diagnostics.profile};
}

std::vector<EigenWeightTable> run_linear_toy(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::linear_toy) {
    throw ConfigError("run_linear_toy: scenario.kind must be linear_toy");
  }
  config.validate();
  std::vector<EigenWeightTable> tables;
  for (bool full_rank : {true, false}) {
    for (std::size_t n : config.linear_n_m) tables.push_back(linear_toy_case(config, full_rank, n));
  }
  return tables;
}

void aggregate(RunMetrics& metrics) {
  double pos_sq = 0.0;
  double vel_sq = 0.0;
  std::size_t samples = 0;
  std::size_t axis_out = 0;
  std::size_t nees_out = 0;
  metrics.runs = metrics.traces.size();
  metrics.failed_runs = 0;
  for (const RunTrace& trace : metrics.traces) {
    if (trace.failed) {
      ++metrics.failed_runs;
      continue;
    }
    for (const EpochRecord& e : trace.epochs) {
      pos_sq += e.error.head<3>().squaredNorm();
      vel_sq += e.error.tail<3>().squaredNorm();
      for (int i = 0; i < 6; ++i) {
        if (std::abs(e.error[i]) > e.three_sigma[i]) ++axis_out;
      }
      if (e.nees > kNees3SigmaThreshold) ++nees_out;
      ++samples;
    }
  }
  if (samples == 0) {
    metrics.position_rmse = metrics.velocity_rmse = 0.0;
    metrics.pct_outside_3sigma = metrics.pct_outside_nees = 0.0;
    return;
  }
  const double n = static_cast<double>(samples);
  metrics.position_rmse = std::sqrt(pos_sq / n);
  metrics.velocity_rmse = std::sqrt(vel_sq / n);
  metrics.pct_outside_3sigma = 100.0 * static_cast<double>(axis_out) / (6.0 * n);
  metrics.pct_outside_nees = 100.0 * static_cast<double>(nees_out) / n;
}

namespace {

EpochRecord record(std::size_t epoch, double time, const GaussianState& estimate,
                   const Vector& truth) {
  EpochRecord r;
  r.epoch = epoch;
  r.time = time;
  r.error = estimate.mean - truth;
  r.three_sigma = 3.0 * estimate.covariance.diagonal().cwiseSqrt();
  const Eigen::LLT<Matrix> llt(estimate.covariance);
  r.nees = (llt.info() == Eigen::Success) ? r.error.dot(llt.solve(Vector(r.error)))
                                          : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

RunMetrics run_orbit_mc(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::orbit_track) {
    throw ConfigError("run_orbit_mc: scenario.kind must be orbit_track");
  }
  config.validate();

  const Matrix q = config.process_noise();
  const Matrix r = config.measurement_noise();
  const Matrix chol_r = lower_cholesky(r, "measurement noise");
  const GaussianState initial = config.initial_state();
  const Matrix chol_p0 = lower_cholesky(initial.covariance, "initial covariance");
  const Dynamics dynamics = models::orbit_dynamics(config.cadence, config.constants, config.substep,
                                                   config.noise_frame);
  const MeasurementModel radar = models::radar_model();
  const models::AlongTrackThrust truth_thrust{config.truth_thrust};

  std::optional<GaussianIntegralFilter> filter;
  if (config.variant != FilterVariant::ukf) filter.emplace(config.gif);

  RunMetrics metrics;
  metrics.variant = config.variant;
  metrics.n_t = config.variant == FilterVariant::ukf ? 1 : config.gif.n_t;
  metrics.n_m = config.variant == FilterVariant::ukf ? 1 : config.gif.n_m;

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t run = 0; run < config.runs; ++run) {
    auto rng = run_stream(config.seed, run);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto draw = [&](Eigen::Index n) {
      Vector v(n);
      for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
      return v;
    };

    RunTrace trace;
    trace.run = run;
    auto truth = models::OrbitState::from_vector(initial.mean + chol_p0 * draw(6));
    GaussianState estimate = initial;
    try {
      for (std::size_t k = 1; k <= config.epochs; ++k) {
        truth = models::propagate(truth, truth_thrust, config.cadence, config.constants,
                                  config.substep);
        const Vector y = models::radar_measure(truth) + chol_r * draw(4);
        estimate = filter ? filter->step(estimate, y, dynamics, radar, q, r).posterior
                          : baseline_ukf_step(estimate, y, dynamics, radar, q, r);
        trace.epochs.push_back(
            record(k, static_cast<double>(k) * config.cadence, estimate, truth.to_vector()));
      }
    } catch (const Error& e) {
      trace.failed = true;
      trace.failure = e.what();
    }
    metrics.traces.push_back(std::move(trace));
  }
  metrics.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  aggregate(metrics);
  return metrics;
}

std::vector<RunMetrics> run_table1(const ScenarioConfig& config) {
  std::vector<RunMetrics> rows;
  for (std::size_t n_m : config.table1_n_m) {
    for (std::size_t n_t : config.table1_n_t) {
      ScenarioConfig c = config;
      c.variant = FilterVariant::gif_interp;
      c.gif = GifConfig{n_t, n_m, n_m, config.gif.flavor, config.gif.scale};
      rows.push_back(run_orbit_mc(c));
    }
  }
  return rows;
}

std::vector<RunMetrics> run_table1_references(const ScenarioConfig& config) {
  ScenarioConfig constant = config;
  const std::size_t n = config.table1_reference_nodes;
  constant.variant = FilterVariant::gif;
  constant.gif = GifConfig{n, n, n, config.gif.flavor, config.gif.scale};
  ScenarioConfig ukf = config;
  ukf.variant = FilterVariant::ukf;
  return {run_orbit_mc(constant), run_orbit_mc(ukf)};
}

BallisticGap ballistic_gap_check(const ScenarioConfig& config) {
  config.constants.validate();
  const models::OrbitState start{config.init_position, config.init_velocity};
  const auto thrusting = models::propagate(start, models::AlongTrackThrust{config.truth_thrust},
                                           config.cadence, config.constants, config.substep);
  const auto ballistic = models::propagate(start, models::AlongTrackThrust{0.0}, config.cadence,
                                           config.constants, config.substep);
  return {(thrusting.position - ballistic.position).norm(),
          (thrusting.velocity - ballistic.velocity).norm()};
}

}  // namespace gif::harness
