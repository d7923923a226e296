#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gif/config.hpp"
#include "gif/filter.hpp"

namespace gif::harness {

// Chi-square 6-dof quantile at the two-sided 3-sigma probability 0.9973002.
inline constexpr double kNees3SigmaThreshold = 20.062086165714;

struct EpochRecord {
  std::size_t epoch = 0;
  double time = 0.0;                       // s since the initial epoch
  Eigen::Matrix<double, 6, 1> error;       // estimate - truth
  Eigen::Matrix<double, 6, 1> three_sigma; // 3 sqrt(diag P)
  double nees = 0.0;                       // e^T P^{-1} e
};

struct RunTrace {
  std::size_t run = 0;
  bool failed = false;
  std::string failure;
  std::vector<EpochRecord> epochs;
};

struct RunMetrics {
  FilterVariant variant = FilterVariant::gif;
  std::size_t n_t = 0;
  std::size_t n_m = 0;
  double position_rmse = 0.0;       // m
  double velocity_rmse = 0.0;       // m/s
  double pct_outside_3sigma = 0.0;  // per scalar axis, percent
  double pct_outside_nees = 0.0;    // per state vector, percent
  double wall_clock_s = 0.0;
  std::size_t runs = 0;
  std::size_t failed_runs = 0;
  std::vector<RunTrace> traces;
};

struct EigenWeightTable {
  std::string case_name;  // "full_rank" or "rank_deficient"
  std::size_t n_m = 0;
  std::vector<EigenWeight> rows;
};

struct BallisticGap {
  double position = 0.0;  // m
  double velocity = 0.0;  // m/s
};

// Independent random stream for Monte Carlo run `run` of a seeded study.
std::mt19937_64 run_stream(std::uint64_t seed, std::size_t run);

// One time update and one measurement update of the 3-D toy problem for
// each requested n_m and both measurement matrices.
std::vector<EigenWeightTable> run_linear_toy(const ScenarioConfig& config);
EigenWeightTable linear_toy_case(const ScenarioConfig& config, bool full_rank, std::size_t n_m);

// Monte Carlo study of the configured filter on the orbit tracking problem.
RunMetrics run_orbit_mc(const ScenarioConfig& config);

// Aggregates per-run traces into RMSE and 3-sigma statistics.
void aggregate(RunMetrics& metrics);

// Interpolated-node variants for every (n_t, n_m) with n_q = n_m.
std::vector<RunMetrics> run_table1(const ScenarioConfig& config);
// Constant-node GIF with table1_reference_nodes nodes and the single UKF.
std::vector<RunMetrics> run_table1_references(const ScenarioConfig& config);

// Nominal initial state propagated one cadence interval with and without thrust.
BallisticGap ballistic_gap_check(const ScenarioConfig& config);

}  // namespace gif::harness
