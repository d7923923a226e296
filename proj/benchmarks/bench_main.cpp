#include <benchmark/benchmark.h>

#include "gif/config.hpp"
#include "gif/filter.hpp"
#include "gif/interp.hpp"
#include "gif/models.hpp"
#include "gif/quadrature.hpp"

namespace {

using namespace gif;

void BM_BuildRule(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    GaussLaguerreRule rule(n);
    benchmark::DoNotOptimize(rule.nodes().data());
  }
}
BENCHMARK(BM_BuildRule)->Arg(10)->Arg(25)->Arg(64);

void BM_OrbitTimeUpdate(benchmark::State& state) {
  const harness::ScenarioConfig config;
  const auto dynamics = models::orbit_dynamics(config.cadence, config.constants, config.substep);
  const GifConfig gif{static_cast<std::size_t>(state.range(0)),
                      static_cast<std::size_t>(state.range(1)),
                      static_cast<std::size_t>(state.range(1))};
  const auto grids = GifGrids::from_config(gif);
  const GaussianState prior = config.initial_state();
  const Matrix q = config.process_noise();
  for (auto _ : state) {
    auto belief = time_update(prior, dynamics, q, grids.time, BankFlavor::ukf);
    benchmark::DoNotOptimize(belief.mixands().data());
  }
}
BENCHMARK(BM_OrbitTimeUpdate)->Args({2, 25})->Args({10, 10})->Unit(benchmark::kMillisecond);

void BM_OrbitUkfStep(benchmark::State& state) {
  const harness::ScenarioConfig config;
  const auto dynamics = models::orbit_dynamics(config.cadence, config.constants, config.substep);
  const auto radar = models::radar_model();
  const GaussianState prior = config.initial_state();
  const auto truth = models::propagate(models::OrbitState{config.init_position, config.init_velocity},
                                       models::AlongTrackThrust{config.truth_thrust},
                                       config.cadence, config.constants, config.substep);
  const Vector y = models::radar_measure(truth);
  for (auto _ : state) {
    auto post = baseline_ukf_step(prior, y, dynamics, radar, config.process_noise(),
                                  config.measurement_noise());
    benchmark::DoNotOptimize(post.mean.data());
  }
}
BENCHMARK(BM_OrbitUkfStep)->Unit(benchmark::kMillisecond);

void BM_Remap(benchmark::State& state) {
  const auto n_m = static_cast<std::size_t>(state.range(0));
  const auto grids = GifGrids::from_config(GifConfig{2, n_m, n_m});
  const auto model = models::LinearModel::toy_full_rank();
  const auto belief = time_update(GaussianState{Vector::Zero(3), Matrix::Identity(3, 3)},
                                  model.dynamics(), Matrix::Identity(3, 3), grids.time,
                                  BankFlavor::ekf);
  for (auto _ : state) {
    auto out = remap_belief(belief, grids.measurement, InterpScale::sqrt_z);
    benchmark::DoNotOptimize(out.mixands().data());
  }
}
BENCHMARK(BM_Remap)->Arg(10)->Arg(25);

}  // namespace

BENCHMARK_MAIN();
