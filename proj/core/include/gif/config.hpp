#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gif/filter.hpp"
#include "gif/models.hpp"

namespace gif::harness {

enum class ScenarioKind { linear_toy, orbit_track };
enum class FilterVariant { gif, gif_interp, ukf };

std::string_view to_string(ScenarioKind kind);
std::string_view to_string(FilterVariant variant);
FilterVariant parse_filter_variant(std::string_view text);

// Declarative experiment description.
//
// Text form is one `key = value` per line with dotted keys; `#` starts a
// comment and vectors are whitespace separated, e.g.
//
//   scenario.kind = orbit_track
//   gif.n_m = 25          # measurement / quadrature nodes
//   init.position = 0 7000000 0
//
// echo() prints every key in a fixed order with 17 significant digits, so a
// resolved configuration parses back to itself.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::orbit_track;
  FilterVariant variant = FilterVariant::gif;
  GifConfig gif{10, 10, 10, BankFlavor::ukf};

  // Filter process noise: ML acceleration with covariance accel_sigma^2 I.
  double accel_sigma = 1e-5;   // m/s^2
  models::NoiseFrame noise_frame = models::NoiseFrame::velocity;
  double truth_thrust = 3e-4;  // m/s^2, along-track

  double sigma_range = 3.0;            // m
  double sigma_range_rate = 0.03;      // m/s
  double sigma_angle_deg = 0.015;      // deg, right ascension and declination

  models::Vector3 init_position{0.0, 7'000'000.0, 0.0};
  models::Vector3 init_velocity{5335.865, 0.0, 5335.865};
  double init_sigma_position = 100.0;  // m
  double init_sigma_velocity = 0.1;    // m/s

  double cadence = 10'000.0;  // s between measurements
  std::size_t epochs = 20;
  double substep = models::kDefaultSubstep;
  std::size_t runs = 50;
  std::uint64_t seed = 1;
  models::PhysicalConstants constants{};

  // Linear toy problem.
  std::vector<std::size_t> linear_n_m{5, 10, 20, 40};
  Vector linear_y = (Vector(3) << 0.0, -15.0, -6.0).finished();
  double linear_q_scale = 1.0;

  // Interpolated-node study.
  std::vector<std::size_t> table1_n_t{2, 3, 5};
  std::vector<std::size_t> table1_n_m{10, 15, 25};
  std::size_t table1_reference_nodes = 10;

  std::filesystem::path output_dir = "out";

  static ScenarioConfig parse(std::string_view text);
  static ScenarioConfig from_file(const std::filesystem::path& path);

  // Applies one key. Throws ConfigError for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  // Throws ConfigError when the configuration is inconsistent.
  void validate() const;
  std::string echo() const;

  Matrix process_noise() const;      // accel_sigma^2 I_3
  Matrix measurement_noise() const;  // diag of squared radar sigmas
  GaussianState initial_state() const;
};

}  // namespace gif::harness
