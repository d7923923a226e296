#include "gif/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "gif/errors.hpp"

namespace gif::harness {

std::string_view to_string(ScenarioKind kind) {
  return kind == ScenarioKind::linear_toy ? "linear_toy" : "orbit_track";
}

std::string_view to_string(FilterVariant variant) {
  switch (variant) {
    case FilterVariant::gif:
      return "gif";
    case FilterVariant::gif_interp:
      return "gif-interp";
    case FilterVariant::ukf:
      return "ukf";
  }
  return "unknown";
}

FilterVariant parse_filter_variant(std::string_view text) {
  if (text == "gif") return FilterVariant::gif;
  if (text == "gif-interp") return FilterVariant::gif_interp;
  if (text == "ukf") return FilterVariant::ukf;
  throw ConfigError("unknown filter variant '" + std::string(text) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError("'" + std::string(key) + "': expected a number, got '" + std::string(text) +
                      "'");
  }
  return value;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("'" + std::string(key) + "': expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_doubles(std::string_view key, std::string_view text, std::size_t count) {
  std::vector<double> out;
  for (auto t : tokens(text)) out.push_back(parse_double(key, t));
  if (count != 0 && out.size() != count) {
    throw ConfigError("'" + std::string(key) + "': expected " + std::to_string(count) + " values");
  }
  return out;
}

std::vector<std::size_t> parse_sizes(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  for (auto t : tokens(text)) out.push_back(static_cast<std::size_t>(parse_u64(key, t)));
  if (out.empty()) throw ConfigError("'" + std::string(key) + "': expected at least one value");
  return out;
}

std::string join(const auto& values, auto&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(values.size()); ++i) {
    if (i) out += ' ';
    out += fmt(values[i]);
  }
  return out;
}

std::string fmt_size(std::size_t v) { return std::to_string(v); }

BankFlavor parse_flavor(std::string_view key, std::string_view text) {
  if (text == "ekf") return BankFlavor::ekf;
  if (text == "ukf") return BankFlavor::ukf;
  throw ConfigError("'" + std::string(key) + "': expected ekf or ukf");
}

struct Entry {
  std::string_view key;
  std::function<void(ScenarioConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <class Member>
Entry number(std::string_view key, Member member) {
  return {key,
          [member](ScenarioConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_double(k, v);
          },
          [member](const ScenarioConfig& c) { return format_double(c.*member); }};
}

template <class Member>
Entry count(std::string_view key, Member member) {
  return {key,
          [member](ScenarioConfig& c, std::string_view k, std::string_view v) {
            c.*member = static_cast<std::size_t>(parse_u64(k, v));
          },
          [member](const ScenarioConfig& c) { return std::to_string(c.*member); }};
}

Entry vec3(std::string_view key, models::Vector3 ScenarioConfig::*member) {
  return {key,
          [member](ScenarioConfig& c, std::string_view k, std::string_view v) {
            const auto xs = parse_doubles(k, v, 3);
            c.*member = models::Vector3(xs[0], xs[1], xs[2]);
          },
          [member](const ScenarioConfig& c) {
            return join(c.*member, [](double x) { return format_double(x); });
          }};
}

Entry sizes(std::string_view key, std::vector<std::size_t> ScenarioConfig::*member) {
  return {key,
          [member](ScenarioConfig& c, std::string_view k, std::string_view v) {
            c.*member = parse_sizes(k, v);
          },
          [member](const ScenarioConfig& c) { return join(c.*member, fmt_size); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {"scenario.kind",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         if (v == "linear_toy") c.kind = ScenarioKind::linear_toy;
         else if (v == "orbit_track") c.kind = ScenarioKind::orbit_track;
         else throw ConfigError("'" + std::string(k) + "': expected linear_toy or orbit_track");
       },
       [](const ScenarioConfig& c) { return std::string(to_string(c.kind)); }},
      {"filter.variant",
       [](ScenarioConfig& c, std::string_view, std::string_view v) {
         c.variant = parse_filter_variant(v);
       },
       [](const ScenarioConfig& c) { return std::string(to_string(c.variant)); }},
      {"gif.n_t",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.gif.n_t = static_cast<std::size_t>(parse_u64(k, v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.gif.n_t); }},
      {"gif.n_m",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.gif.n_m = static_cast<std::size_t>(parse_u64(k, v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.gif.n_m); }},
      {"gif.n_q",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.gif.n_q = static_cast<std::size_t>(parse_u64(k, v));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.gif.n_q); }},
      {"gif.flavor",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.gif.flavor = parse_flavor(k, v);
       },
       [](const ScenarioConfig& c) { return std::string(to_string(c.gif.flavor)); }},
      {"gif.interp_scale",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         if (v == "z") c.gif.scale = InterpScale::z;
         else if (v == "sqrt_z") c.gif.scale = InterpScale::sqrt_z;
         else throw ConfigError("'" + std::string(k) + "': expected z or sqrt_z");
       },
       [](const ScenarioConfig& c) { return std::string(to_string(c.gif.scale)); }},
      number("noise.accel_sigma", &ScenarioConfig::accel_sigma),
      {"noise.frame",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         if (v == "inertial") c.noise_frame = models::NoiseFrame::inertial;
         else if (v == "velocity") c.noise_frame = models::NoiseFrame::velocity;
         else throw ConfigError("'" + std::string(k) + "': expected inertial or velocity");
       },
       [](const ScenarioConfig& c) {
         return std::string(c.noise_frame == models::NoiseFrame::inertial ? "inertial" : "velocity");
       }},
      number("truth.thrust", &ScenarioConfig::truth_thrust),
      number("meas.sigma_range", &ScenarioConfig::sigma_range),
      number("meas.sigma_range_rate", &ScenarioConfig::sigma_range_rate),
      number("meas.sigma_angle_deg", &ScenarioConfig::sigma_angle_deg),
      vec3("init.position", &ScenarioConfig::init_position),
      vec3("init.velocity", &ScenarioConfig::init_velocity),
      number("init.sigma_position", &ScenarioConfig::init_sigma_position),
      number("init.sigma_velocity", &ScenarioConfig::init_sigma_velocity),
      number("sim.cadence", &ScenarioConfig::cadence),
      count("sim.epochs", &ScenarioConfig::epochs),
      number("sim.substep", &ScenarioConfig::substep),
      count("mc.runs", &ScenarioConfig::runs),
      {"mc.seed",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) { c.seed = parse_u64(k, v); },
       [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
      {"consts.mu",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.constants.mu = parse_double(k, v);
       },
       [](const ScenarioConfig& c) { return format_double(c.constants.mu); }},
      {"consts.re",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.constants.re = parse_double(k, v);
       },
       [](const ScenarioConfig& c) { return format_double(c.constants.re); }},
      {"consts.j2",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         c.constants.j2 = parse_double(k, v);
       },
       [](const ScenarioConfig& c) { return format_double(c.constants.j2); }},
      sizes("linear.n_m", &ScenarioConfig::linear_n_m),
      {"linear.y",
       [](ScenarioConfig& c, std::string_view k, std::string_view v) {
         const auto xs = parse_doubles(k, v, 3);
         c.linear_y = Eigen::Map<const Vector>(xs.data(), 3);
       },
       [](const ScenarioConfig& c) {
         return join(c.linear_y, [](double x) { return format_double(x); });
       }},
      number("linear.q_scale", &ScenarioConfig::linear_q_scale),
      sizes("table1.n_t", &ScenarioConfig::table1_n_t),
      sizes("table1.n_m", &ScenarioConfig::table1_n_m),
      count("table1.reference_nodes", &ScenarioConfig::table1_reference_nodes),
      {"output.dir",
       [](ScenarioConfig& c, std::string_view, std::string_view v) { c.output_dir = v; },
       [](const ScenarioConfig& c) { return c.output_dir.string(); }},
  };
  return table;
}

}  // namespace

void ScenarioConfig::set(std::string_view key, std::string_view value) {
  for (const Entry& e : entries()) {
    if (e.key == key) {
      e.set(*this, key, trim(value));
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

ScenarioConfig ScenarioConfig::parse(std::string_view text) {
  ScenarioConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = (eol == std::string_view::npos) ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    }
    config.set(key, value);
  }
  return config;
}

ScenarioConfig ScenarioConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string ScenarioConfig::echo() const {
  std::string out;
  for (const Entry& e : entries()) {
    out += e.key;
    out += " = ";
    out += e.get(*this);
    out += '\n';
  }
  return out;
}

void ScenarioConfig::validate() const {
  gif.validate();
  constants.validate();
  const auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(what) + " must be positive");
    }
  };
  positive(accel_sigma, "noise.accel_sigma");
  positive(sigma_range, "meas.sigma_range");
  positive(sigma_range_rate, "meas.sigma_range_rate");
  positive(sigma_angle_deg, "meas.sigma_angle_deg");
  positive(init_sigma_position, "init.sigma_position");
  positive(init_sigma_velocity, "init.sigma_velocity");
  positive(cadence, "sim.cadence");
  positive(substep, "sim.substep");
  positive(linear_q_scale, "linear.q_scale");
  if (truth_thrust < 0.0) throw ConfigError("truth.thrust must be non-negative");
  if (runs < 1) throw ConfigError("mc.runs must be at least 1");
  if (epochs < 1) throw ConfigError("sim.epochs must be at least 1");
  if (init_position.norm() <= constants.re) {
    throw ConfigError("init.position must lie above the Earth's surface");
  }
  if (variant == FilterVariant::gif && (gif.n_t != gif.n_m || gif.n_q != gif.n_m)) {
    throw ConfigError("filter.variant = gif uses constant nodes: n_t, n_m and n_q must agree");
  }
  for (std::size_t n : linear_n_m) GifConfig{n, n, n, gif.flavor}.validate();
  for (std::size_t nt : table1_n_t) {
    for (std::size_t nm : table1_n_m) GifConfig{nt, nm, nm, gif.flavor}.validate();
  }
  const std::size_t ref = table1_reference_nodes;
  GifConfig{ref, ref, ref, gif.flavor}.validate();
}

Matrix ScenarioConfig::process_noise() const {
  return accel_sigma * accel_sigma * Matrix::Identity(3, 3);
}

Matrix ScenarioConfig::measurement_noise() const {
  const double angle = sigma_angle_deg * std::numbers::pi / 180.0;
  Vector sigmas(4);
  sigmas << sigma_range, sigma_range_rate, angle, angle;
  return sigmas.array().square().matrix().asDiagonal();
}

GaussianState ScenarioConfig::initial_state() const {
  Vector mean(6);
  mean << init_position, init_velocity;
  Vector sig(6);
  sig << Vector::Constant(3, init_sigma_position), Vector::Constant(3, init_sigma_velocity);
  return {mean, sig.array().square().matrix().asDiagonal()};
}

}  // namespace gif::harness
