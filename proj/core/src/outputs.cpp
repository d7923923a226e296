#include "gif/outputs.hpp"

#include <fstream>
#include <system_error>

#include "gif/errors.hpp"

namespace gif::harness {

namespace {

constexpr const char* kMetricsNote =
    "# pct_out_3sigma_axis: |error| > 3 sigma counted per scalar axis (6 per epoch); "
    "pct_out_3sigma_nees: NEES above the 6-dof chi-square 99.73% quantile, per epoch\n";

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string row_key(const RunMetrics& m) {
  return std::string(to_string(m.variant)) + "," + std::to_string(m.n_t) + "," +
         std::to_string(m.n_m);
}

}  // namespace

std::string metrics_csv(std::span<const RunMetrics> rows) {
  std::string out = kMetricsNote;
  out += "filter,n_t,n_m,pos_rmse_m,vel_rmse_mps,pct_out_3sigma_axis,pct_out_3sigma_nees,runs,"
         "failed_runs\n";
  for (const RunMetrics& m : rows) {
    out += row_key(m) + "," + format_double(m.position_rmse) + "," +
           format_double(m.velocity_rmse) + "," + format_double(m.pct_outside_3sigma) + "," +
           format_double(m.pct_outside_nees) + "," + std::to_string(m.runs) + "," +
           std::to_string(m.failed_runs) + "\n";
  }
  return out;
}

std::string timing_csv(std::span<const RunMetrics> rows) {
  const RunMetrics* ukf = nullptr;
  for (const RunMetrics& m : rows) {
    if (m.variant == FilterVariant::ukf) ukf = &m;
  }
  std::string out = "filter,n_t,n_m,wall_clock_s,ratio_to_ukf\n";
  for (const RunMetrics& m : rows) {
    out += row_key(m) + "," + format_double(m.wall_clock_s) + ",";
    if (ukf != nullptr && ukf->wall_clock_s > 0.0) {
      out += format_double(m.wall_clock_s / ukf->wall_clock_s);
    }
    out += "\n";
  }
  return out;
}

std::string trace_csv(const RunTrace& trace) {
  std::string out =
      "epoch,time_s,err_x,err_y,err_z,err_vx,err_vy,err_vz,"
      "sig3_x,sig3_y,sig3_z,sig3_vx,sig3_vy,sig3_vz,nees\n";
  for (const EpochRecord& e : trace.epochs) {
    out += std::to_string(e.epoch) + "," + format_double(e.time);
    for (int i = 0; i < 6; ++i) out += "," + format_double(e.error[i]);
    for (int i = 0; i < 6; ++i) out += "," + format_double(e.three_sigma[i]);
    out += "," + format_double(e.nees) + "\n";
  }
  return out;
}

std::string eigweight_csv(const EigenWeightTable& table) {
  std::string out = "z,min_eig,max_eig,weight\n";
  for (const EigenWeight& row : table.rows) {
    out += format_double(row.z) + "," + format_double(row.min_eigenvalue) + "," +
           format_double(row.max_eigenvalue) + "," + format_double(row.weight) + "\n";
  }
  return out;
}

void emit_outputs(const OutputSet& outputs, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
  if (outputs.write_metrics) {
    write_file(dir / "metrics.csv", metrics_csv(outputs.metrics));
    std::vector<RunMetrics> timed = outputs.metrics;
    timed.insert(timed.end(), outputs.references.begin(), outputs.references.end());
    write_file(dir / "timing.csv", timing_csv(timed));
  }
  if (!outputs.references.empty()) {
    write_file(dir / "reference_metrics.csv", metrics_csv(outputs.references));
  }
  if (outputs.write_traces && !outputs.metrics.empty()) {
    for (const RunTrace& trace : outputs.metrics.front().traces) {
      write_file(dir / ("trace_" + std::to_string(trace.run) + ".csv"), trace_csv(trace));
    }
  }
  for (const EigenWeightTable& table : outputs.tables) {
    write_file(dir / ("eigweight_" + table.case_name + "_" + std::to_string(table.n_m) + ".csv"),
               eigweight_csv(table));
  }
  if (outputs.config_echo) write_file(dir / "config.echo", *outputs.config_echo);
}

}  // namespace gif::harness
