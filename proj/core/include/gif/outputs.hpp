#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gif/harness.hpp"

namespace gif::harness {

// CSV renderers. Floating-point fields use 17 significant digits.
std::string metrics_csv(std::span<const RunMetrics> rows);
std::string timing_csv(std::span<const RunMetrics> rows);
std::string trace_csv(const RunTrace& trace);
std::string eigweight_csv(const EigenWeightTable& table);

struct OutputSet {
  std::vector<RunMetrics> metrics;      // metrics.csv
  std::vector<RunMetrics> references;   // reference_metrics.csv, written when non-empty
  std::vector<EigenWeightTable> tables; // eigweight_<case>_<n>.csv
  bool write_traces = false;            // trace_<run>.csv for the first metrics row
  bool write_metrics = true;
  std::optional<std::string> config_echo;
};

// Writes every file of the set into `dir` (created if missing). Wall-clock
// times go to timing.csv; all other files depend only on the configuration.
// Throws IoError when the directory or a file cannot be written.
void emit_outputs(const OutputSet& outputs, const std::filesystem::path& dir);

}  // namespace gif::harness
