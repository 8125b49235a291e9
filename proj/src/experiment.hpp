#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "verify.hpp"

namespace fraclab {

/// Everything a run needs, as read from one config file.
struct ExperimentConfig {
  // domain
  DomainLabel label = DomainLabel::kBall;
  DomainParams shape;
  // grid
  int dim = 2;
  double h = 0.0;
  std::array<int, kMaxDim> extent{};
  // kernel
  double s = 0.5;
  double truncation_radius = 0.0;  // 0 = auto (grid diagonal + one layer)
  double kernel_constant = 0.0;    // 0 = symbol-normalizing default
  // solver
  SolverOptions solver;
  int threads = 1;
  // tasks
  std::vector<std::string> tasks;
  int eig_count = 1;
  double p = 2.0;
  bool constrained = true;
  double c_inf = 8.0;
  int small_volume_levels = 4;
  std::uint64_t sweep_pairs = 100000;
  // output
  std::string output_dir = "out";
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> names = {
      "eig",        "antisym-eig", "minimize-p",   "torsion",
      "verify-all", "kernel-sweep", "moving-plane", "small-volume"};
  return names;
}

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // all validation errors, not just the first
};

ParseResult parse_config_text(const std::string& text);
ParseResult parse_config(const std::string& path);

struct RunReport {
  nlohmann::ordered_json body;  // deterministic given config and seed
  nlohmann::ordered_json meta;  // timings; excluded from the determinism contract
  std::vector<std::string> manifest;
  bool ok = false;
};

/// Executes the configured tasks in order and collects the report. Field
/// dumps are written into the output directory as they are produced.
RunReport run_experiment(const ExperimentConfig& config);

/// Writes report.json, checks.csv, values.csv and summary.txt into the
/// output directory; bit-deterministic given the report. Returns the file
/// names written (appended to the manifest).
std::vector<std::string> emit_report(const RunReport& report, const std::string& out_dir);

std::string summary_text(const RunReport& report);

/// Cache directory for weight tables: FRACLAB_CACHE_DIR when set, otherwise
/// ".fraclab-cache" under the working directory.
std::string weight_cache_dir();

}  // namespace fraclab
