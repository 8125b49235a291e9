#include "fraclab.h"

#include <cstring>
#include <string>

#include "experiment.hpp"

using namespace fraclab;

struct fraclab_experiment {
  std::optional<ExperimentConfig> config;
  std::string report_json;
  std::string summary;
  std::string error;
};

namespace {

fraclab_status fail(fraclab_experiment* exp, fraclab_status code, const std::string& msg) {
  if (exp) exp->error = msg;
  return code;
}

fraclab_status load_from(fraclab_experiment* exp, const ParseResult& parsed,
                         bool file_missing) {
  if (parsed.config) {
    exp->config = parsed.config;
    exp->error.clear();
    return FRACLAB_OK;
  }
  std::string joined;
  for (const auto& e : parsed.errors) joined += (joined.empty() ? "" : "\n") + e;
  exp->config.reset();
  if (file_missing) return fail(exp, FRACLAB_ERR_IO, joined);
  bool structural = parsed.errors.size() == 1 &&
                    parsed.errors.front().rfind("line ", 0) == 0;
  return fail(exp, structural ? FRACLAB_ERR_PARSE : FRACLAB_ERR_VALIDATION, joined);
}

}  // namespace

extern "C" {

const char* fraclab_version(void) { return "0.1.0"; }

fraclab_status fraclab_experiment_create(fraclab_experiment** out) {
  if (!out) return FRACLAB_ERR_INVALID_ARGUMENT;
  *out = new (std::nothrow) fraclab_experiment();
  return *out ? FRACLAB_OK : FRACLAB_ERR_INTERNAL;
}

void fraclab_experiment_destroy(fraclab_experiment* exp) { delete exp; }

fraclab_status fraclab_experiment_load_config(fraclab_experiment* exp, const char* path) {
  if (!exp || !path) return FRACLAB_ERR_INVALID_ARGUMENT;
  ParseResult parsed = parse_config(path);
  bool missing = !parsed.config && parsed.errors.size() == 1 &&
                 parsed.errors.front().rfind("cannot read config file", 0) == 0;
  return load_from(exp, parsed, missing);
}

fraclab_status fraclab_experiment_load_config_text(fraclab_experiment* exp,
                                                   const char* text) {
  if (!exp || !text) return FRACLAB_ERR_INVALID_ARGUMENT;
  return load_from(exp, parse_config_text(text), false);
}

fraclab_status fraclab_experiment_set_output_dir(fraclab_experiment* exp,
                                                 const char* dir) {
  if (!exp || !dir) return FRACLAB_ERR_INVALID_ARGUMENT;
  if (!exp->config) return fail(exp, FRACLAB_ERR_INVALID_ARGUMENT, "no config loaded");
  exp->config->output_dir = dir;
  return FRACLAB_OK;
}

fraclab_status fraclab_experiment_set_seed(fraclab_experiment* exp, uint64_t seed) {
  if (!exp) return FRACLAB_ERR_INVALID_ARGUMENT;
  if (!exp->config) return fail(exp, FRACLAB_ERR_INVALID_ARGUMENT, "no config loaded");
  exp->config->seed = seed;
  exp->config->solver.seed = seed;
  return FRACLAB_OK;
}

fraclab_status fraclab_experiment_set_threads(fraclab_experiment* exp, int threads) {
  if (!exp) return FRACLAB_ERR_INVALID_ARGUMENT;
  if (!exp->config) return fail(exp, FRACLAB_ERR_INVALID_ARGUMENT, "no config loaded");
  if (threads < 1) return fail(exp, FRACLAB_ERR_INVALID_ARGUMENT, "threads must be >= 1");
  exp->config->threads = threads;
  return FRACLAB_OK;
}

fraclab_status fraclab_experiment_run(fraclab_experiment* exp) {
  if (!exp) return FRACLAB_ERR_INVALID_ARGUMENT;
  if (!exp->config) return fail(exp, FRACLAB_ERR_INVALID_ARGUMENT, "no config loaded");
  try {
    RunReport report = run_experiment(*exp->config);
    std::vector<std::string> emitted = emit_report(report, exp->config->output_dir);
    nlohmann::ordered_json full = report.body;
    full["meta"] = report.meta;
    nlohmann::ordered_json manifest = report.manifest;
    for (const auto& f : emitted) manifest.push_back(f);
    full["manifest"] = manifest;
    exp->report_json = full.dump(2);
    exp->summary = summary_text(report);
    exp->error.clear();
    return report.ok ? FRACLAB_OK : FRACLAB_ERR_VERIFICATION;
  } catch (const SolverError& e) {
    return fail(exp, FRACLAB_ERR_SOLVER, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(exp, FRACLAB_ERR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return fail(exp, FRACLAB_ERR_INTERNAL, e.what());
  }
}

const char* fraclab_experiment_report_json(const fraclab_experiment* exp) {
  return exp ? exp->report_json.c_str() : "";
}

const char* fraclab_experiment_summary(const fraclab_experiment* exp) {
  return exp ? exp->summary.c_str() : "";
}

const char* fraclab_experiment_error(const fraclab_experiment* exp) {
  return exp ? exp->error.c_str() : "";
}

fraclab_status fraclab_normalization_constant(int dim, double s, double* out) {
  if (!out) return FRACLAB_ERR_INVALID_ARGUMENT;
  try {
    *out = normalization_constant(dim, s);
    return FRACLAB_OK;
  } catch (const std::exception&) {
    return FRACLAB_ERR_INVALID_ARGUMENT;
  }
}

fraclab_status fraclab_f_surrogate(double a, double b, double big_m, int dim,
                                   double s, double* out) {
  if (!out) return FRACLAB_ERR_INVALID_ARGUMENT;
  try {
    *out = f_surrogate(a, b, big_m, dim, s);
    return FRACLAB_OK;
  } catch (const std::exception&) {
    return FRACLAB_ERR_INVALID_ARGUMENT;
  }
}

fraclab_status fraclab_four_point_deficit(int dim, double s, int point_dim,
                                          const double* x, const double* y,
                                          int axis1, double level1, int axis2,
                                          double level2, double* out) {
  if (!out || !x || !y || point_dim < 2) return FRACLAB_ERR_INVALID_ARGUMENT;
  if (axis1 < 0 || axis1 >= point_dim || axis2 < 0 || axis2 >= point_dim)
    return FRACLAB_ERR_INVALID_ARGUMENT;
  try {
    KernelParams params = resolve_kernel_params({dim, s, 0.0});
    std::span<const double> xs(x, static_cast<std::size_t>(point_dim));
    std::span<const double> ys(y, static_cast<std::size_t>(point_dim));
    *out = four_point_deficit(params, xs, ys, Reflection{axis1, level1},
                              Reflection{axis2, level2});
    return FRACLAB_OK;
  } catch (const std::exception&) {
    return FRACLAB_ERR_INVALID_ARGUMENT;
  }
}

}  // extern "C"
