// Command-line front end over the fraclab shared library.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "fraclab.h"

namespace {

struct CommonFlags {
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

int apply_overrides(fraclab_experiment* exp, const CommonFlags& flags) {
  if (!flags.out.empty() &&
      fraclab_experiment_set_output_dir(exp, flags.out.c_str()) != FRACLAB_OK)
    return 1;
  if (flags.seed_set && fraclab_experiment_set_seed(exp, flags.seed) != FRACLAB_OK)
    return 1;
  if (flags.threads > 0 && fraclab_experiment_set_threads(exp, flags.threads) != FRACLAB_OK)
    return 1;
  return 0;
}

int run_loaded(fraclab_experiment* exp, const CommonFlags& flags) {
  if (apply_overrides(exp, flags) != 0) {
    std::fprintf(stderr, "error: %s\n", fraclab_experiment_error(exp));
    return 2;
  }
  fraclab_status status = fraclab_experiment_run(exp);
  if (status == FRACLAB_OK || status == FRACLAB_ERR_VERIFICATION) {
    std::fputs(fraclab_experiment_summary(exp), stdout);
    return status == FRACLAB_OK ? 0 : 1;
  }
  std::fprintf(stderr, "error: %s\n", fraclab_experiment_error(exp));
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: fractional Laplacian laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fraclab_version()));

  CommonFlags flags;
  std::string config_path;
  std::uint64_t pairs = 100000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", flags.out, "output directory override");
    cmd->add_option("--seed", flags.seed, "random seed override")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--threads", flags.threads, "worker thread count");
  };

  CLI::App* run = app.add_subcommand("run", "run the tasks of a config file");
  run->add_option("config", config_path, "experiment config file")->required();
  add_common(run);

  CLI::App* check = app.add_subcommand("check", "validate a config file and exit");
  check->add_option("config", config_path, "experiment config file")->required();

  CLI::App* sweep = app.add_subcommand(
      "kernel-sweep", "run the kernel inequality sweeps without a config file");
  sweep->add_option("--pairs", pairs, "random pairs per (dim, s) case");
  add_common(sweep);

  CLI11_PARSE(app, argc, argv);

  fraclab_experiment* exp = nullptr;
  if (fraclab_experiment_create(&exp) != FRACLAB_OK) {
    std::fprintf(stderr, "error: out of memory\n");
    return 2;
  }
  int rc = 2;
  if (run->parsed()) {
    fraclab_status status = fraclab_experiment_load_config(exp, config_path.c_str());
    if (status != FRACLAB_OK) {
      std::fprintf(stderr, "config error:\n%s\n", fraclab_experiment_error(exp));
      rc = 2;
    } else {
      rc = run_loaded(exp, flags);
    }
  } else if (check->parsed()) {
    fraclab_status status = fraclab_experiment_load_config(exp, config_path.c_str());
    if (status == FRACLAB_OK) {
      std::printf("config ok\n");
      rc = 0;
    } else {
      std::fprintf(stderr, "config error:\n%s\n", fraclab_experiment_error(exp));
      rc = 1;
    }
  } else if (sweep->parsed()) {
    std::string text =
        "[domain]\nlabel = ball\nradius = 1.0\n"
        "[grid]\ndim = 2\nh = 0.25\nextent = 16\n"
        "[kernel]\ns = 0.5\n"
        "[tasks]\nrun = kernel-sweep\nsweep_pairs = " + std::to_string(pairs) + "\n"
        "[output]\ndir = out\n";
    if (fraclab_experiment_load_config_text(exp, text.c_str()) != FRACLAB_OK) {
      std::fprintf(stderr, "error: %s\n", fraclab_experiment_error(exp));
      rc = 2;
    } else {
      rc = run_loaded(exp, flags);
    }
  }
  fraclab_experiment_destroy(exp);
  return rc;
}
