#include <CLI11.hpp>
#include <iostream>

#include "ptspec/run_task.hpp"
#include "ptspec/version.hpp"

// Exit codes: 0 success, 1 operational failure, 2 the mathematics said
// no (a hypothesis of the criteria is violated).

namespace {

int run(const std::string& task, const std::string& config_path,
        const ptspec::io::RunOptions& opts) {
  ptspec::io::RunConfig cfg = ptspec::io::load_config(config_path);
  if (cfg.task != task)
    throw ptspec::ConfigError(0, "config declares task '" + cfg.task +
                                     "' but the CLI asked for '" + task + "'");
  ptspec::io::run_task(cfg, opts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ptspec: spectra of J-symmetric perturbed operator families"};
  app.set_version_flag("--version", std::string(ptspec::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  ptspec::io::RunOptions opts;
  double epsilon_override = 0.0;
  bool has_epsilon = false;

  const char* names[] = {"spectrum", "classify", "reality", "sweep", "doublewell-fit"};
  const char* blurbs[] = {
      "eigenvalue table of H(eps)",
      "complex-pair / real-pair verdict near a degenerate or close level pair",
      "reality radius delta/||H1|| and per-level verification",
      "eigenvalue trajectories over an eps grid with exceptional points",
      "double-well splitting law fit (log d vs 1/hbar or 1/g^2)",
  };
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", opts.out_dir_override, "output directory override");
    sub->add_option("--cache", opts.cache_dir, "eigendecomposition cache directory");
    sub->add_flag("--no-cache", opts.no_cache, "disable the cache");
    sub->add_option("--epsilon", epsilon_override, "override the config epsilon");
    sub->add_flag("--dump-matrices", opts.dump_matrices,
                  "write h0.mat, h1.mat, j.mat next to the report");
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  has_epsilon = sub->count("--epsilon") > 0;
  if (has_epsilon) opts.epsilon_override = epsilon_override;

  try {
    return run(sub->get_name(), config_path, opts);
  } catch (const ptspec::HypothesisError& e) {
    std::cerr << "ptspec: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ptspec: " << e.what() << "\n";
    return 1;
  }
}
