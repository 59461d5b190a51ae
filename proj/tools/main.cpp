#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "sigadmm/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic ADMM and SGD training benchmarks for sigmoid networks"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run a benchmark sweep");
  std::string task, optimizer, config_path, out_dir, mode;
  std::uint64_t seed = 0;
  int trials = 0;
  bool have_seed = false, have_trials = false;
  run->add_option("--task", task, "square, product, l1_radial or l2_radial");
  run->add_option("--optimizer", optimizer, "admm or sgd");
  run->add_option("--config", config_path, "key = value configuration file");
  run->add_option("--out", out_dir, "output directory for results and traces");
  run->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
    have_seed = true;
  });
  run->add_option("--trials", trials, "trial count per grid cell")
      ->each([&](const std::string&) { have_trials = true; });
  run->add_option("--mode", mode, "practical or theory");

  try {
    app.parse(argc, argv);

    sigadmm::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = sigadmm::parse_config_file(config_path);
    if (!task.empty()) sigadmm::apply_config_line(cfg, "task", task);
    if (!optimizer.empty()) sigadmm::apply_config_line(cfg, "optimizer", optimizer);
    if (!mode.empty()) sigadmm::apply_config_line(cfg, "mode", mode);
    if (have_seed) cfg.seed = seed;
    if (have_trials) cfg.trials = trials;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (cfg.out_dir.empty()) cfg.out_dir = "results";

    const sigadmm::ExperimentResult res = sigadmm::run_experiment(cfg);
    sigadmm::emit_outputs(cfg, res);

    std::printf("%zu grid cells, outputs in %s\n", res.rows.size(), cfg.out_dir.c_str());
    if (res.best_index >= 0) {
      const sigadmm::ResultRow& b = res.rows[res.best_index];
      std::printf("best: depth %d width %d scale %g mean %.6g (std %.6g, median %.6g)\n",
                  b.depth, b.width, b.scale, b.mean, b.stddev, b.median);
    } else {
      std::printf("no successful trials\n");
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
