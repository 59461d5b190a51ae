#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigadmm/admm.hpp"
#include "sigadmm/bench.hpp"
#include "sigadmm/init.hpp"
#include "sigadmm/sgd.hpp"

namespace sigadmm {

enum class OptimizerKind { admm, sgd };

// A benchmark sweep: the cartesian grid of depths x widths x scales x
// (lambdas x betas for the splitting solver, lrs for sgd), each cell run
// for `trials` trials. depth counts hidden layers, so a (depth, width)
// cell trains a net with depth+1 weight layers. Trials share the dataset
// draw for a given trial index; weight draws are independent per cell and
// trial. Everything is deterministic in `seed`.
struct ExperimentConfig {
  TargetKind task = TargetKind::square;
  OptimizerKind optimizer = OptimizerKind::admm;
  std::vector<int> depths = {2};
  std::vector<int> widths = {100};
  std::vector<double> scales = {1.0};
  InitKind init = InitKind::msra;
  std::vector<double> lambdas = {1e-6};
  std::vector<double> betas = {1.0};
  std::vector<double> lrs = {0.1};
  ActivationKind activation = ActivationKind::sigmoid;
  int trials = 1;
  int epochs = 2000;
  int n_train = 2000;
  int n_test = 2000;
  double noise_std = 0.0;
  std::uint64_t seed = 1;
  SolveMode mode = SolveMode::practical;
  int workers = 0;  // 0 picks the hardware concurrency
  std::string out_dir;
};

ExperimentConfig parse_config_file(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                       const std::string& value);

// Canonical digest of a configuration; stable across runs and used to tag
// output files.
std::string config_hash(const ExperimentConfig& cfg);

struct ResultRow {
  int depth = 0, width = 0;
  double scale = 1.0, lambda = 0.0, beta = 0.0, lr = 0.0;
  int trials_ok = 0, trials_failed = 0;
  double mean = 0.0, stddev = 0.0, median = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  int best_index = -1;  // -1 when every trial of every cell failed
};

// Runs the sweep. Per-trial metric is the final test mean squared error.
// Failed trials (non-finite abort) are excluded from the statistics and
// counted. When cfg.out_dir is nonempty, per-trial diagnostic traces are
// written under <out_dir>/traces/. The best cell minimizes the mean, with
// ties broken by fewer parameters and then by grid order.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes results.csv and summary.json under cfg.out_dir.
void emit_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

// Aggregates: sample standard deviation (n-1), middle-of-sorted median.
double mean_of(const std::vector<double>& xs);
double stddev_of(const std::vector<double>& xs);
double median_of(std::vector<double> xs);

}  // namespace sigadmm
