#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigadmm/net.hpp"

namespace sigadmm {

// Benchmark target functions. square and product are noiseless
// approximation targets; the two radial targets are learning targets whose
// training labels carry Gaussian noise.
enum class TargetKind { square, product, l1_radial, l2_radial_wendland };

struct TargetFunction {
  TargetKind kind = TargetKind::square;

  int input_dim() const;
  // Axis-aligned domain [lo_0, hi_0] x ... per input coordinate.
  std::pair<Vector, Vector> domain() const;
  double eval(const Vector& x) const;

  static TargetFunction parse(const std::string& name);
  std::string name() const;
};

// Columns are samples. Training inputs are uniform random over the domain
// and training labels get N(0, noise_std^2) perturbations; the evaluation
// set is a noiseless uniform grid (per-axis linspace, so the grid size is
// rounded to the nearest lattice for multivariate domains).
struct Dataset {
  Matrix X_train, Y_train;
  Matrix X_test, Y_test;
  double noise_std = 0.0;
};

Dataset make_dataset(const TargetFunction& f, int n_train, int n_test,
                     double noise_std, std::uint64_t seed);

// Per-feature standardization statistics over columns-as-samples data.
// Population standard deviation (divide by n). A feature with zero spread
// is flagged and only centered when applied.
struct ZScoreStats {
  Vector mean;
  Vector std;
  std::vector<int> constant_features;
};

ZScoreStats zscore_fit(const Matrix& X);
Matrix zscore_apply(const ZScoreStats& stats, const Matrix& X);

double mse(const Matrix& Yhat, const Matrix& Y);
// Fraction of columns whose thresholded scalar output matches the 0/1
// label. Points exactly at the threshold count as positive.
double accuracy(const Matrix& Yhat, const Matrix& Y, double threshold = 0.5);

// Comma separated file with a header row. Rows whose label cell is empty
// are dropped (and counted); label values in [1,4] map to 1, in [5,12] to
// 0, and anything else is an error. Every other column is a numeric
// feature. Parse failures report the offending line number.
struct TabularData {
  Matrix X;  // features x samples
  Matrix Y;  // 1 x samples, entries in {0,1}
  std::vector<std::string> feature_names;
  int dropped_missing = 0;
};

TabularData load_tabular(const std::string& path, const std::string& label_column);

}  // namespace sigadmm
