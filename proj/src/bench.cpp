#include "sigadmm/bench.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sigadmm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& cell, int line_no, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse " + what +
                             " value '" + cell + "'");
  }
}

}  // namespace

int TargetFunction::input_dim() const {
  switch (kind) {
    case TargetKind::square: return 1;
    case TargetKind::product:
    case TargetKind::l1_radial:
    case TargetKind::l2_radial_wendland: return 2;
  }
  throw std::logic_error("unknown target");
}

std::pair<Vector, Vector> TargetFunction::domain() const {
  const int d = input_dim();
  Vector lo(d), hi(d);
  switch (kind) {
    case TargetKind::square:
    case TargetKind::product:
    case TargetKind::l2_radial_wendland:
      lo.setConstant(-1.0);
      hi.setConstant(1.0);
      break;
    case TargetKind::l1_radial:
      // Box [r, (1+eps) r]^2 with r = 0.75, eps = 1/2. The whole box sits
      // above the target's kink at unit l1 norm, so the restriction being
      // learned is the affine branch of the hinge.
      lo.setConstant(0.75);
      hi.setConstant(1.125);
      break;
  }
  return {lo, hi};
}

double TargetFunction::eval(const Vector& x) const {
  if (x.size() != input_dim()) throw std::invalid_argument("eval: wrong input dimension");
  switch (kind) {
    case TargetKind::square:
      return x[0] * x[0];
    case TargetKind::product:
      return x[0] * x[1];
    case TargetKind::l1_radial:
      return std::max(std::abs(x[0]) + std::abs(x[1]) - 1.0, 0.0);
    case TargetKind::l2_radial_wendland: {
      const double t = x.squaredNorm();
      const double w = std::max(1.0 - t, 0.0);
      return std::pow(w, 5) * (8.0 * t * t + 5.0 * t + 1.0);
    }
  }
  throw std::logic_error("unknown target");
}

TargetFunction TargetFunction::parse(const std::string& name) {
  if (name == "square") return {TargetKind::square};
  if (name == "product") return {TargetKind::product};
  if (name == "l1_radial") return {TargetKind::l1_radial};
  if (name == "l2_radial") return {TargetKind::l2_radial_wendland};
  throw std::invalid_argument("unknown task '" + name + "'");
}

std::string TargetFunction::name() const {
  switch (kind) {
    case TargetKind::square: return "square";
    case TargetKind::product: return "product";
    case TargetKind::l1_radial: return "l1_radial";
    case TargetKind::l2_radial_wendland: return "l2_radial";
  }
  return "?";
}

Dataset make_dataset(const TargetFunction& f, int n_train, int n_test,
                     double noise_std, std::uint64_t seed) {
  if (n_train < 1 || n_test < 1) throw std::invalid_argument("make_dataset: need positive sizes");
  if (noise_std < 0.0) throw std::invalid_argument("make_dataset: negative noise_std");
  const int d = f.input_dim();
  const auto [lo, hi] = f.domain();
  std::mt19937_64 rng(seed);

  Dataset ds;
  ds.noise_std = noise_std;
  ds.X_train.resize(d, n_train);
  ds.Y_train.resize(1, n_train);
  for (int c = 0; c < n_train; ++c)
    for (int r = 0; r < d; ++r) {
      std::uniform_real_distribution<double> u(lo[r], hi[r]);
      ds.X_train(r, c) = u(rng);
    }
  for (int c = 0; c < n_train; ++c) ds.Y_train(0, c) = f.eval(ds.X_train.col(c));
  if (noise_std > 0.0) {
    std::normal_distribution<double> gauss(0.0, noise_std);
    for (int c = 0; c < n_train; ++c) ds.Y_train(0, c) += gauss(rng);
  }

  // Noiseless uniform grid for evaluation; multivariate sizes are rounded
  // to the nearest per-axis lattice.
  if (d == 1) {
    ds.X_test.resize(1, n_test);
    for (int c = 0; c < n_test; ++c)
      ds.X_test(0, c) =
          n_test == 1 ? 0.5 * (lo[0] + hi[0])
                      : lo[0] + (hi[0] - lo[0]) * c / static_cast<double>(n_test - 1);
  } else {
    const int m = std::max(2, static_cast<int>(std::lround(std::pow(
                                  static_cast<double>(n_test), 1.0 / d))));
    int total = 1;
    for (int r = 0; r < d; ++r) total *= m;
    ds.X_test.resize(d, total);
    for (int c = 0; c < total; ++c) {
      int rem = c;
      for (int r = 0; r < d; ++r) {
        const int idx = rem % m;
        rem /= m;
        ds.X_test(r, c) = lo[r] + (hi[r] - lo[r]) * idx / static_cast<double>(m - 1);
      }
    }
  }
  ds.Y_test.resize(1, ds.X_test.cols());
  for (int c = 0; c < ds.X_test.cols(); ++c) ds.Y_test(0, c) = f.eval(ds.X_test.col(c));
  return ds;
}

ZScoreStats zscore_fit(const Matrix& X) {
  if (X.cols() == 0) throw std::invalid_argument("zscore_fit: empty data");
  ZScoreStats st;
  const double n = static_cast<double>(X.cols());
  st.mean = X.rowwise().mean();
  st.std.resize(X.rows());
  for (int r = 0; r < X.rows(); ++r) {
    const double var = (X.row(r).array() - st.mean[r]).square().sum() / n;
    st.std[r] = std::sqrt(var);
    if (st.std[r] < 1e-12 * (1.0 + std::abs(st.mean[r])))
      st.constant_features.push_back(r);
  }
  return st;
}

Matrix zscore_apply(const ZScoreStats& stats, const Matrix& X) {
  if (X.rows() != stats.mean.size())
    throw std::invalid_argument("zscore_apply: feature count mismatch");
  Matrix Z = X;
  std::vector<bool> constant(X.rows(), false);
  for (int r : stats.constant_features) constant[r] = true;
  for (int r = 0; r < X.rows(); ++r) {
    Z.row(r).array() -= stats.mean[r];
    if (!constant[r]) Z.row(r) /= stats.std[r];
  }
  return Z;
}

double mse(const Matrix& Yhat, const Matrix& Y) {
  if (Yhat.rows() != Y.rows() || Yhat.cols() != Y.cols())
    throw std::invalid_argument("mse: shape mismatch");
  if (Y.cols() == 0) throw std::invalid_argument("mse: empty data");
  return (Yhat - Y).squaredNorm() / static_cast<double>(Y.cols());
}

double accuracy(const Matrix& Yhat, const Matrix& Y, double threshold) {
  if (Yhat.rows() != 1 || Y.rows() != 1)
    throw std::invalid_argument("accuracy: expects scalar outputs");
  if (Yhat.cols() != Y.cols() || Y.cols() == 0)
    throw std::invalid_argument("accuracy: shape mismatch");
  int hits = 0;
  for (int c = 0; c < Y.cols(); ++c) {
    const int pred = Yhat(0, c) >= threshold ? 1 : 0;
    const int label = Y(0, c) >= 0.5 ? 1 : 0;
    hits += pred == label;
  }
  return static_cast<double>(hits) / static_cast<double>(Y.cols());
}

TabularData load_tabular(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  const std::vector<std::string> header = split_csv(line);
  int label_idx = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i)
    if (header[i] == label_column) label_idx = i;
  if (label_idx < 0)
    throw std::runtime_error("label column '" + label_column + "' not in header");

  TabularData out;
  for (int i = 0; i < static_cast<int>(header.size()); ++i)
    if (i != label_idx) out.feature_names.push_back(header[i]);

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size())
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    if (cells[label_idx].empty()) {
      ++out.dropped_missing;
      continue;
    }
    const double raw = parse_number(cells[label_idx], line_no, "label");
    double label;
    if (raw >= 1.0 && raw <= 4.0) label = 1.0;
    else if (raw >= 5.0 && raw <= 12.0) label = 0.0;
    else
      throw std::runtime_error("line " + std::to_string(line_no) + ": label " +
                               cells[label_idx] + " outside the coded ranges");
    std::vector<double> feats;
    feats.reserve(header.size() - 1);
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
      if (i == label_idx) continue;
      feats.push_back(parse_number(cells[i], line_no, "feature '" + header[i] + "'"));
    }
    rows.push_back(std::move(feats));
    labels.push_back(label);
  }
  if (rows.empty()) throw std::runtime_error("'" + path + "' has no usable data rows");

  out.X.resize(static_cast<int>(out.feature_names.size()), static_cast<int>(rows.size()));
  out.Y.resize(1, static_cast<int>(rows.size()));
  for (int c = 0; c < out.X.cols(); ++c) {
    for (int r = 0; r < out.X.rows(); ++r) out.X(r, c) = rows[c][r];
    out.Y(0, c) = labels[c];
  }
  return out;
}

}  // namespace sigadmm
