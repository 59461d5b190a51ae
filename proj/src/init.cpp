#include "sigadmm/init.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace sigadmm {

namespace {

Matrix fill_uniform(int rows, int cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix W(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) W(r, c) = dist(rng);
  return W;
}

Matrix fill_gaussian(int rows, int cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix W(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) W(r, c) = dist(rng);
  return W;
}

// Orthonormal columns from a QR factorization, with the usual sign fix on
// diag(R) so the result is unique. Expects rows >= cols.
Matrix thin_q(const Matrix& B) {
  Eigen::HouseholderQR<Matrix> qr(B);
  Matrix Q = qr.householderQ() * Matrix::Identity(B.rows(), B.cols());
  const Matrix R = qr.matrixQR().topRows(B.cols());
  for (int c = 0; c < B.cols(); ++c)
    if (R(c, c) < 0.0) Q.col(c) = -Q.col(c);
  return Q;
}

Matrix orthogonalized(const Matrix& B) {
  if (B.rows() >= B.cols()) return thin_q(B);
  return thin_q(B.transpose()).transpose();
}

}  // namespace

InitScheme parse_scheme(const std::string& text) {
  InitScheme scheme;
  std::string name = text;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    name = text.substr(0, colon);
    try {
      std::size_t used = 0;
      scheme.scale = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad init scale in '" + text + "'");
    }
    if (!(scheme.scale > 0.0)) throw std::invalid_argument("init scale must be positive");
  }
  if (name == "lecun_unif") scheme.kind = InitKind::lecun_unif;
  else if (name == "lecun_gauss") scheme.kind = InitKind::lecun_gauss;
  else if (name == "orth_unif") scheme.kind = InitKind::orth_unif;
  else if (name == "orth_gauss") scheme.kind = InitKind::orth_gauss;
  else if (name == "xavier") scheme.kind = InitKind::xavier;
  else if (name == "msra") scheme.kind = InitKind::msra;
  else throw std::invalid_argument("unknown init scheme '" + name + "'");
  return scheme;
}

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::lecun_unif: return "lecun_unif";
    case InitKind::lecun_gauss: return "lecun_gauss";
    case InitKind::orth_unif: return "orth_unif";
    case InitKind::orth_gauss: return "orth_gauss";
    case InitKind::xavier: return "xavier";
    case InitKind::msra: return "msra";
  }
  return "?";
}

std::string to_string(const InitScheme& scheme) {
  std::string s = to_string(scheme.kind);
  if (scheme.scale != 1.0) {
    char buf[48];
    std::snprintf(buf, sizeof buf, ":%g", scheme.scale);
    s += buf;
  }
  return s;
}

MatrixList init_weights(const std::vector<int>& dims, const InitScheme& scheme,
                        std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("init_weights: need at least one layer");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("init_weights: widths must be positive");

  std::mt19937_64 rng(seed);
  const int N = static_cast<int>(dims.size()) - 1;
  MatrixList W;
  W.reserve(N);
  for (int l = 0; l < N; ++l) {
    const int d_in = dims[l];
    const int d_out = dims[l + 1];
    Matrix Wl;
    switch (scheme.kind) {
      case InitKind::lecun_unif:
        Wl = fill_uniform(d_out, d_in, std::sqrt(3.0 / d_in), rng);
        break;
      case InitKind::lecun_gauss:
        Wl = fill_gaussian(d_out, d_in, std::sqrt(1.0 / d_in), rng);
        break;
      case InitKind::orth_unif:
        Wl = orthogonalized(fill_uniform(d_out, d_in, 1.0, rng));
        break;
      case InitKind::orth_gauss:
        Wl = orthogonalized(fill_gaussian(d_out, d_in, 1.0, rng));
        break;
      case InitKind::xavier:
        Wl = fill_uniform(d_out, d_in, std::sqrt(6.0 / (d_in + d_out)), rng);
        break;
      case InitKind::msra: {
        const double var = (l + 1 < N) ? 2.0 / d_out : 1.0 / d_out;
        Wl = fill_gaussian(d_out, d_in, std::sqrt(var), rng);
        break;
      }
    }
    W.push_back(scheme.scale * Wl);
  }
  return W;
}

MatrixList normalized_init(const std::vector<int>& dims, const InitScheme& scheme,
                           std::uint64_t seed) {
  MatrixList W = init_weights(dims, scheme, seed);
  for (Matrix& Wl : W) {
    const double norm = Wl.norm();
    if (!(norm > 0.0)) throw std::runtime_error("normalized_init: degenerate zero draw");
    Wl /= norm;
  }
  return W;
}

}  // namespace sigadmm
