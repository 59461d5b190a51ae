#include "sigadmm/net.hpp"

#include <stdexcept>

namespace sigadmm {

std::vector<int> NetParams::dims() const {
  std::vector<int> d;
  if (W.empty()) return d;
  d.push_back(static_cast<int>(W.front().cols()));
  for (const Matrix& Wi : W) d.push_back(static_cast<int>(Wi.rows()));
  return d;
}

LayerResponses forward(const NetParams& net, const Matrix& X) {
  const int N = net.depth();
  if (N < 1) throw std::invalid_argument("forward: network has no layers");
  if (net.W.front().cols() != X.rows())
    throw std::invalid_argument("forward: input dimension mismatch");

  LayerResponses r;
  r.V.reserve(N);
  const Matrix* prev = &X;
  for (int i = 0; i < N; ++i) {
    if (i > 0 && net.W[i].cols() != prev->rows())
      throw std::invalid_argument("forward: layer dimension mismatch");
    Matrix Z = net.W[i] * (*prev);
    r.V.push_back(i + 1 < N ? apply(net.act, Z) : std::move(Z));
    prev = &r.V.back();
  }
  return r;
}

double empirical_loss(const NetParams& net, const Matrix& X, const Matrix& Y,
                      double lambda_prime) {
  if (X.cols() != Y.cols()) throw std::invalid_argument("empirical_loss: sample count mismatch");
  if (X.cols() == 0) throw std::invalid_argument("empirical_loss: empty batch");
  const LayerResponses r = forward(net, X);
  if (r.output().rows() != Y.rows())
    throw std::invalid_argument("empirical_loss: output dimension mismatch");
  double loss = (r.output() - Y).squaredNorm() / static_cast<double>(X.cols());
  for (const Matrix& Wi : net.W) loss += lambda_prime * Wi.squaredNorm();
  return loss;
}

}  // namespace sigadmm
