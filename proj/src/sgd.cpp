#include "sigadmm/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sigadmm {

double lr_schedule(const SGDConfig& cfg, int epoch) {
  if (epoch < 0) throw std::invalid_argument("lr_schedule: negative epoch");
  if (cfg.decay_every < 1) throw std::invalid_argument("lr_schedule: decay_every must be positive");
  return cfg.lr0 * std::pow(cfg.decay, epoch / cfg.decay_every);
}

MatrixList backprop_grad(const NetParams& net, const Matrix& X, const Matrix& Y,
                         double lambda_prime) {
  const int N = net.depth();
  if (N < 1) throw std::invalid_argument("backprop_grad: network has no layers");
  const double n = static_cast<double>(X.cols());

  // Forward pass keeping pre-activations.
  MatrixList Z(N), V(N);
  const Matrix* prev = &X;
  for (int i = 0; i < N; ++i) {
    Z[i] = net.W[i] * (*prev);
    V[i] = (i + 1 < N) ? apply(net.act, Z[i]) : Z[i];
    prev = &V[i];
  }

  MatrixList g(N);
  Matrix dV = (2.0 / n) * (V[N - 1] - Y);
  for (int i = N - 1; i >= 0; --i) {
    const Matrix dZ =
        (i + 1 < N) ? Matrix((dV.array() * apply_deriv(net.act, Z[i]).array()).matrix())
                    : dV;
    const Matrix& below = (i == 0) ? X : V[i - 1];
    g[i] = dZ * below.transpose() + 2.0 * lambda_prime * net.W[i];
    if (i > 0) dV = net.W[i].transpose() * dZ;
  }
  return g;
}

SGDResult train_sgd(NetParams& net, const Matrix& X, const Matrix& Y,
                    const SGDConfig& cfg, std::uint64_t seed,
                    const std::function<double(const NetParams&)>& test_metric) {
  SGDResult out;
  const int n = static_cast<int>(X.cols());
  if (n == 0) throw std::invalid_argument("train_sgd: empty training set");
  if (cfg.batch_size < 1) throw std::invalid_argument("train_sgd: batch_size must be positive");

  std::mt19937_64 rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  out.trace.reserve(cfg.epochs);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_schedule(cfg, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    MatrixList last_finite = net.W;

    for (int start = 0; start < n; start += cfg.batch_size) {
      const int b = std::min(cfg.batch_size, n - start);
      Matrix Xb(X.rows(), b), Yb(Y.rows(), b);
      for (int c = 0; c < b; ++c) {
        Xb.col(c) = X.col(order[start + c]);
        Yb.col(c) = Y.col(order[start + c]);
      }
      const MatrixList g = backprop_grad(net, Xb, Yb, cfg.lambda_prime);
      for (int i = 0; i < net.depth(); ++i) net.W[i] -= lr * g[i];
    }

    bool finite = true;
    for (const Matrix& Wi : net.W) finite = finite && Wi.allFinite();
    if (!finite) {
      net.W = std::move(last_finite);
      out.status = SGDStatus::aborted_nonfinite;
      out.message = "non-finite weights at epoch " + std::to_string(epoch);
      break;
    }

    SGDTraceRow row;
    row.epoch = epoch;
    row.train_loss = empirical_loss(net, X, Y, cfg.lambda_prime);
    row.test_metric = test_metric ? test_metric(net) : 0.0;
    row.lr = lr;
    row.grad_norm_layer1 = backprop_grad(net, X, Y, cfg.lambda_prime).front().norm();
    out.trace.push_back(row);
  }
  return out;
}

}  // namespace sigadmm
