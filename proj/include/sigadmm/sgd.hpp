#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sigadmm/net.hpp"

namespace sigadmm {

// Minibatch SGD baseline with the step-decay learning rate schedule used in
// the benchmark protocol. Works for sigmoid and relu hidden layers.
struct SGDConfig {
  double lr0 = 0.1;
  double decay = 0.95;
  int decay_every = 10;  // epochs per decay step
  int batch_size = 50;
  int epochs = 2000;
  double lambda_prime = 0.0;  // ridge weight of the per-sample objective
};

double lr_schedule(const SGDConfig& cfg, int epoch);

// Gradient of empirical_loss(net, X, Y, lambda_prime) in every weight
// matrix, by backpropagation over the whole batch given.
MatrixList backprop_grad(const NetParams& net, const Matrix& X, const Matrix& Y,
                         double lambda_prime);

struct SGDTraceRow {
  int epoch = 0;
  double train_loss = 0.0;
  double test_metric = 0.0;
  double lr = 0.0;
  double grad_norm_layer1 = 0.0;
};

enum class SGDStatus { ok, aborted_nonfinite };

struct SGDResult {
  SGDStatus status = SGDStatus::ok;
  std::string message;
  std::vector<SGDTraceRow> trace;
};

// Runs cfg.epochs passes over the training columns; every epoch reshuffles
// the sample order and walks it in batches of batch_size (the last batch may
// be short). test_metric evaluates the net on held-out data after each
// epoch; pass e.g. a mean squared error or accuracy closure. The recorded
// grad_norm_layer1 is the first layer's full-batch gradient norm, a cheap
// probe for vanishing-gradient stalls. Non-finite weights abort training
// and roll back to the last finite epoch.
SGDResult train_sgd(NetParams& net, const Matrix& X, const Matrix& Y,
                    const SGDConfig& cfg, std::uint64_t seed,
                    const std::function<double(const NetParams&)>& test_metric);

}  // namespace sigadmm
