#pragma once

#include <vector>

#include "sigadmm/activation.hpp"

namespace sigadmm {

using MatrixList = std::vector<Matrix>;

// Fully connected network without biases. W[i] maps layer i to layer i+1,
// so W[i] has shape d_{i+1} x d_i with d_0 the input dimension. The last
// layer is linear; every other layer applies the activation. Samples are
// stored as columns throughout.
struct NetParams {
  MatrixList W;
  Activation act = Activation::sigmoid();

  // Number of weight layers.
  int depth() const { return static_cast<int>(W.size()); }

  // Layer widths d_0, ..., d_N.
  std::vector<int> dims() const;
};

// Post-activation responses of every layer for one batch: V[i] is layer
// i+1's output (V[0] = act(W[0] X), ..., V[N-1] = W[N-1] V[N-2]).
struct LayerResponses {
  MatrixList V;

  const Matrix& output() const { return V.back(); }
};

LayerResponses forward(const NetParams& net, const Matrix& X);

// Mean squared error over the columns of X plus lambda_prime times the
// summed squared Frobenius norms of the weights.
double empirical_loss(const NetParams& net, const Matrix& X, const Matrix& Y,
                      double lambda_prime);

}  // namespace sigadmm
