#include "sigadmm/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace sigadmm {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sigmoid_deriv(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

Matrix apply(const Activation& act, const Matrix& Z) {
  switch (act.kind) {
    case ActivationKind::sigmoid:
      return Z.unaryExpr([](double z) { return sigmoid(z); });
    case ActivationKind::relu:
      return Z.cwiseMax(0.0);
  }
  throw std::logic_error("unknown activation kind");
}

Matrix apply_deriv(const Activation& act, const Matrix& Z) {
  switch (act.kind) {
    case ActivationKind::sigmoid:
      return Z.unaryExpr([](double z) { return sigmoid_deriv(z); });
    case ActivationKind::relu:
      return Z.unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; });
  }
  throw std::logic_error("unknown activation kind");
}

double lipschitz_bound(const Activation& act, double c_abs) {
  if (c_abs < 0.0) throw std::invalid_argument("lipschitz_bound: c_abs must be nonnegative");
  return 2.0 * act.L2 * (act.L0 + c_abs) + 2.0 * act.L1 * act.L1;
}

}  // namespace sigadmm
