#pragma once

#include <Eigen/Dense>

#include <limits>

namespace sigadmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ActivationKind { sigmoid, relu };

// Pointwise activation together with the smoothness constants used by the
// solver: L0 bounds |act|, L1 bounds |act'|, L2 bounds |act''|.
struct Activation {
  ActivationKind kind = ActivationKind::sigmoid;
  double L0 = 1.0;
  double L1 = 0.25;
  double L2 = 0.25;

  static Activation sigmoid() { return {}; }
  static Activation relu() {
    // The curvature-based machinery below does not apply to relu; the
    // constants are poisoned so accidental use shows up as NaN.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {ActivationKind::relu, nan, nan, nan};
  }
};

// Overflow-safe logistic function.
double sigmoid(double x);

// Derivative s(x)(1 - s(x)), evaluated stably.
double sigmoid_deriv(double x);

Matrix apply(const Activation& act, const Matrix& Z);
Matrix apply_deriv(const Activation& act, const Matrix& Z);

// Curvature bound 2 L2 (L0 + c) + 2 L1^2 for activations whose pre-image
// magnitude is at most c. Controls the tightness of the linearized
// subproblems; for the logistic function it evaluates to 0.625 at c = 0.
double lipschitz_bound(const Activation& act, double c_abs);

}  // namespace sigadmm
