#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "sigadmm/net.hpp"

namespace sigadmm {

// Small explicit sigmoid-network expressions used by the approximation
// constructions: a stack of sigmoid layers followed by an affine readout.
// free_params counts the independent scalars of the construction, so tied
// or derived weights count once.
struct SigmoidNetExpr {
  struct Layer {
    Matrix W;
    Vector b;
  };
  std::vector<Layer> hidden;
  Matrix W_out;
  Vector b_out;
  int free_params = 0;

  int input_dim() const;
  int hidden_layers() const { return static_cast<int>(hidden.size()); }
  Vector eval(const Vector& x) const;
  double eval1(double t) const;
  double max_abs_param() const;
};

// (4/mu) sigmoid(mu t) - 2/mu, the one-unit approximant of the identity.
// Its error on |t| <= M0 is at most 2 M0^2 mu.
SigmoidNetExpr h_linear(double mu);

// sigmoid(A t) with A = log(1/eps)/tau, within eps of the unit step
// whenever |t| >= tau.
SigmoidNetExpr step_approx(double tau, double eps);

// Least-squares fit of (u, v) -> u v over [-M, M]^2 by a one-hidden-layer
// expression with exactly 9 free parameters: two threshold-mirrored unit
// pairs along learned directions plus readout scales and an offset. The
// sup error on a dense certification grid must come out at most nu, else
// this throws with the best error achieved. Deterministic in seed.
SigmoidNetExpr fit_product_gate(double M, double nu, std::uint64_t seed);

// Two-hidden-layer approximant of relu on [-M, M]: a product gate applied
// to a steep step in t and a near-identity in t. eps steers every stage.
SigmoidNetExpr relu_approx(double eps, double M, std::uint64_t seed);

// Trapezoid-rule L^p distance between two scalar functions on [a, b].
double lp_error(const std::function<double(double)>& f,
                const std::function<double(double)>& g, double a, double b,
                double p, int grid = 10000);

// Serializes the expression as a JSON parameter list for inspection.
std::string expr_to_json(const SigmoidNetExpr& e);

}  // namespace sigadmm
