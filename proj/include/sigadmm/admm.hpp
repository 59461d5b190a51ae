#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigadmm/net.hpp"

namespace sigadmm {

// Deterministic full-batch ADMM trainer for sigmoid networks. The training
// problem is written with one auxiliary block per layer response,
//
//   min  0.5 ||V_N - Y||_F^2 + 0.5 lambda sum_i ||W_i||_F^2
//   s.t. V_i = act(W_i V_{i-1})  (i < N),   V_N = W_N V_{N-1},
//
// and every nonlinear constraint is kept in the augmented Lagrangian with
// its own multiplier. One iteration sweeps the weight blocks backward, the
// response blocks forward, then moves all multipliers. Each nonlinear
// subproblem is replaced by a curvature-majorized quadratic around the
// previous iterate, so every block update is a single ridge-type solve.

enum class SolveMode { practical, theory };

struct HyperParams {
  // Ridge weight lambda of the matrix-form objective above. The per-sample
  // objective reported by empirical_loss uses lambda_prime = 2 lambda / n.
  double lambda = 1e-6;
  // Penalty weights beta_1..beta_N, one per constraint block.
  std::vector<double> beta;
  SolveMode mode = SolveMode::practical;
  int epochs = 2000;
  // Early stop once the stationarity residual drops below this; 0 disables.
  double kkt_tol = 0.0;

  static std::vector<double> uniform_beta(int N, double value) {
    return std::vector<double>(static_cast<std::size_t>(N), value);
  }
};

// Full iterate Q^k = ({W_i}, {V_i}, {Lambda_i}). X plays the role of V_0 and
// never changes. V_prev holds the responses of the previous iterate and
// backs the Lyapunov bookkeeping.
struct ADMMState {
  Matrix X, Y;
  MatrixList W, V, Lambda;
  MatrixList V_prev;
  Activation act = Activation::sigmoid();
  int k = 0;

  int depth() const { return static_cast<int>(W.size()); }
  int samples() const { return static_cast<int>(X.cols()); }
};

// Curvature coefficients of the linearized subproblems, refreshed from the
// iterate at sweep entry. h[i] majorizes the W_{i+1} block (i = 0..N-2) and
// mu[j] the V_{j+1} block (j = 0..N-3).
struct LLACoefficients {
  std::vector<double> h;
  std::vector<double> mu;
};

// Constants derived from the initializer and penalties that the descent
// analysis is built on. All of them are plain arithmetic in the input
// norms, so they are also well defined (if meaningless) far outside the
// regime the guarantees cover.
struct TheoryConstants {
  double L3 = 0.0;        // 2 (L1^2 + L2 L0 + L2)
  double gamma = 0.0;     // max_i ||W_i^0||_F
  int d_min = 0;          // smallest hidden width
  double f_min = 0.0;
  double alpha3 = 0.0;
  double C3 = 0.0;        // response / multiplier envelope scale
  std::vector<double> lambda_tilde;  // per-layer ridge thresholds, entries 2..N-1
  double lambda_bar = 0.0;
  double lambda_hat = 0.0;
  std::vector<double> xi;    // Lyapunov augmentation weights, 1-based blocks
  std::vector<double> zeta;  // descent margins of the weight blocks
  std::vector<double> eta;   // descent margins of the response blocks
  double a = 0.0;            // min over {zeta_i, eta_i - xi_i}
};

struct IterationDiagnostics {
  int k = 0;
  double lagrangian = 0.0;
  double lyapunov = 0.0;
  double kkt_residual = 0.0;
  double grad_norm_sq = 0.0;
  std::vector<double> dW_norm, dV_norm, dLambda_norm;
  bool bounds_ok = true;
};

// Gradient of the augmented Lagrangian in every block.
struct LagrangianGrad {
  MatrixList dW, dV, dLambda;

  double squared_norm() const;
};

// Builds the starting iterate: V_i^0 is the forward response of W^0 and all
// multipliers start at zero.
ADMMState init_state(const NetParams& net, const Matrix& X, const Matrix& Y);

LLACoefficients lla_coefficients(const ADMMState& s, const HyperParams& hp);

// Single-block updates. Each one mutates exactly its own block of s and
// reads everything else at the value currently stored, so the caller owns
// the sweep order. entry holds the V and Lambda blocks of the iterate the
// sweep started from (the values the linearizations are anchored at).
struct SweepEntry {
  MatrixList W, V, Lambda;
  LLACoefficients lla;
};

SweepEntry sweep_entry(const ADMMState& s, const HyperParams& hp);

void update_WN(ADMMState& s, const HyperParams& hp, const SweepEntry& e);
void update_Wi(ADMMState& s, const HyperParams& hp, const SweepEntry& e, int i);
void update_Vj(ADMMState& s, const HyperParams& hp, const SweepEntry& e, int j);
void update_VN1(ADMMState& s, const HyperParams& hp, const SweepEntry& e);
void update_VN(ADMMState& s, const HyperParams& hp, const SweepEntry& e);
void update_multipliers(ADMMState& s, const HyperParams& hp);

// One full sweep (weights backward, responses forward, multipliers last)
// plus diagnostics. Advances s.k and rolls V into V_prev.
IterationDiagnostics iterate(ADMMState& s, const HyperParams& hp,
                             const TheoryConstants& tc);

double augmented_lagrangian(const ADMMState& s, const HyperParams& hp);

// L plus the xi-weighted squared distances between V and V_prev.
double lyapunov(const ADMMState& s, const HyperParams& hp, const TheoryConstants& tc);

double kkt_residual(const ADMMState& s, const HyperParams& hp);

LagrangianGrad grad_augmented_lagrangian(const ADMMState& s, const HyperParams& hp);

TheoryConstants theory_constants(const ADMMState& s0, const HyperParams& hp);

// Empty when the configuration is admissible; otherwise one message per
// violated condition. practical mode only checks shapes and positivity,
// theory mode additionally enforces the full inequality suite behind the
// descent guarantee.
std::vector<std::string> validate_params(const ADMMState& s0, const HyperParams& hp);

// Envelope checks ||W_i|| <= gamma, ||V_i|| <= 3 C3 gamma^(i-1),
// ||Lambda_i|| <= C3 beta_i gamma^(i-1), with a hair of slack for roundoff.
bool check_runtime_invariants(const ADMMState& s, const HyperParams& hp,
                              const TheoryConstants& tc);

enum class TrainStatus { ok, early_stop, aborted_nonfinite, invalid_params };

struct TrainResult {
  TrainStatus status = TrainStatus::ok;
  std::string message;
  std::vector<IterationDiagnostics> trace;
  TheoryConstants constants;
};

// Runs hp.epochs sweeps (or fewer on early stop). If an update produces a
// non-finite value the last finite iterate is restored and training stops
// with aborted_nonfinite.
TrainResult train(ADMMState& s, const HyperParams& hp);

NetParams to_net(const ADMMState& s);

}  // namespace sigadmm
