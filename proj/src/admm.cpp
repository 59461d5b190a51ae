#include "sigadmm/admm.hpp"

#include <cmath>
#include <stdexcept>

namespace sigadmm {

namespace {

// Solves M Z = B for symmetric positive definite M. Cholesky first, with a
// robust fallback if roundoff pushes M to the edge of definiteness.
Matrix spd_solve(const Matrix& M, const Matrix& B) {
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() == Eigen::Success) return llt.solve(B);
  Eigen::LDLT<Matrix> ldlt(M);
  return ldlt.solve(B);
}

// A block's predecessor response in the current state: V_0 is the data.
const Matrix& pred(const ADMMState& s, int i_1based) {
  return i_1based <= 1 ? s.X : s.V[static_cast<std::size_t>(i_1based) - 2];
}

const Matrix& pred_entry(const ADMMState& s, const SweepEntry& e, int i_1based) {
  return i_1based <= 1 ? s.X : e.V[static_cast<std::size_t>(i_1based) - 2];
}

void require_depth(const ADMMState& s, int min_depth) {
  if (s.depth() < min_depth) throw std::invalid_argument("admm: network too shallow");
}

}  // namespace

double LagrangianGrad::squared_norm() const {
  double t = 0.0;
  for (const Matrix& M : dW) t += M.squaredNorm();
  for (const Matrix& M : dV) t += M.squaredNorm();
  for (const Matrix& M : dLambda) t += M.squaredNorm();
  return t;
}

ADMMState init_state(const NetParams& net, const Matrix& X, const Matrix& Y) {
  if (net.depth() < 2) throw std::invalid_argument("init_state: need at least two layers");
  if (net.act.kind != ActivationKind::sigmoid)
    throw std::invalid_argument("init_state: solver requires the sigmoid activation");
  if (X.cols() != Y.cols()) throw std::invalid_argument("init_state: sample count mismatch");
  if (X.cols() == 0) throw std::invalid_argument("init_state: empty batch");
  if (net.W.back().rows() != Y.rows())
    throw std::invalid_argument("init_state: output dimension mismatch");

  ADMMState s;
  s.X = X;
  s.Y = Y;
  s.W = net.W;
  s.act = net.act;
  s.V = forward(net, X).V;
  s.Lambda.reserve(s.W.size());
  for (const Matrix& Vi : s.V) s.Lambda.push_back(Matrix::Zero(Vi.rows(), Vi.cols()));
  return s;
}

LLACoefficients lla_coefficients(const ADMMState& s, const HyperParams& hp) {
  const int N = s.depth();
  LLACoefficients c;
  c.h.reserve(N - 1);
  for (int i = 1; i <= N - 1; ++i) {
    const Matrix anchor =
        s.V[i - 1] - (1.0 / hp.beta[i - 1]) * s.Lambda[i - 1];
    c.h.push_back(lipschitz_bound(s.act, anchor.cwiseAbs().maxCoeff()));
  }
  c.mu.reserve(std::max(0, N - 2));
  for (int j = 1; j <= N - 2; ++j) {
    const Matrix anchor = s.V[j] - (1.0 / hp.beta[j]) * s.Lambda[j];
    c.mu.push_back(lipschitz_bound(s.act, anchor.cwiseAbs().maxCoeff()));
  }
  return c;
}

SweepEntry sweep_entry(const ADMMState& s, const HyperParams& hp) {
  return SweepEntry{s.W, s.V, s.Lambda, lla_coefficients(s, hp)};
}

void update_WN(ADMMState& s, const HyperParams& hp, const SweepEntry& e) {
  require_depth(s, 2);
  const int N = s.depth();
  const double bN = hp.beta[N - 1];
  const Matrix& A = e.V[N - 2];
  const Matrix M = hp.lambda * Matrix::Identity(A.rows(), A.rows()) + bN * (A * A.transpose());
  const Matrix rhs_t = A * (bN * e.V[N - 1] - e.Lambda[N - 1]).transpose();
  s.W[N - 1] = spd_solve(M, rhs_t).transpose();
}

void update_Wi(ADMMState& s, const HyperParams& hp, const SweepEntry& e, int i) {
  const int N = s.depth();
  if (i < 1 || i > N - 1) throw std::invalid_argument("update_Wi: index out of range");
  const double bi = hp.beta[i - 1];
  const double hi = e.lla.h[i - 1];
  const Matrix& A = pred_entry(s, e, i);
  const Matrix& W_old = e.W[i - 1];

  const Matrix Z = W_old * A;
  const Matrix G =
      ((e.Lambda[i - 1] + bi * (apply(s.act, Z) - e.V[i - 1])).array() *
       apply_deriv(s.act, Z).array())
          .matrix();
  const double c = 0.5 * bi * hi;
  const Matrix AAt = A * A.transpose();
  const Matrix M = hp.lambda * Matrix::Identity(A.rows(), A.rows()) + c * AAt;
  const Matrix rhs = c * (W_old * AAt) - G * A.transpose();
  s.W[i - 1] = spd_solve(M, rhs.transpose()).transpose();
}

void update_Vj(ADMMState& s, const HyperParams& hp, const SweepEntry& e, int j) {
  const int N = s.depth();
  if (j < 1 || j > N - 2) throw std::invalid_argument("update_Vj: index out of range");
  const double bj = hp.beta[j - 1];
  const double bj1 = hp.beta[j];
  const double mu = e.lla.mu[j - 1];
  const Matrix& W = s.W[j];  // W_{j+1}, already refreshed this sweep

  const Matrix Zt = W * e.V[j - 1];
  const Matrix Gt =
      ((e.Lambda[j] + bj1 * (apply(s.act, Zt) - e.V[j])).array() *
       apply_deriv(s.act, Zt).array())
          .matrix();
  const double c = 0.5 * bj1 * mu;
  const Matrix M =
      bj * Matrix::Identity(W.cols(), W.cols()) + c * (W.transpose() * W);
  const Matrix rhs = e.Lambda[j - 1] + bj * apply(s.act, s.W[j - 1] * pred(s, j)) +
                     W.transpose() * (c * Zt - Gt);
  s.V[j - 1] = spd_solve(M, rhs);
}

void update_VN1(ADMMState& s, const HyperParams& hp, const SweepEntry& e) {
  require_depth(s, 2);
  const int N = s.depth();
  const double bN1 = hp.beta[N - 2];
  const double bN = hp.beta[N - 1];
  const Matrix& W = s.W[N - 1];

  const Matrix M = bN1 * Matrix::Identity(W.cols(), W.cols()) + bN * (W.transpose() * W);
  const Matrix rhs = e.Lambda[N - 2] +
                     bN1 * apply(s.act, s.W[N - 2] * pred(s, N - 1)) -
                     W.transpose() * (e.Lambda[N - 1] - bN * e.V[N - 1]);
  s.V[N - 2] = spd_solve(M, rhs);
}

void update_VN(ADMMState& s, const HyperParams& hp, const SweepEntry& e) {
  require_depth(s, 2);
  const int N = s.depth();
  const double bN = hp.beta[N - 1];
  s.V[N - 1] = (s.Y + e.Lambda[N - 1] + bN * (s.W[N - 1] * s.V[N - 2])) / (1.0 + bN);
}

void update_multipliers(ADMMState& s, const HyperParams& hp) {
  const int N = s.depth();
  for (int i = 1; i <= N - 1; ++i) {
    s.Lambda[i - 1] +=
        hp.beta[i - 1] * (apply(s.act, s.W[i - 1] * pred(s, i)) - s.V[i - 1]);
  }
  s.Lambda[N - 1] += hp.beta[N - 1] * (s.W[N - 1] * s.V[N - 2] - s.V[N - 1]);
}

IterationDiagnostics iterate(ADMMState& s, const HyperParams& hp,
                             const TheoryConstants& tc) {
  const int N = s.depth();
  const SweepEntry e = sweep_entry(s, hp);

  update_WN(s, hp, e);
  for (int i = N - 1; i >= 1; --i) update_Wi(s, hp, e, i);
  for (int j = 1; j <= N - 2; ++j) update_Vj(s, hp, e, j);
  update_VN1(s, hp, e);
  update_VN(s, hp, e);
  update_multipliers(s, hp);

  s.V_prev = e.V;
  s.k += 1;

  IterationDiagnostics d;
  d.k = s.k;
  d.lagrangian = augmented_lagrangian(s, hp);
  d.lyapunov = lyapunov(s, hp, tc);
  d.kkt_residual = kkt_residual(s, hp);
  d.grad_norm_sq = grad_augmented_lagrangian(s, hp).squared_norm();
  d.dW_norm.reserve(N);
  d.dV_norm.reserve(N);
  d.dLambda_norm.reserve(N);
  for (int i = 0; i < N; ++i) {
    d.dW_norm.push_back((s.W[i] - e.W[i]).norm());
    d.dV_norm.push_back((s.V[i] - e.V[i]).norm());
    d.dLambda_norm.push_back((s.Lambda[i] - e.Lambda[i]).norm());
  }
  d.bounds_ok = hp.mode == SolveMode::theory
                    ? check_runtime_invariants(s, hp, tc)
                    : true;
  return d;
}

double augmented_lagrangian(const ADMMState& s, const HyperParams& hp) {
  const int N = s.depth();
  double L = 0.5 * (s.V[N - 1] - s.Y).squaredNorm();
  for (const Matrix& Wi : s.W) L += 0.5 * hp.lambda * Wi.squaredNorm();
  for (int i = 1; i <= N - 1; ++i) {
    const Matrix R = apply(s.act, s.W[i - 1] * pred(s, i)) - s.V[i - 1];
    L += 0.5 * hp.beta[i - 1] * R.squaredNorm() +
         (s.Lambda[i - 1].array() * R.array()).sum();
  }
  const Matrix RN = s.W[N - 1] * s.V[N - 2] - s.V[N - 1];
  L += 0.5 * hp.beta[N - 1] * RN.squaredNorm() +
       (s.Lambda[N - 1].array() * RN.array()).sum();
  return L;
}

double lyapunov(const ADMMState& s, const HyperParams& hp, const TheoryConstants& tc) {
  double val = augmented_lagrangian(s, hp);
  if (s.V_prev.empty()) return val;
  for (int i = 0; i < s.depth(); ++i)
    val += tc.xi[i] * (s.V[i] - s.V_prev[i]).squaredNorm();
  return val;
}

double kkt_residual(const ADMMState& s, const HyperParams& hp) {
  const int N = s.depth();
  double acc = 0.0;

  // Stationarity in the weights.
  for (int i = 1; i <= N - 1; ++i) {
    const Matrix Z = s.W[i - 1] * pred(s, i);
    const Matrix T = (s.Lambda[i - 1].array() * apply_deriv(s.act, Z).array()).matrix();
    acc += (hp.lambda * s.W[i - 1] + T * pred(s, i).transpose()).squaredNorm();
  }
  acc += (hp.lambda * s.W[N - 1] + s.Lambda[N - 1] * s.V[N - 2].transpose()).squaredNorm();

  // Stationarity in the responses.
  for (int i = 1; i <= N - 2; ++i) {
    const Matrix Z = s.W[i] * s.V[i - 1];
    const Matrix T = (s.Lambda[i].array() * apply_deriv(s.act, Z).array()).matrix();
    acc += (s.W[i].transpose() * T - s.Lambda[i - 1]).squaredNorm();
  }
  acc += (s.W[N - 1].transpose() * s.Lambda[N - 1] - s.Lambda[N - 2]).squaredNorm();
  acc += (s.V[N - 1] - s.Y - s.Lambda[N - 1]).squaredNorm();

  // Primal feasibility.
  for (int i = 1; i <= N - 1; ++i)
    acc += (apply(s.act, s.W[i - 1] * pred(s, i)) - s.V[i - 1]).squaredNorm();
  acc += (s.W[N - 1] * s.V[N - 2] - s.V[N - 1]).squaredNorm();

  return std::sqrt(acc);
}

LagrangianGrad grad_augmented_lagrangian(const ADMMState& s, const HyperParams& hp) {
  const int N = s.depth();
  LagrangianGrad g;
  g.dW.resize(N);
  g.dV.resize(N);
  g.dLambda.resize(N);

  // Shared per-layer quantities: residuals R_i and the penalized multiplier
  // terms P_i = Lambda_i + beta_i R_i.
  MatrixList Z(N - 1), R(N), P(N);
  for (int i = 1; i <= N - 1; ++i) {
    Z[i - 1] = s.W[i - 1] * pred(s, i);
    R[i - 1] = apply(s.act, Z[i - 1]) - s.V[i - 1];
    P[i - 1] = s.Lambda[i - 1] + hp.beta[i - 1] * R[i - 1];
  }
  R[N - 1] = s.W[N - 1] * s.V[N - 2] - s.V[N - 1];
  P[N - 1] = s.Lambda[N - 1] + hp.beta[N - 1] * R[N - 1];

  for (int i = 1; i <= N - 1; ++i) {
    const Matrix T = (P[i - 1].array() * apply_deriv(s.act, Z[i - 1]).array()).matrix();
    g.dW[i - 1] = hp.lambda * s.W[i - 1] + T * pred(s, i).transpose();
  }
  g.dW[N - 1] = hp.lambda * s.W[N - 1] + P[N - 1] * s.V[N - 2].transpose();

  for (int j = 1; j <= N - 2; ++j) {
    const Matrix T = (P[j].array() * apply_deriv(s.act, Z[j]).array()).matrix();
    g.dV[j - 1] = s.W[j].transpose() * T - P[j - 1];
  }
  g.dV[N - 2] = s.W[N - 1].transpose() * P[N - 1] - P[N - 2];
  g.dV[N - 1] = (s.V[N - 1] - s.Y) - P[N - 1];

  for (int i = 0; i < N; ++i) g.dLambda[i] = R[i];
  return g;
}

namespace {

bool finite_state(const ADMMState& s) {
  for (const Matrix& M : s.W)
    if (!M.allFinite()) return false;
  for (const Matrix& M : s.V)
    if (!M.allFinite()) return false;
  for (const Matrix& M : s.Lambda)
    if (!M.allFinite()) return false;
  return true;
}

}  // namespace

TrainResult train(ADMMState& s, const HyperParams& hp) {
  TrainResult r;
  const std::vector<std::string> problems = validate_params(s, hp);
  if (!problems.empty()) {
    r.status = TrainStatus::invalid_params;
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i > 0) r.message += "; ";
      r.message += problems[i];
    }
    return r;
  }

  r.constants = theory_constants(s, hp);
  r.trace.reserve(static_cast<std::size_t>(hp.epochs));
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    const ADMMState snapshot = s;
    const IterationDiagnostics d = iterate(s, hp, r.constants);
    if (!std::isfinite(d.lagrangian) || !finite_state(s)) {
      s = snapshot;
      r.status = TrainStatus::aborted_nonfinite;
      r.message = "non-finite iterate at k=" + std::to_string(snapshot.k + 1);
      return r;
    }
    r.trace.push_back(d);
    if (hp.kkt_tol > 0.0 && d.kkt_residual <= hp.kkt_tol) {
      r.status = TrainStatus::early_stop;
      r.message = "stationarity residual below tolerance at k=" + std::to_string(s.k);
      return r;
    }
  }
  return r;
}

NetParams to_net(const ADMMState& s) { return NetParams{s.W, s.act}; }

}  // namespace sigadmm
