#include "support/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace sigadmm::testing {

double ref_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  return std::exp(x) / (1.0 + std::exp(x));
}

namespace {

Matrix ref_matmul(const Matrix& A, const Matrix& B) {
  Matrix C = Matrix::Zero(A.rows(), B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j) {
      double acc = 0.0;
      for (int k = 0; k < A.cols(); ++k) acc += A(i, k) * B(k, j);
      C(i, j) = acc;
    }
  return C;
}

Matrix ref_sigmoid_mat(const Matrix& Z) {
  Matrix S(Z.rows(), Z.cols());
  for (int i = 0; i < Z.rows(); ++i)
    for (int j = 0; j < Z.cols(); ++j) S(i, j) = ref_sigmoid(Z(i, j));
  return S;
}

double ref_sqnorm(const Matrix& A) {
  double acc = 0.0;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) acc += A(i, j) * A(i, j);
  return acc;
}

double ref_inner(const Matrix& A, const Matrix& B) {
  double acc = 0.0;
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) acc += A(i, j) * B(i, j);
  return acc;
}

}  // namespace

Matrix ref_forward_output(const MatrixList& W, const Matrix& X) {
  Matrix V = X;
  for (std::size_t l = 0; l < W.size(); ++l) {
    Matrix Z = ref_matmul(W[l], V);
    V = (l + 1 < W.size()) ? ref_sigmoid_mat(Z) : Z;
  }
  return V;
}

double ref_empirical_loss(const MatrixList& W, const Matrix& X, const Matrix& Y,
                          double lambda_prime) {
  const Matrix out = ref_forward_output(W, X);
  double loss = 0.0;
  for (int j = 0; j < Y.cols(); ++j)
    for (int i = 0; i < Y.rows(); ++i) {
      const double d = out(i, j) - Y(i, j);
      loss += d * d;
    }
  loss /= static_cast<double>(X.cols());
  for (const Matrix& Wl : W) loss += lambda_prime * ref_sqnorm(Wl);
  return loss;
}

double ref_lagrangian(const MatrixList& W, const MatrixList& V, const MatrixList& L,
                      const Matrix& X, const Matrix& Y, double lambda,
                      const std::vector<double>& beta) {
  const int N = static_cast<int>(W.size());
  double acc = 0.5 * ref_sqnorm(V[N - 1] - Y);
  for (const Matrix& Wl : W) acc += 0.5 * lambda * ref_sqnorm(Wl);
  for (int i = 0; i < N - 1; ++i) {
    const Matrix& below = (i == 0) ? X : V[i - 1];
    const Matrix R = ref_sigmoid_mat(ref_matmul(W[i], below)) - V[i];
    acc += 0.5 * beta[i] * ref_sqnorm(R) + ref_inner(L[i], R);
  }
  const Matrix RN = ref_matmul(W[N - 1], V[N - 2]) - V[N - 1];
  acc += 0.5 * beta[N - 1] * ref_sqnorm(RN) + ref_inner(L[N - 1], RN);
  return acc;
}

Matrix quadratic_minimize(const std::function<double(const Matrix&)>& f,
                          const Matrix& start, double h) {
  const int rows = static_cast<int>(start.rows());
  const int cols = static_cast<int>(start.cols());
  const int dim = rows * cols;
  auto with = [&](const Eigen::VectorXd& delta) {
    Matrix M = start;
    for (int c = 0, k = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r, ++k) M(r, c) += delta[k];
    return f(M);
  };

  const double f0 = with(Eigen::VectorXd::Zero(dim));
  Eigen::VectorXd g(dim);
  Eigen::VectorXd fp(dim), fm(dim);
  for (int k = 0; k < dim; ++k) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
    d[k] = h;
    fp[k] = with(d);
    d[k] = -h;
    fm[k] = with(d);
    g[k] = (fp[k] - fm[k]) / (2.0 * h);
  }
  Eigen::MatrixXd H(dim, dim);
  for (int i = 0; i < dim; ++i) {
    H(i, i) = (fp[i] - 2.0 * f0 + fm[i]) / (h * h);
    for (int j = i + 1; j < dim; ++j) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
      d[i] = h;
      d[j] = h;
      const double fij = with(d);
      H(i, j) = H(j, i) = (fij - fp[i] - fp[j] + f0) / (h * h);
    }
  }
  const Eigen::VectorXd z = H.ldlt().solve(-g);
  Matrix M = start;
  for (int c = 0, k = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r, ++k) M(r, c) += z[k];
  return M;
}

Matrix numeric_gradient(const std::function<double(const Matrix&)>& f,
                        const Matrix& at, double h) {
  Matrix g(at.rows(), at.cols());
  for (int c = 0; c < at.cols(); ++c)
    for (int r = 0; r < at.rows(); ++r) {
      Matrix M = at;
      M(r, c) = at(r, c) + h;
      const double fp = f(M);
      M(r, c) = at(r, c) - h;
      const double fm = f(M);
      g(r, c) = (fp - fm) / (2.0 * h);
    }
  return g;
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix M(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) M(r, c) = dist(rng);
  return M;
}

TheoryConstants ref_constants(const ADMMState& s0, const HyperParams& hp) {
  const int N = s0.depth();
  const double n = static_cast<double>(s0.X.cols());
  const double L0 = s0.act.L0, L1 = s0.act.L1, L2 = s0.act.L2;
  const auto& b = hp.beta;
  const double lam = hp.lambda;

  TheoryConstants t;
  t.L3 = 2.0 * (L1 * L1 + L2 * L0 + L2);
  const double L3 = t.L3;

  double gamma = 0.0;
  for (const Matrix& Wl : s0.W) gamma = std::max(gamma, std::sqrt(Wl.squaredNorm()));
  t.gamma = gamma;

  int dmin = static_cast<int>(s0.W[0].rows());
  for (int i = 0; i < N - 1; ++i) dmin = std::min(dmin, static_cast<int>(s0.W[i].rows()));
  t.d_min = dmin;

  t.f_min = std::sqrt(6.0) * (std::sqrt(3.0 * L1) +
                              2.0 * std::sqrt(L0 * L3) * std::pow(n * dmin, 0.25));
  t.alpha3 = std::pow(t.f_min / L1, 2.0);

  double C3 = 0.0;
  for (int j = 0; j + 1 <= N - 1; ++j) {
    const double width = static_cast<double>(s0.W[j].rows());
    C3 = std::max(C3, 2.0 * L0 * std::sqrt(n * width) / std::pow(gamma, j));
  }
  if (b[N - 1] > 3.0) {
    const double ynorm = std::sqrt(s0.Y.squaredNorm());
    C3 = std::max(C3, ynorm / ((b[N - 1] - 3.0) * std::pow(gamma, N - 1)));
  }
  t.C3 = C3;

  t.lambda_tilde.clear();
  t.lambda_bar = 0.0;
  for (int i = 2; i <= N - 1; ++i) {
    const double d_i = static_cast<double>(s0.W[i - 1].rows());
    const double inner = 4.0 * C3 * std::pow(gamma, i - 1) + L0 * std::sqrt(n * d_i);
    const double root = std::sqrt(6.0 * L3 * C3 * C3 * std::pow(gamma, 2.0 * i - 2.0) /
                                  (L1 * inner));
    const double lt = 3.0 * L1 * C3 * b[i - 1] * std::pow(gamma, i - 3) * inner * (1.0 + root);
    t.lambda_tilde.push_back(lt);
    const double paren = 1.0 + 3.0 * (L2 / L1) * L3 * std::pow(gamma, i - 1);
    const double second =
        paren * paren * C3 * C3 * std::pow(gamma, 2.0 * (i - 2)) * b[i - 1] / 6.0;
    t.lambda_bar = std::max(t.lambda_bar, std::max(lt, second));
  }

  {
    const double xnorm = std::sqrt(s0.X.squaredNorm());
    const double d1 = static_cast<double>(s0.W[0].rows());
    const double inner = 4.0 * C3 + L0 * std::sqrt(n * d1);
    const double root = std::sqrt(2.0 * L3 * C3 * xnorm * gamma / (L1 * inner));
    t.lambda_hat = L1 * b[0] * xnorm * inner * (1.0 + root) / gamma;
  }

  // (L1 gamma)^(2 (anchor - j)) sums over the layers below a block.
  auto tail = [&](int count, int plus_one, int anchor) {
    double acc = 0.0;
    for (int j = 1; j <= count; ++j) {
      const double weight = static_cast<double>(N - j + (plus_one ? 1 : 0));
      acc += weight * std::pow(L1 * gamma, 2.0 * (anchor - j)) / b[j - 1];
    }
    return acc;
  };

  t.zeta.assign(N, 0.0);
  t.eta.assign(N, 0.0);
  t.xi.assign(N, 0.0);

  t.zeta[0] = lam / 2.0;
  for (int i = 2; i <= N - 1; ++i) {
    const double paren = 1.0 + 3.0 * (L2 / L1) * L3 * std::pow(gamma, i - 1);
    t.zeta[i - 1] = lam / 2.0 - 2.0 * paren * paren * C3 * C3 * b[i - 1] * b[i - 1] *
                                    std::pow(gamma, 2.0 * (i - 2)) * tail(i - 1, 0, i);
  }
  t.zeta[N - 1] = lam / 2.0 -
                  3.0 * C3 * C3 * b[N - 1] * b[N - 1] * std::pow(gamma, 2.0 * (N - 1)) / b[N - 2] -
                  (2.0 / (L1 * L1)) * C3 * C3 * b[N - 1] * b[N - 1] *
                      std::pow(gamma, 2.0 * (N - 2)) * tail(N - 2, 0, N);

  const double bn = b[N - 1];
  t.eta[N - 1] = (1.0 + bn) / 2.0 - 1.0 / bn -
                 3.0 * gamma * gamma * (1.0 + bn) * (1.0 + bn) / b[N - 2] -
                 (4.0 * (1.0 + bn) * (1.0 + bn) / (L1 * L1)) * tail(N - 2, 1, N);
  t.xi[N - 1] = 3.0 * gamma * gamma * bn * bn / b[N - 2] +
                (4.0 * bn * bn / (L1 * L1)) * tail(N - 2, 1, N);

  t.eta[N - 2] = b[N - 2] / 2.0 - 4.0 * b[N - 2] * b[N - 2] * tail(N - 2, 1, N - 1);
  t.xi[N - 2] = 4.0 * b[N - 2] * b[N - 2] * tail(N - 2, 1, N - 1);

  for (int i = 2; i <= N - 2; ++i) {
    const double ce = L1 * L1 + 2.0 * L3 * C3 * std::pow(gamma, i);
    const double cx = L1 * L1 + 2.0 * L3 * C3 * std::pow(gamma, i) + L2 * C3 * std::pow(gamma, i);
    const double bracket_e = b[i - 1] + ce * gamma * gamma * b[i];
    const double bracket_x = b[i - 1] + cx * gamma * gamma * b[i];
    t.eta[i - 1] = b[i - 1] / 2.0 - 4.0 * bracket_e * bracket_e * tail(i - 1, 1, i) -
                   4.0 * ce * ce * std::pow(gamma, 4.0) * b[i] * b[i] / b[i - 1] *
                       static_cast<double>(N - i + 1);
    t.xi[i - 1] = 4.0 * bracket_x * bracket_x * tail(i - 1, 1, i) +
                  4.0 * cx * cx * std::pow(gamma, 4.0) * b[i] * b[i] / b[i - 1] *
                      static_cast<double>(N - i + 1);
  }
  if (N >= 3) {
    const double ce = L1 * L1 + 2.0 * L3 * C3 * gamma;
    const double cx = ce + L2 * C3 * gamma;
    t.eta[0] = b[0] / 2.0 -
               4.0 * ce * ce * std::pow(gamma, 4.0) * b[1] * b[1] / b[0] * static_cast<double>(N);
    t.xi[0] = 4.0 * cx * cx * std::pow(gamma, 4.0) * b[1] * b[1] / b[0] * static_cast<double>(N);
  }

  t.a = t.zeta[0];
  for (int i = 0; i < N; ++i) {
    t.a = std::min(t.a, t.zeta[i]);
    t.a = std::min(t.a, t.eta[i] - t.xi[i]);
  }
  return t;
}

}  // namespace sigadmm::testing
