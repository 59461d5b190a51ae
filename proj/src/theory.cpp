#include <cmath>
#include <limits>
#include <sstream>

#include "sigadmm/admm.hpp"

namespace sigadmm {

namespace {

double pow_int(double base, int e) {
  return std::pow(base, static_cast<double>(e));
}

}  // namespace

// All constants are evaluated from the iterate handed in, which is expected
// to be the starting point: gamma is the largest initial weight norm and
// everything else builds on it. The same arithmetic runs in practical mode
// so that the Lyapunov trace is always defined; the inequalities those
// numbers are meant to satisfy are only enforced by validate_params in
// theory mode.
TheoryConstants theory_constants(const ADMMState& s0, const HyperParams& hp) {
  const int N = s0.depth();
  const double n = static_cast<double>(s0.samples());
  const double L0 = s0.act.L0, L1 = s0.act.L1, L2 = s0.act.L2;

  TheoryConstants tc;
  tc.L3 = 2.0 * (L1 * L1 + L2 * L0 + L2);

  tc.gamma = 0.0;
  for (const Matrix& Wi : s0.W) tc.gamma = std::max(tc.gamma, Wi.norm());
  const double g = tc.gamma;

  tc.d_min = std::numeric_limits<int>::max();
  for (int i = 1; i <= N - 1; ++i)
    tc.d_min = std::min(tc.d_min, static_cast<int>(s0.W[i - 1].rows()));

  tc.f_min = std::sqrt(6.0) *
             (std::sqrt(3.0 * L1) +
              2.0 * std::sqrt(L0 * tc.L3) * std::pow(n * tc.d_min, 0.25));
  tc.alpha3 = (tc.f_min / L1) * (tc.f_min / L1);

  const double bN = hp.beta[N - 1];
  double c3 = 0.0;
  for (int j = 0; j <= N - 2; ++j) {
    const double dj1 = static_cast<double>(s0.W[j].rows());
    c3 = std::max(c3, 2.0 * L0 * std::sqrt(n * dj1) / pow_int(g, j));
  }
  // The response-norm term is only meaningful once beta_N clears 3; below
  // that it is negative (or singular at 3) and the first term rules anyway.
  if (bN > 3.0) c3 = std::max(c3, s0.Y.norm() / ((bN - 3.0) * pow_int(g, N - 1)));
  tc.C3 = c3;

  tc.lambda_tilde.assign(std::max(0, N - 2), 0.0);
  tc.lambda_bar = 0.0;
  for (int i = 2; i <= N - 1; ++i) {
    const double bi = hp.beta[i - 1];
    const double di = static_cast<double>(s0.W[i - 1].rows());
    const double base = 4.0 * c3 * pow_int(g, i - 1) + L0 * std::sqrt(n * di);
    const double lt =
        3.0 * L1 * c3 * bi * pow_int(g, i - 3) * base *
        (1.0 + std::sqrt(6.0 * tc.L3 * c3 * c3 * pow_int(g, 2 * i - 2) / (L1 * base)));
    tc.lambda_tilde[i - 2] = lt;
    const double other = (1.0 / 6.0) *
                         std::pow(1.0 + 3.0 * L2 * tc.L3 * pow_int(g, i - 1) / L1, 2) *
                         c3 * c3 * pow_int(g, 2 * (i - 2)) * bi;
    tc.lambda_bar = std::max({tc.lambda_bar, lt, other});
  }

  {
    const double d1 = static_cast<double>(s0.W[0].rows());
    const double base = 4.0 * c3 + L0 * std::sqrt(n * d1);
    tc.lambda_hat =
        L1 * hp.beta[0] * s0.X.norm() * base / g *
        (1.0 + std::sqrt(2.0 * tc.L3 * c3 * s0.X.norm() * g / (L1 * base)));
  }

  // Descent margins. The recurring sums run over the layers below the block
  // in question; they are empty for the shallowest cases, which is how the
  // two-layer network gets its simple margins.
  auto sum_below = [&](int upto, int offset, int expo_anchor) {
    // sum_{j=1}^{upto} beta_j^{-1} (N - j + offset) (L1 g)^(2 (expo_anchor - j))
    double t = 0.0;
    for (int j = 1; j <= upto; ++j)
      t += (N - j + offset) * pow_int(L1 * g, 2 * (expo_anchor - j)) / hp.beta[j - 1];
    return t;
  };

  tc.zeta.assign(N, 0.0);
  tc.eta.assign(N, 0.0);
  tc.xi.assign(N, 0.0);

  tc.zeta[0] = 0.5 * hp.lambda;
  for (int i = 2; i <= N - 1; ++i) {
    const double bi = hp.beta[i - 1];
    tc.zeta[i - 1] = 0.5 * hp.lambda -
                     2.0 * std::pow(1.0 + 3.0 * L2 * tc.L3 * pow_int(g, i - 1) / L1, 2) *
                         c3 * c3 * bi * bi * pow_int(g, 2 * (i - 2)) *
                         sum_below(i - 1, 0, i);
  }
  tc.zeta[N - 1] = 0.5 * hp.lambda -
                   3.0 * c3 * c3 * bN * bN * pow_int(g, 2 * (N - 1)) / hp.beta[N - 2] -
                   2.0 * c3 * c3 * bN * bN * pow_int(g, 2 * (N - 2)) / (L1 * L1) *
                       sum_below(N - 2, 0, N);

  const double bN1 = hp.beta[N - 2];
  tc.eta[N - 1] = 0.5 * (1.0 + bN) - 1.0 / bN -
                  3.0 * g * g * (1.0 + bN) * (1.0 + bN) / bN1 -
                  4.0 * (1.0 + bN) * (1.0 + bN) / (L1 * L1) * sum_below(N - 2, 1, N);
  tc.xi[N - 1] = 3.0 * g * g * bN * bN / bN1 +
                 4.0 * bN * bN / (L1 * L1) * sum_below(N - 2, 1, N);

  tc.eta[N - 2] = 0.5 * bN1 - 4.0 * bN1 * bN1 * sum_below(N - 2, 1, N - 1);
  tc.xi[N - 2] = 4.0 * bN1 * bN1 * sum_below(N - 2, 1, N - 1);

  for (int i = 2; i <= N - 2; ++i) {
    const double bi = hp.beta[i - 1];
    const double bi1 = hp.beta[i];
    const double curve = L1 * L1 + 2.0 * tc.L3 * c3 * pow_int(g, i);
    const double curve_xi = curve + L2 * c3 * pow_int(g, i);
    tc.eta[i - 1] = 0.5 * bi -
                    4.0 * std::pow(bi + curve * g * g * bi1, 2) * sum_below(i - 1, 1, i) -
                    4.0 * curve * curve * pow_int(g, 4) * bi1 * bi1 / bi * (N - i + 1);
    tc.xi[i - 1] = 4.0 * std::pow(bi + curve_xi * g * g * bi1, 2) * sum_below(i - 1, 1, i) +
                   4.0 * curve_xi * curve_xi * pow_int(g, 4) * bi1 * bi1 / bi * (N - i + 1);
  }
  if (N >= 3) {
    const double curve = L1 * L1 + 2.0 * tc.L3 * c3 * g;
    const double curve_xi = curve + L2 * c3 * g;
    tc.eta[0] = 0.5 * hp.beta[0] -
                4.0 * curve * curve * pow_int(g, 4) * hp.beta[1] * hp.beta[1] / hp.beta[0] * N;
    tc.xi[0] = 4.0 * curve_xi * curve_xi * pow_int(g, 4) * hp.beta[1] * hp.beta[1] /
               hp.beta[0] * N;
  }

  tc.a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i)
    tc.a = std::min({tc.a, tc.zeta[i], tc.eta[i] - tc.xi[i]});
  return tc;
}

std::vector<std::string> validate_params(const ADMMState& s0, const HyperParams& hp) {
  std::vector<std::string> bad;
  const int N = s0.depth();
  auto complain = [&bad](const std::string& msg) { bad.push_back(msg); };

  if (static_cast<int>(hp.beta.size()) != N) {
    complain("beta must have one entry per layer");
    return bad;
  }
  for (int i = 0; i < N; ++i)
    if (!(hp.beta[i] > 0.0)) complain("beta_" + std::to_string(i + 1) + " must be positive");
  if (!(hp.lambda > 0.0)) complain("lambda must be positive");
  if (hp.epochs < 0) complain("epochs must be nonnegative");
  if (hp.kkt_tol < 0.0) complain("kkt_tol must be nonnegative");
  if (s0.act.kind != ActivationKind::sigmoid)
    complain("solver requires the sigmoid activation");
  if (!bad.empty() || hp.mode == SolveMode::practical) return bad;

  const TheoryConstants tc = theory_constants(s0, hp);
  const double g = tc.gamma;
  const double L0 = s0.act.L0, L1 = s0.act.L1, L2 = s0.act.L2;
  const double n = static_cast<double>(s0.samples());
  std::ostringstream os;
  os.precision(6);

  if (!(g > 0.0)) complain("initial weights are all zero");
  const double bN = hp.beta[N - 1];
  if (!(bN >= 3.5)) complain("beta_N must be at least 3.5");
  if (!(hp.beta[N - 2] / bN >= 16.0 * g * g))
    complain("beta_{N-1}/beta_N must be at least 16 gamma^2");
  for (int i = 1; i <= N - 2; ++i) {
    const double lhs = hp.beta[i - 1] / hp.beta[i];
    const double r1 = 6.0 * std::sqrt(static_cast<double>(N)) *
                      (2.0 * L1 * L1 + (4.0 * tc.L3 + L2) * tc.C3 * pow_int(g, i)) * g * g;
    const double r2 = 6.0 *
                      std::pow(std::sqrt(3.0 * L1) + std::sqrt(2.0 * tc.L3 * tc.C3 * pow_int(g, i)), 2) *
                      g * g;
    if (!(lhs >= std::max(r1, r2)))
      complain("beta_" + std::to_string(i) + "/beta_" + std::to_string(i + 1) +
               " below its admissible ratio");
  }
  const double lambda_floor =
      std::max({12.0 * bN * tc.C3 * tc.C3 * pow_int(g, 2 * N - 4), tc.lambda_bar, tc.lambda_hat});
  if (!(hp.lambda >= lambda_floor)) {
    os.str("");
    os << "lambda must be at least " << lambda_floor;
    complain(os.str());
  }
  const double dmin_floor =
      std::pow(std::max(std::sqrt(24.0 * N + 1.0) * L1 - std::sqrt(18.0 * L1), 0.0), 4) /
      (n * std::pow(24.0 * L0 * tc.L3, 2));
  if (!(tc.d_min >= dmin_floor)) {
    os.str("");
    os << "d_min must be at least " << dmin_floor;
    complain(os.str());
  }
  for (int i = 1; i <= N; ++i) {
    if (!(s0.V[i - 1].norm() <= 3.0 * tc.C3 * pow_int(g, i - 1)))
      complain("||V_" + std::to_string(i) + "^0|| exceeds its envelope");
    if (!(s0.Lambda[i - 1].norm() <= tc.C3 * hp.beta[i - 1] * pow_int(g, i - 1)))
      complain("||Lambda_" + std::to_string(i) + "^0|| exceeds its envelope");
  }
  for (int i = 0; i < N; ++i) {
    if (!(tc.zeta[i] > 0.0))
      complain("zeta_" + std::to_string(i + 1) + " is not positive");
    if (!(tc.eta[i] - tc.xi[i] > 0.0))
      complain("eta_" + std::to_string(i + 1) + " - xi_" + std::to_string(i + 1) +
               " is not positive");
  }
  return bad;
}

bool check_runtime_invariants(const ADMMState& s, const HyperParams& hp,
                              const TheoryConstants& tc) {
  const int N = s.depth();
  const double slack = 1.0 + 1e-9;
  const double g = tc.gamma;
  for (int i = 1; i <= N; ++i) {
    if (!(s.W[i - 1].norm() <= g * slack)) return false;
    if (!(s.V[i - 1].norm() <= 3.0 * tc.C3 * pow_int(g, i - 1) * slack)) return false;
    if (!(s.Lambda[i - 1].norm() <= tc.C3 * hp.beta[i - 1] * pow_int(g, i - 1) * slack))
      return false;
  }
  const LLACoefficients lla = lla_coefficients(s, hp);
  for (int i = 1; i <= N - 1; ++i)
    if (!(lla.h[i - 1] <= 4.0 * tc.L3 * tc.C3 * pow_int(g, i - 1) * slack)) return false;
  for (int j = 1; j <= N - 2; ++j)
    if (!(lla.mu[j - 1] <= 4.0 * tc.L3 * tc.C3 * pow_int(g, j) * slack)) return false;
  return true;
}

}  // namespace sigadmm
