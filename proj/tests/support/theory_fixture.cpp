#include "support/theory_fixture.hpp"

#include <algorithm>
#include <random>

#include "sigadmm/init.hpp"
#include "support/oracles.hpp"

namespace sigadmm::testing {

TheorySetup theory_setup(int epochs) {
  std::mt19937_64 rng(2024);
  Matrix X = random_matrix(2, 16, rng);
  Matrix Y = random_matrix(1, 16, rng);
  X /= X.norm();
  Y /= Y.norm();

  NetParams net;
  net.W = normalized_init({2, 4, 1}, parse_scheme("lecun_gauss"), 6);
  for (Matrix& W : net.W) W *= 1.0 - 1e-12;

  TheorySetup t;
  t.s = init_state(net, X, Y);
  t.hp.beta = {56.0, 3.5};
  t.hp.mode = SolveMode::theory;
  t.hp.epochs = epochs;
  t.hp.lambda = 1.0;  // placeholder, raised to the admissible floor below
  const TheoryConstants tc = theory_constants(t.s, t.hp);
  t.hp.lambda = 1.01 * std::max({12.0 * t.hp.beta[1] * tc.C3 * tc.C3,
                                 tc.lambda_bar, tc.lambda_hat});
  return t;
}

}  // namespace sigadmm::testing
