// Python bindings for the trainer. The surface mirrors how the library is
// used from C++: build a dataset, draw weights, train with ADMM or SGD,
// predict, and inspect the sigmoid-network approximants. Matrices cross
// the boundary as numpy arrays (features x samples, like the C++ side);
// training traces come back as columnar dicts ready for plotting.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sigadmm/admm.hpp"
#include "sigadmm/approx.hpp"
#include "sigadmm/bench.hpp"
#include "sigadmm/init.hpp"
#include "sigadmm/sgd.hpp"

namespace py = pybind11;
using namespace sigadmm;

namespace {

Activation parse_activation(const std::string& name) {
  if (name == "sigmoid") return Activation::sigmoid();
  if (name == "relu") return Activation::relu();
  throw std::invalid_argument("unknown activation '" + name + "'");
}

NetParams net_from(const MatrixList& W, const Activation& act) {
  if (W.empty()) throw std::invalid_argument("weights list is empty");
  for (std::size_t i = 1; i < W.size(); ++i)
    if (W[i].cols() != W[i - 1].rows())
      throw std::invalid_argument("weight shapes do not chain at layer " +
                                  std::to_string(i + 1));
  return NetParams{W, act};
}

std::vector<double> expand_beta(const std::variant<double, std::vector<double>>& beta,
                                int N) {
  if (const double* b = std::get_if<double>(&beta))
    return HyperParams::uniform_beta(N, *b);
  const std::vector<double>& bs = std::get<std::vector<double>>(beta);
  if (static_cast<int>(bs.size()) != N)
    throw std::invalid_argument("beta needs one entry per layer (" +
                                std::to_string(N) + ")");
  return bs;
}

const char* status_name(TrainStatus s) {
  switch (s) {
    case TrainStatus::ok: return "ok";
    case TrainStatus::early_stop: return "early_stop";
    case TrainStatus::aborted_nonfinite: return "aborted_nonfinite";
    case TrainStatus::invalid_params: return "invalid_params";
  }
  return "unknown";
}

py::dict admm_trace_dict(const std::vector<IterationDiagnostics>& trace) {
  const std::size_t n = trace.size();
  Vector k(n), lagrangian(n), lyap(n), kkt(n), grad(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[static_cast<Eigen::Index>(i)] = trace[i].k;
    lagrangian[static_cast<Eigen::Index>(i)] = trace[i].lagrangian;
    lyap[static_cast<Eigen::Index>(i)] = trace[i].lyapunov;
    kkt[static_cast<Eigen::Index>(i)] = trace[i].kkt_residual;
    grad[static_cast<Eigen::Index>(i)] = trace[i].grad_norm_sq;
  }
  using namespace py::literals;
  return py::dict("k"_a = k, "lagrangian"_a = lagrangian, "lyapunov"_a = lyap,
                  "kkt_residual"_a = kkt, "grad_norm_sq"_a = grad);
}

py::dict sgd_trace_dict(const std::vector<SGDTraceRow>& trace) {
  const std::size_t n = trace.size();
  Vector epoch(n), loss(n), metric(n), lr(n), g1(n);
  for (std::size_t i = 0; i < n; ++i) {
    epoch[static_cast<Eigen::Index>(i)] = trace[i].epoch;
    loss[static_cast<Eigen::Index>(i)] = trace[i].train_loss;
    metric[static_cast<Eigen::Index>(i)] = trace[i].test_metric;
    lr[static_cast<Eigen::Index>(i)] = trace[i].lr;
    g1[static_cast<Eigen::Index>(i)] = trace[i].grad_norm_layer1;
  }
  using namespace py::literals;
  return py::dict("epoch"_a = epoch, "train_loss"_a = loss, "test_metric"_a = metric,
                  "lr"_a = lr, "grad_norm_layer1"_a = g1);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ADMM trainer for deep sigmoid networks";
  using namespace py::literals;

  m.def(
      "make_dataset",
      [](const std::string& task, int n_train, int n_test, double noise_std,
         std::uint64_t seed) {
        const Dataset d =
            make_dataset(TargetFunction::parse(task), n_train, n_test, noise_std, seed);
        return py::dict("X_train"_a = d.X_train, "Y_train"_a = d.Y_train,
                        "X_test"_a = d.X_test, "Y_test"_a = d.Y_test);
      },
      "task"_a, "n_train"_a, "n_test"_a, "noise_std"_a = 0.0, "seed"_a = 1,
      "Samples a regression benchmark ('square', 'product', 'l1_radial',\n"
      "'l2_radial_wendland'): uniform training inputs with optional label\n"
      "noise and a noiseless evaluation grid. Columns are samples.");

  m.def(
      "init_weights",
      [](const std::vector<int>& dims, const std::string& scheme, std::uint64_t seed) {
        return init_weights(dims, parse_scheme(scheme), seed);
      },
      "dims"_a, "scheme"_a = "msra", "seed"_a = 1,
      "Draws weight matrices for the layer widths in dims. scheme is e.g.\n"
      "'msra', 'msra:8', 'lecun_gauss', 'orth_unif:0.25'.");

  m.def(
      "predict",
      [](const MatrixList& W, const Matrix& X, const std::string& activation) {
        const NetParams net = net_from(W, parse_activation(activation));
        if (X.rows() != net.W.front().cols())
          throw std::invalid_argument("input rows do not match the first layer");
        return forward(net, X).output();
      },
      "weights"_a, "X"_a, "activation"_a = "sigmoid",
      "Network output for the given weights, one column per sample.");

  m.def(
      "empirical_loss",
      [](const MatrixList& W, const Matrix& X, const Matrix& Y, double lambda_prime,
         const std::string& activation) {
        return empirical_loss(net_from(W, parse_activation(activation)), X, Y,
                              lambda_prime);
      },
      "weights"_a, "X"_a, "Y"_a, "lambda_prime"_a = 0.0, "activation"_a = "sigmoid",
      "Mean squared error plus lambda_prime times the summed squared weight\n"
      "norms.");

  m.def("mse", &mse, "Yhat"_a, "Y"_a);
  m.def("accuracy", &accuracy, "Yhat"_a, "Y"_a, "threshold"_a = 0.5,
        "Fraction of columns whose thresholded prediction matches the 0/1 label.");

  m.def(
      "train_admm",
      [](const Matrix& X, const Matrix& Y, const MatrixList& W0, double lam,
         const std::variant<double, std::vector<double>>& beta, int epochs,
         const std::string& mode, double kkt_tol) {
        ADMMState s = init_state(net_from(W0, Activation::sigmoid()), X, Y);
        HyperParams hp;
        hp.lambda = lam;
        hp.beta = expand_beta(beta, s.depth());
        hp.epochs = epochs;
        hp.kkt_tol = kkt_tol;
        if (mode == "theory")
          hp.mode = SolveMode::theory;
        else if (mode != "practical")
          throw std::invalid_argument("mode must be 'practical' or 'theory'");
        const TrainResult tr = train(s, hp);
        return py::dict("weights"_a = to_net(s).W, "status"_a = status_name(tr.status),
                        "message"_a = tr.message, "trace"_a = admm_trace_dict(tr.trace));
      },
      "X"_a, "Y"_a, "weights"_a, "lam"_a = 1e-6, "beta"_a = 1.0, "epochs"_a = 2000,
      "mode"_a = "practical", "kkt_tol"_a = 0.0,
      "Trains a sigmoid network by the layer-wise ADMM sweep starting from\n"
      "the given weights. beta is one penalty per layer or a single shared\n"
      "value. mode='theory' additionally enforces the parameter regime of\n"
      "the convergence guarantees and fails fast if it does not hold. The\n"
      "trace reports the augmented Lagrangian, its descent surrogate, the\n"
      "stationarity residual and the Lagrangian gradient per iteration.");

  m.def(
      "validate_params",
      [](const Matrix& X, const Matrix& Y, const MatrixList& W0, double lam,
         const std::variant<double, std::vector<double>>& beta) {
        ADMMState s = init_state(net_from(W0, Activation::sigmoid()), X, Y);
        HyperParams hp;
        hp.lambda = lam;
        hp.beta = expand_beta(beta, s.depth());
        hp.mode = SolveMode::theory;
        return validate_params(s, hp);
      },
      "X"_a, "Y"_a, "weights"_a, "lam"_a, "beta"_a,
      "Checks the descent-guarantee conditions for this start and returns\n"
      "the list of violated ones (empty means the regime holds).");

  m.def(
      "train_sgd",
      [](const Matrix& X, const Matrix& Y, const MatrixList& W0,
         const std::string& activation, double lr0, double decay, int decay_every,
         int batch_size, int epochs, double lambda_prime, std::uint64_t seed) {
        NetParams net = net_from(W0, parse_activation(activation));
        SGDConfig cfg;
        cfg.lr0 = lr0;
        cfg.decay = decay;
        cfg.decay_every = decay_every;
        cfg.batch_size = batch_size;
        cfg.epochs = epochs;
        cfg.lambda_prime = lambda_prime;
        const SGDResult r = train_sgd(net, X, Y, cfg, seed, nullptr);
        const char* status = r.status == SGDStatus::ok ? "ok" : "aborted_nonfinite";
        return py::dict("weights"_a = net.W, "status"_a = status,
                        "message"_a = r.message, "trace"_a = sgd_trace_dict(r.trace));
      },
      "X"_a, "Y"_a, "weights"_a, "activation"_a = "sigmoid", "lr0"_a = 0.1,
      "decay"_a = 0.95, "decay_every"_a = 10, "batch_size"_a = 50, "epochs"_a = 2000,
      "lambda_prime"_a = 0.0, "seed"_a = 1,
      "Minibatch SGD baseline with stepwise learning-rate decay. The trace\n"
      "includes the first layer's full-batch gradient norm, the cheap probe\n"
      "for vanishing-gradient stalls.");

  py::class_<SigmoidNetExpr>(m, "SigmoidExpr",
                             "A small sigmoid network in explicit form, as produced\n"
                             "by the function approximants.")
      .def_readonly("free_params", &SigmoidNetExpr::free_params)
      .def_property_readonly("hidden_layers", &SigmoidNetExpr::hidden_layers)
      .def("__call__", py::vectorize(&SigmoidNetExpr::eval1), "t"_a)
      .def("to_json", &expr_to_json,
           "Serializes the parameters as a JSON string.")
      .def("__repr__", [](const SigmoidNetExpr& e) {
        return "SigmoidExpr(hidden_layers=" + std::to_string(e.hidden_layers()) +
               ", free_params=" + std::to_string(e.free_params) + ")";
      });

  m.def("h_linear", &h_linear, "mu"_a,
        "One-neuron approximant of the identity on [-1, 1] with sup error\n"
        "at most 2 mu.");
  m.def("step_approx", &step_approx, "tau"_a, "eps"_a,
        "Sharpened sigmoid within eps of the unit step outside (-tau, tau).");
  m.def("relu_approx", &relu_approx, "eps"_a, "m"_a = 1.0, "seed"_a = 2024,
        "Two-hidden-layer approximant of relu on [-m, m], built from the\n"
        "step and identity pieces through a fitted product gate.");
}
