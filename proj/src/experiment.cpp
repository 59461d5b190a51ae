#include "sigadmm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace sigadmm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  std::istringstream ss(value);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trimmed(tok);
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad number '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& value) {
  std::vector<int> out;
  for (double v : parse_double_list(value)) {
    if (v != std::floor(v)) throw std::invalid_argument("expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

struct Cell {
  int depth, width;
  double scale, lambda, beta, lr;
};

std::vector<int> cell_dims(const ExperimentConfig& cfg, const Cell& cell) {
  const TargetFunction f{cfg.task};
  std::vector<int> dims;
  dims.push_back(f.input_dim());
  for (int l = 0; l < cell.depth; ++l) dims.push_back(cell.width);
  dims.push_back(1);
  return dims;
}

long param_count(const std::vector<int>& dims) {
  long p = 0;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i)
    p += static_cast<long>(dims[i]) * dims[i + 1];
  return p;
}

std::string format_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void write_admm_trace(const std::string& path, const TrainResult& tr, int N) {
  std::ofstream out(path);
  out << "k,L,Lhat,kkt_residual,grad_norm_sq";
  for (int i = 1; i <= N; ++i) out << ",dW_" << i;
  for (int i = 1; i <= N; ++i) out << ",dV_" << i;
  for (int i = 1; i <= N; ++i) out << ",dLambda_" << i;
  out << "\n";
  out.precision(17);
  for (const IterationDiagnostics& d : tr.trace) {
    out << d.k << ',' << d.lagrangian << ',' << d.lyapunov << ',' << d.kkt_residual << ','
        << d.grad_norm_sq;
    for (double v : d.dW_norm) out << ',' << v;
    for (double v : d.dV_norm) out << ',' << v;
    for (double v : d.dLambda_norm) out << ',' << v;
    out << "\n";
  }
}

void write_sgd_trace(const std::string& path, const SGDResult& tr) {
  std::ofstream out(path);
  out << "epoch,train_loss,test_metric,lr,grad_norm_layer1\n";
  out.precision(17);
  for (const SGDTraceRow& r : tr.trace) {
    out << r.epoch << ',' << r.train_loss << ',' << r.test_metric << ',' << r.lr << ','
        << r.grad_norm_layer1 << "\n";
  }
}

}  // namespace

void apply_config_line(ExperimentConfig& cfg, const std::string& key,
                       const std::string& value) {
  try {
    if (key == "task") cfg.task = TargetFunction::parse(value).kind;
    else if (key == "optimizer") {
      if (value == "admm") cfg.optimizer = OptimizerKind::admm;
      else if (value == "sgd") cfg.optimizer = OptimizerKind::sgd;
      else if (value == "sgd_sigmoid") {
        cfg.optimizer = OptimizerKind::sgd;
        cfg.activation = ActivationKind::sigmoid;
      } else if (value == "sgd_relu") {
        cfg.optimizer = OptimizerKind::sgd;
        cfg.activation = ActivationKind::relu;
      } else throw std::invalid_argument("unknown optimizer");
    } else if (key == "depths") cfg.depths = parse_int_list(value);
    else if (key == "widths") cfg.widths = parse_int_list(value);
    else if (key == "scales") cfg.scales = parse_double_list(value);
    else if (key == "init") {
      const InitScheme s = parse_scheme(value);
      cfg.init = s.kind;
      if (s.scale != 1.0) cfg.scales = {s.scale};
    } else if (key == "lambdas") cfg.lambdas = parse_double_list(value);
    else if (key == "betas") cfg.betas = parse_double_list(value);
    else if (key == "lrs") cfg.lrs = parse_double_list(value);
    else if (key == "activation") {
      if (value == "sigmoid") cfg.activation = ActivationKind::sigmoid;
      else if (value == "relu") cfg.activation = ActivationKind::relu;
      else throw std::invalid_argument("unknown activation");
    } else if (key == "trials") cfg.trials = parse_int_list(value).at(0);
    else if (key == "epochs") cfg.epochs = parse_int_list(value).at(0);
    else if (key == "n_train") cfg.n_train = parse_int_list(value).at(0);
    else if (key == "n_test") cfg.n_test = parse_int_list(value).at(0);
    else if (key == "noise_std") cfg.noise_std = parse_double_list(value).at(0);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "mode") {
      if (value == "practical") cfg.mode = SolveMode::practical;
      else if (value == "theory") cfg.mode = SolveMode::theory;
      else throw std::invalid_argument("unknown mode");
    } else if (key == "workers") cfg.workers = parse_int_list(value).at(0);
    else if (key == "out_dir") cfg.out_dir = value;
    else throw std::invalid_argument("unknown key");
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config entry '" + key + " = " + value + "': " + e.what());
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    apply_config_line(cfg, trimmed(line.substr(0, eq)), trimmed(line.substr(eq + 1)));
  }
  return cfg;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << TargetFunction{cfg.task}.name() << '|'
     << (cfg.optimizer == OptimizerKind::admm ? "admm" : "sgd") << '|';
  for (int d : cfg.depths) os << d << ',';
  os << '|';
  for (int w : cfg.widths) os << w << ',';
  os << '|';
  for (double s : cfg.scales) os << s << ',';
  os << '|' << to_string(cfg.init) << '|';
  for (double v : cfg.lambdas) os << v << ',';
  os << '|';
  for (double v : cfg.betas) os << v << ',';
  os << '|';
  for (double v : cfg.lrs) os << v << ',';
  os << '|' << (cfg.activation == ActivationKind::sigmoid ? "sigmoid" : "relu") << '|'
     << cfg.trials << '|' << cfg.epochs << '|' << cfg.n_train << '|' << cfg.n_test << '|'
     << cfg.noise_std << '|' << cfg.seed << '|'
     << (cfg.mode == SolveMode::practical ? "practical" : "theory");
  const std::string s = os.str();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean_of: empty");
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median_of: empty");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("run_experiment: trials must be positive");
  const TargetFunction target{cfg.task};

  std::vector<Cell> cells;
  for (int depth : cfg.depths)
    for (int width : cfg.widths)
      for (double scale : cfg.scales) {
        if (cfg.optimizer == OptimizerKind::admm) {
          for (double lambda : cfg.lambdas)
            for (double beta : cfg.betas)
              cells.push_back({depth, width, scale, lambda, beta, 0.0});
        } else {
          for (double lr : cfg.lrs) cells.push_back({depth, width, scale, 0.0, 0.0, lr});
        }
      }

  // Datasets are drawn once per trial index so every cell sees the same
  // data in a given trial.
  std::vector<Dataset> data;
  data.reserve(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t)
    data.push_back(make_dataset(target, cfg.n_train, cfg.n_test, cfg.noise_std,
                                splitmix64(cfg.seed * 0x9e37u + t)));

  const std::string tag = config_hash(cfg).substr(0, 8);
  std::string trace_dir;
  if (!cfg.out_dir.empty()) {
    trace_dir = cfg.out_dir + "/traces";
    std::filesystem::create_directories(trace_dir);
  }

  struct Job {
    int cell, trial;
  };
  std::vector<Job> jobs;
  for (int c = 0; c < static_cast<int>(cells.size()); ++c)
    for (int t = 0; t < cfg.trials; ++t) jobs.push_back({c, t});

  std::vector<double> metric(jobs.size());
  std::vector<char> failed(jobs.size(), 0);

  auto run_job = [&](int j) {
    const Cell& cell = cells[jobs[j].cell];
    const int trial = jobs[j].trial;
    const Dataset& ds = data[trial];
    const std::vector<int> dims = cell_dims(cfg, cell);
    const std::uint64_t wseed =
        splitmix64(splitmix64(cfg.seed) ^ (static_cast<std::uint64_t>(jobs[j].cell) << 20) ^
                   static_cast<std::uint64_t>(trial));
    std::ostringstream trace_name;
    if (!trace_dir.empty()) {
      trace_name << trace_dir << '/' << tag << "_d" << cell.depth << "_w" << cell.width
                 << "_s" << format_g(cell.scale);
      if (cfg.optimizer == OptimizerKind::admm)
        trace_name << "_l" << format_g(cell.lambda) << "_b" << format_g(cell.beta);
      else
        trace_name << "_lr" << format_g(cell.lr);
      trace_name << "_t" << trial << ".csv";
    }

    try {
      if (cfg.optimizer == OptimizerKind::admm) {
        NetParams net{init_weights(dims, {cfg.init, cell.scale}, wseed),
                      Activation::sigmoid()};
        ADMMState state = init_state(net, ds.X_train, ds.Y_train);
        HyperParams hp;
        hp.lambda = cell.lambda;
        hp.beta = HyperParams::uniform_beta(state.depth(), cell.beta);
        hp.mode = cfg.mode;
        hp.epochs = cfg.epochs;
        const TrainResult tr = train(state, hp);
        if (!trace_dir.empty()) write_admm_trace(trace_name.str(), tr, state.depth());
        if (tr.status == TrainStatus::aborted_nonfinite ||
            tr.status == TrainStatus::invalid_params)
          throw std::runtime_error(tr.message);
        metric[j] = mse(forward(to_net(state), ds.X_test).output(), ds.Y_test);
      } else {
        Activation act = cfg.activation == ActivationKind::sigmoid ? Activation::sigmoid()
                                                                   : Activation::relu();
        NetParams net{init_weights(dims, {cfg.init, cell.scale}, wseed), act};
        SGDConfig sc;
        sc.lr0 = cell.lr;
        sc.epochs = cfg.epochs;
        const SGDResult tr = train_sgd(net, ds.X_train, ds.Y_train, sc, splitmix64(wseed),
                                       [&](const NetParams& np) {
                                         return mse(forward(np, ds.X_test).output(), ds.Y_test);
                                       });
        if (!trace_dir.empty()) write_sgd_trace(trace_name.str(), tr);
        if (tr.status == SGDStatus::aborted_nonfinite) throw std::runtime_error(tr.message);
        metric[j] = mse(forward(net, ds.X_test).output(), ds.Y_test);
      }
      if (!std::isfinite(metric[j])) throw std::runtime_error("non-finite metric");
    } catch (const std::exception&) {
      failed[j] = 1;
    }
  };

  int workers = cfg.workers > 0 ? cfg.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(static_cast<int>(j));
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int j = next.fetch_add(1); j < static_cast<int>(jobs.size());
             j = next.fetch_add(1))
          run_job(j);
      });
    for (std::thread& th : pool) th.join();
  }

  ExperimentResult res;
  res.rows.reserve(cells.size());
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
    const Cell& cell = cells[c];
    ResultRow row;
    row.depth = cell.depth;
    row.width = cell.width;
    row.scale = cell.scale;
    row.lambda = cell.lambda;
    row.beta = cell.beta;
    row.lr = cell.lr;
    std::vector<double> ok;
    for (int t = 0; t < cfg.trials; ++t) {
      const int j = c * cfg.trials + t;
      if (failed[j]) ++row.trials_failed;
      else ok.push_back(metric[j]);
    }
    row.trials_ok = static_cast<int>(ok.size());
    if (!ok.empty()) {
      row.mean = mean_of(ok);
      row.stddev = stddev_of(ok);
      row.median = median_of(ok);
    } else {
      row.mean = row.stddev = row.median = std::numeric_limits<double>::quiet_NaN();
    }
    res.rows.push_back(row);
  }

  for (int c = 0; c < static_cast<int>(res.rows.size()); ++c) {
    const ResultRow& row = res.rows[c];
    if (row.trials_ok == 0) continue;
    if (res.best_index < 0) {
      res.best_index = c;
      continue;
    }
    const ResultRow& best = res.rows[res.best_index];
    if (row.mean < best.mean ||
        (row.mean == best.mean && param_count(cell_dims(cfg, cells[c])) <
                                      param_count(cell_dims(cfg, cells[res.best_index]))))
      res.best_index = c;
  }
  return res;
}

void emit_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  if (cfg.out_dir.empty()) throw std::invalid_argument("emit_outputs: out_dir not set");
  std::filesystem::create_directories(cfg.out_dir);

  std::ofstream csv(cfg.out_dir + "/results.csv");
  csv << "task,optimizer,depth,width,scale,lambda,beta,lr,trials_ok,trials_failed,"
         "mean,std,median\n";
  csv.precision(17);
  const std::string task = TargetFunction{cfg.task}.name();
  const std::string opt = cfg.optimizer == OptimizerKind::admm ? "admm" : "sgd";
  for (const ResultRow& r : result.rows) {
    csv << task << ',' << opt << ',' << r.depth << ',' << r.width << ',' << r.scale << ','
        << r.lambda << ',' << r.beta << ',' << r.lr << ',' << r.trials_ok << ','
        << r.trials_failed << ',' << r.mean << ',' << r.stddev << ',' << r.median << "\n";
  }
  csv.close();

  nlohmann::json j;
  j["task"] = task;
  j["optimizer"] = opt;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["epochs"] = cfg.epochs;
  j["mode"] = cfg.mode == SolveMode::practical ? "practical" : "theory";
  j["rows"] = result.rows.size();
  if (result.best_index >= 0) {
    const ResultRow& b = result.rows[result.best_index];
    j["best"] = {{"depth", b.depth},   {"width", b.width},   {"scale", b.scale},
                 {"lambda", b.lambda}, {"beta", b.beta},     {"lr", b.lr},
                 {"mean", b.mean},     {"std", b.stddev},    {"median", b.median},
                 {"trials_ok", b.trials_ok}, {"trials_failed", b.trials_failed}};
  }
  std::ofstream js(cfg.out_dir + "/summary.json");
  js << j.dump(2) << "\n";
}

}  // namespace sigadmm
