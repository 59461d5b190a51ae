#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "sigadmm/experiment.hpp"

using namespace sigadmm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

std::string write_config(const TempDir& dir, const std::string& body) {
  const fs::path p = dir.path / "config.txt";
  std::ofstream out(p);
  out << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One-pass aggregation oracle kept separate from the library's two-pass
// formulas: Welford for mean and variance, selection for the median.
struct Welford {
  long n = 0;
  double mean = 0.0, m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double sample_std() const {
    return n < 2 ? 0.0 : std::sqrt(m2 / static_cast<double>(n - 1));
  }
};

ExperimentConfig tiny_admm_config() {
  ExperimentConfig cfg;
  cfg.task = TargetKind::square;
  cfg.optimizer = OptimizerKind::admm;
  cfg.depths = {1};
  cfg.widths = {4};
  cfg.scales = {1.0};
  cfg.init = InitKind::msra;
  cfg.epochs = 5;
  cfg.n_train = 16;
  cfg.n_test = 16;
  cfg.trials = 1;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("aggregation matches a one-pass oracle") {
  std::vector<double> xs = {3.2, -1.0, 7.5, 0.25, 3.2, 9.1, -4.4};
  Welford w;
  for (double x : xs) w.add(x);
  CHECK(mean_of(xs) == doctest::Approx(w.mean).epsilon(1e-14));
  CHECK(stddev_of(xs) == doctest::Approx(w.sample_std()).epsilon(1e-14));

  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  CHECK(median_of(xs) == sorted[3]);  // odd count: middle element
  xs.push_back(12.0);
  sorted.push_back(12.0);
  std::sort(sorted.begin(), sorted.end());
  CHECK(median_of(xs) == doctest::Approx(0.5 * (sorted[3] + sorted[4])));
  CHECK(median_of(xs) >= sorted.front());
  CHECK(median_of(xs) <= sorted.back());

  CHECK(stddev_of({5.0}) == 0.0);
  CHECK(stddev_of({2.5, 2.5, 2.5, 2.5}) == 0.0);
  CHECK_THROWS_AS(mean_of({}), std::invalid_argument);
  CHECK_THROWS_AS(median_of({}), std::invalid_argument);
}

TEST_CASE("config files parse with comments and override defaults") {
  TempDir dir("sigadmm_cfg_parse");
  const std::string path = write_config(dir,
      "# benchmark sweep\n"
      "task = product\n"
      "optimizer = sgd\n"
      "depths = 1, 3\n"
      "widths = 10,20\n"
      "scales = 0.5, 2\n"
      "init = xavier\n"
      "lrs = 0.1, 0.05\n"
      "activation = relu\n"
      "trials = 4   # twenty in the full protocol\n"
      "epochs = 17\n"
      "n_train = 64\n"
      "n_test = 32\n"
      "noise_std = 0.25\n"
      "seed = 99\n"
      "mode = practical\n"
      "workers = 2\n"
      "\n"
      "out_dir = somewhere\n");
  const ExperimentConfig cfg = parse_config_file(path);
  CHECK(cfg.task == TargetKind::product);
  CHECK(cfg.optimizer == OptimizerKind::sgd);
  CHECK(cfg.depths == std::vector<int>({1, 3}));
  CHECK(cfg.widths == std::vector<int>({10, 20}));
  CHECK(cfg.scales == std::vector<double>({0.5, 2.0}));
  CHECK(cfg.init == InitKind::xavier);
  CHECK(cfg.lrs == std::vector<double>({0.1, 0.05}));
  CHECK(cfg.activation == ActivationKind::relu);
  CHECK(cfg.trials == 4);
  CHECK(cfg.epochs == 17);
  CHECK(cfg.n_train == 64);
  CHECK(cfg.n_test == 32);
  CHECK(cfg.noise_std == 0.25);
  CHECK(cfg.seed == 99);
  CHECK(cfg.mode == SolveMode::practical);
  CHECK(cfg.workers == 2);
  CHECK(cfg.out_dir == "somewhere");
}

TEST_CASE("config shorthand and error reporting") {
  ExperimentConfig cfg;
  // An init spec with an embedded scale pins the scale grid.
  apply_config_line(cfg, "init", "msra:8");
  CHECK(cfg.init == InitKind::msra);
  CHECK(cfg.scales == std::vector<double>({8.0}));
  // Combined optimizer spellings set the activation too.
  apply_config_line(cfg, "optimizer", "sgd_relu");
  CHECK(cfg.optimizer == OptimizerKind::sgd);
  CHECK(cfg.activation == ActivationKind::relu);
  apply_config_line(cfg, "optimizer", "sgd_sigmoid");
  CHECK(cfg.activation == ActivationKind::sigmoid);

  CHECK_THROWS_WITH_AS(apply_config_line(cfg, "widths", "100abc"),
                       doctest::Contains("100abc"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(apply_config_line(cfg, "depths", "1.5"),
                       doctest::Contains("depths"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(apply_config_line(cfg, "frobnicate", "1"),
                       doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_line(cfg, "task", "cube"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_line(cfg, "optimizer", "adam"), std::invalid_argument);
  CHECK_THROWS_AS(apply_config_line(cfg, "mode", "magic"), std::invalid_argument);

  TempDir dir("sigadmm_cfg_err");
  const std::string bad = write_config(dir, "task = square\nnonsense line\n");
  CHECK_THROWS_WITH_AS(parse_config_file(bad), doctest::Contains("line 2"),
                       std::runtime_error);
  CHECK_THROWS_AS(parse_config_file((dir.path / "missing.txt").string()),
                  std::runtime_error);
}

TEST_CASE("config hashes identify the experiment, not the plumbing") {
  ExperimentConfig a = tiny_admm_config();
  ExperimentConfig b = tiny_admm_config();
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);

  b.out_dir = "elsewhere";
  b.workers = 7;
  CHECK(config_hash(a) == config_hash(b));  // execution details excluded

  b = tiny_admm_config();
  b.seed = 12;
  CHECK(config_hash(a) != config_hash(b));
  b = tiny_admm_config();
  b.widths = {5};
  CHECK(config_hash(a) != config_hash(b));
  b = tiny_admm_config();
  b.task = TargetKind::product;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("a single-cell single-trial run degenerates cleanly") {
  const ExperimentConfig cfg = tiny_admm_config();
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.best_index == 0);
  const ResultRow& r = res.rows[0];
  CHECK(r.trials_ok == 1);
  CHECK(r.trials_failed == 0);
  CHECK(r.mean == r.median);
  CHECK(r.stddev == 0.0);
  CHECK(std::isfinite(r.mean));
}

TEST_CASE("multi-trial aggregation respects the row invariants") {
  ExperimentConfig cfg = tiny_admm_config();
  cfg.trials = 3;
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 1);
  const ResultRow& r = res.rows[0];
  CHECK(r.trials_ok == 3);
  CHECK(r.stddev >= 0.0);
  CHECK(std::isfinite(r.median));
}

TEST_CASE("failed trials are counted and excluded") {
  ExperimentConfig cfg = tiny_admm_config();
  cfg.optimizer = OptimizerKind::sgd;
  cfg.epochs = 30;
  cfg.lrs = {1e14};  // diverges immediately
  ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].trials_ok == 0);
  CHECK(res.rows[0].trials_failed == 1);
  CHECK(std::isnan(res.rows[0].mean));
  CHECK(res.best_index == -1);

  cfg.lrs = {0.1, 1e14};  // one sane cell alongside the diverging one
  res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 2);
  REQUIRE(res.best_index == 0);
  CHECK(res.rows[0].trials_ok == 1);
  CHECK(res.rows[1].trials_failed == 1);
}

TEST_CASE("emitted outputs round trip and traces cover the grid") {
  TempDir dir("sigadmm_emit");
  ExperimentConfig cfg = tiny_admm_config();
  cfg.betas = {1.0, 2.0};
  cfg.trials = 2;
  cfg.out_dir = dir.str();
  const ExperimentResult res = run_experiment(cfg);
  emit_outputs(cfg, res);

  // results.csv re-parses to the identical table.
  std::ifstream csv(dir.path / "results.csv");
  REQUIRE(csv.good());
  std::string line;
  std::getline(csv, line);
  CHECK(line ==
        "task,optimizer,depth,width,scale,lambda,beta,lr,trials_ok,trials_failed,"
        "mean,std,median");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 13);
    const ResultRow& r = res.rows[rows];
    CHECK(cells[0] == "square");
    CHECK(cells[1] == "admm");
    CHECK(std::stoi(cells[2]) == r.depth);
    CHECK(std::stoi(cells[3]) == r.width);
    CHECK(std::stod(cells[6]) == r.beta);
    CHECK(std::stoi(cells[8]) == r.trials_ok);
    CHECK(std::stod(cells[10]) == r.mean);
    CHECK(std::stod(cells[12]) == r.median);
    ++rows;
  }
  CHECK(rows == 2);

  // summary.json carries the reproducibility hash and the best cell.
  const nlohmann::json j = nlohmann::json::parse(slurp(dir.path / "summary.json"));
  CHECK(j["config_hash"] == config_hash(cfg));
  CHECK(j["task"] == "square");
  CHECK(j["rows"] == 2);
  REQUIRE(j.contains("best"));
  CHECK(j["best"]["mean"].get<double>() == res.rows[res.best_index].mean);

  // One trace per (cell, trial), each with a header plus one row per epoch.
  int traces = 0;
  for (const auto& entry : fs::directory_iterator(dir.path / "traces")) {
    ++traces;
    std::ifstream tr(entry.path());
    std::getline(tr, line);
    CHECK(line.rfind("k,L,Lhat,kkt_residual,grad_norm_sq,dW_1", 0) == 0);
    int data_rows = 0;
    while (std::getline(tr, line)) ++data_rows;
    CHECK(data_rows == cfg.epochs);
  }
  CHECK(traces == 4);
}

TEST_CASE("sgd traces use the schedule schema") {
  TempDir dir("sigadmm_sgd_trace");
  ExperimentConfig cfg = tiny_admm_config();
  cfg.optimizer = OptimizerKind::sgd;
  cfg.lrs = {0.1};
  cfg.out_dir = dir.str();
  const ExperimentResult res = run_experiment(cfg);
  emit_outputs(cfg, res);
  int traces = 0;
  for (const auto& entry : fs::directory_iterator(dir.path / "traces")) {
    ++traces;
    std::ifstream tr(entry.path());
    std::string line;
    std::getline(tr, line);
    CHECK(line == "epoch,train_loss,test_metric,lr,grad_norm_layer1");
  }
  CHECK(traces == 1);
}

TEST_CASE("experiments are bitwise deterministic, workers included") {
  TempDir d1("sigadmm_det1"), d2("sigadmm_det2"), d3("sigadmm_det3");
  ExperimentConfig cfg = tiny_admm_config();
  cfg.betas = {1.0, 2.0};
  cfg.trials = 2;

  cfg.out_dir = d1.str();
  emit_outputs(cfg, run_experiment(cfg));
  cfg.out_dir = d2.str();
  emit_outputs(cfg, run_experiment(cfg));
  cfg.out_dir = d3.str();
  cfg.workers = 3;
  emit_outputs(cfg, run_experiment(cfg));

  const std::string base = slurp(d1.path / "results.csv");
  CHECK(base == slurp(d2.path / "results.csv"));
  CHECK(base == slurp(d3.path / "results.csv"));
}

TEST_CASE("depth two beats depth one on the square task") {
  ExperimentConfig cfg;
  cfg.task = TargetKind::square;
  cfg.optimizer = OptimizerKind::admm;
  cfg.depths = {1, 2};
  cfg.widths = {30};
  cfg.scales = {8.0};
  cfg.init = InitKind::msra;
  cfg.epochs = 300;
  cfg.n_train = 400;
  cfg.n_test = 400;
  cfg.trials = 1;
  cfg.seed = 5;
  const ExperimentResult res = run_experiment(cfg);
  REQUIRE(res.rows.size() == 2);
  REQUIRE(res.rows[0].depth == 1);
  REQUIRE(res.rows[1].depth == 2);
  CHECK(res.rows[1].mean < res.rows[0].mean);
  CHECK(res.best_index == 1);
}

#ifdef SIGADMM_CLI_PATH
TEST_CASE("the command line driver runs end to end") {
  TempDir dir("sigadmm_cli_run");
  const std::string config = write_config(dir,
      "task = square\n"
      "optimizer = admm\n"
      "depths = 1\n"
      "widths = 4\n"
      "epochs = 5\n"
      "n_train = 16\n"
      "n_test = 16\n");
  const std::string out = (dir.path / "out").string();
  const std::string base = std::string(SIGADMM_CLI_PATH);

  const int ok = std::system(
      (base + " run --config " + config + " --out " + out + " --seed 3 > /dev/null 2>&1").c_str());
  CHECK(ok == 0);
  CHECK(fs::exists(fs::path(out) / "results.csv"));
  CHECK(fs::exists(fs::path(out) / "summary.json"));
  const nlohmann::json j = nlohmann::json::parse(slurp(fs::path(out) / "summary.json"));
  CHECK(j["seed"].get<std::uint64_t>() == 3);

  CHECK(std::system((base + " run --task cube --out " + out + " > /dev/null 2>&1").c_str()) != 0);
  CHECK(std::system((base + " > /dev/null 2>&1").c_str()) != 0);
  CHECK(std::system((base + " run --bogus-flag > /dev/null 2>&1").c_str()) != 0);
}
#endif
