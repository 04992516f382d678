// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include "otmap/cli/commands.hpp"
#include "otmap/cli/report.hpp"
#include "otmap/io/pgm.hpp"
#include "otmap/mappers/diversity.hpp"
#include "otmap/mappers/trainer.hpp"
#include "otmap/ot/assignment.hpp"
#include "otmap/ot/divergence.hpp"
#include "support/net_params.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace otmap;
using otmap::cli::read_json_file;
namespace fs = std::filesystem;

namespace {

const fs::path kRunDir = OTMAP_ACCEPTANCE_DIR;
const fs::path kMnistDir = OTMAP_MNIST_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

nlohmann::json run_cli(std::vector<std::string> args, const fs::path& out) {
  args.push_back("--out");
  args.push_back(out.string());
  std::ostringstream sink;
  auto* saved = std::cout.rdbuf(sink.rdbuf());
  int code = 0;
  try {
    code = cli::run_app(args);
  } catch (...) {
    std::cout.rdbuf(saved);
    throw;
  }
  std::cout.rdbuf(saved);
  if (code != cli::kExitOk) throw std::runtime_error("otmap " + args.front() + " exited with " + std::to_string(code));
  return read_json_file(out / "report.json");
}

// Reports from training runs, reused by later criteria.
std::map<std::string, nlohmann::json> g_train_reports;

nlohmann::json train_report(const std::string& algo, const std::string& data, int seed) {
  const std::string key = algo + "_" + data + "_" + std::to_string(seed);
  if (auto it = g_train_reports.find(key); it != g_train_reports.end()) return it->second;
  std::vector<std::string> args{"train", "--algo", algo, "--data", data, "--seed", std::to_string(seed),
                                "--steps", "10000", "--lr", "0.0003", "--batch", "128"};
  if (algo == "otgen") {
    args.push_back("--lambda");
    args.push_back("0");
  }
  return g_train_reports[key] = run_cli(args, kRunDir / "train" / key);
}

const std::vector<std::string> kDatasets = {"moons", "circles"};

Outcome criterion1() {
  const std::map<std::string, double> target = {{"moons", 0.070}, {"circles", 0.071}};
  bool pass = true;
  std::string detail;
  for (const auto& data : kDatasets) {
    const auto report = run_cli({"eval", "--data", data, "--data-baseline", "--seed", "1"}, kRunDir / "data" / data);
    const double div = report["results"]["rows"][0]["divergence"].get<double>();
    const double secs = report["timing"]["wall_seconds"].get<double>();
    pass = pass && std::abs(div - target.at(data)) <= 0.01 && secs <= 120.0;
    detail += fmt("%s %.4f (target %.3f +- 0.01, n=10000, %.0fs) ", data.c_str(), div, target.at(data), secs);
  }
  for (const auto& data : kDatasets) {
    const auto small = run_cli({"eval", "--data", data, "--data-baseline", "--seed", "1", "--eval-n", "1000"},
                               kRunDir / "data" / (data + "_n1000"));
    detail += fmt("[info n=1000: %s %.4f] ", data.c_str(), small["results"]["rows"][0]["divergence"].get<double>());
  }
  return {pass, detail};
}

Outcome trained_median(const std::string& algo, const std::map<std::string, double>& target, double budget) {
  bool pass = true;
  std::string detail;
  for (const auto& data : kDatasets) {
    std::vector<double> divs;
    double slowest = 0.0;
    for (int seed : {1, 2, 3}) {
      const auto r = train_report(algo, data, seed);
      divs.push_back(r["results"]["divergence"].get<double>());
      slowest = std::max(slowest, r["timing"]["wall_seconds"].get<double>());
    }
    const double med = median3(divs);
    pass = pass && std::abs(med - target.at(data)) <= 0.02 && slowest <= budget;
    detail += fmt("%s median %.4f [%.4f %.4f %.4f] (target %.3f +- 0.02, slowest %.0fs) ", data.c_str(), med, divs[0],
                  divs[1], divs[2], target.at(data), slowest);
  }
  return {pass, detail};
}

Outcome criterion2() { return trained_median("ottrans", {{"moons", 0.086}, {"circles", 0.075}}, 15 * 60.0); }
Outcome criterion3() { return trained_median("otgen", {{"moons", 0.090}, {"circles", 0.092}}, 30 * 60.0); }

Outcome criterion4() {
  const std::map<std::string, std::pair<double, double>> target = {{"moons", {0.117, 0.084}},
                                                                  {"circles", {0.123, 0.090}}};
  bool pass = true;
  std::string detail;
  for (const auto& data : kDatasets) {
    const auto r = run_cli({"baseline", "--data", data, "--k", "8", "16", "--seed", "1"}, kRunDir / "baseline" / data);
    const double k8 = r["results"]["cluster_k8"]["divergence"].get<double>();
    const double k16 = r["results"]["cluster_k16"]["divergence"].get<double>();
    std::vector<double> ot;
    for (int seed : {1, 2, 3}) ot.push_back(train_report("ottrans", data, seed)["results"]["divergence"].get<double>());
    const double ottrans = median3(ot);
    const auto [p8, p16] = target.at(data);
    pass = pass && k8 > k16 && std::abs(k8 - p8) <= 0.02 && std::abs(k16 - p16) <= 0.02 && ottrans < k8;
    detail += fmt("%s k8 %.4f (target %.3f) k16 %.4f (target %.3f) ottrans %.4f ", data.c_str(), k8, p8, k16, p16,
                  ottrans);
  }
  return {pass, detail};
}

Outcome criterion5() {
  std::mt19937_64 rng(5);
  int cases = 0, exact = 0;
  const auto start = std::chrono::steady_clock::now();
  for (Index k = 2; k <= 7; ++k) {
    for (int rep = 0; rep < 40; ++rep) {
      Matrix c = testing::random_matrix(k, k, rng, 0.0, 10.0);
      if (rep % 2 == 1) c = c.array().floor().matrix();  // integer costs produce ties
      const auto sol = ot::solve_assignment(c);
      exact += ot::is_permutation(sol.perm) && sol.total_cost == testing::brute_force_assignment(c);
      ++cases;
    }
  }
  const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
  return {exact == cases && cases >= 200, fmt("%d/%d exact matches, %.2fs", exact, cases, secs.count())};
}

Outcome criterion6() {
  std::mt19937_64 rng(6);
  double worst_net = 0.0, worst_obj = 0.0;
  const int cases = 60;
  for (int rep = 0; rep < cases; ++rep) {
    const Index in = 1 + static_cast<Index>(rng() % 4);
    const Index out = 1 + static_cast<Index>(rng() % 3);
    const Index k = 1 + static_cast<Index>(rng() % 4);
    auto net = nn::init_mlp<double>(nn::mlp_specs(in, 2 + static_cast<Index>(rng() % 5), 1 + static_cast<int>(rng() % 3), out),
                                    rng());
    std::normal_distribution<double> bias(0.0, 0.3);
    for (auto& layer : net.layers()) {
      for (Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = bias(rng);
    }
    const Matrix x = testing::random_matrix(k, in, rng, -1.0, 1.0);
    const nn::MatrixT<double> g = testing::random_matrix(k, out, rng, -1.0, 1.0);
    const auto grads = net.backward(x, g);
    auto f = [&](const Eigen::VectorXd& theta) {
      auto probe = net;
      testing::unflatten(probe, theta);
      return (probe.forward(x).array() * g.array()).sum();
    };
    worst_net = std::max(worst_net, testing::max_relative_error(testing::flatten(grads),
                                                                testing::central_difference(f, testing::flatten(net))));
  }
  for (int rep = 0; rep < cases; ++rep) {
    const Index k = 2 + static_cast<Index>(rng() % 6);
    const Index d = 1 + static_cast<Index>(rng() % 3);
    const PointSet a(testing::random_matrix(k, d, rng, -1.0, 1.0));
    const PointSet b(testing::random_matrix(k, d, rng, -1.0, 1.0));
    const auto sigma = ot::solve_assignment(a, b, ot::CostMetric::SquaredEuclidean);
    const Matrix grad = ot::assignment_cost_gradient(a, b, sigma, ot::CostMetric::SquaredEuclidean);
    auto f = [&](const Eigen::VectorXd& v) {
      return ot::matched_mean_distance(PointSet(Matrix(Eigen::Map<const Matrix>(v.data(), k, d))), b, sigma,
                                       ot::CostMetric::SquaredEuclidean);
    };
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(a.data().data(), a.data().size());
    const Eigen::VectorXd an = Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size());
    worst_obj = std::max(worst_obj, testing::max_relative_error(an, testing::central_difference(f, x)));
  }
  return {worst_net < 1e-4 && worst_obj < 1e-4,
          fmt("backprop max rel err %.2e over %d cases, frozen-assignment gradient %.2e over %d cases", worst_net,
              cases, worst_obj, cases)};
}

Outcome criterion7() {
  const Matrix q = (Matrix(1, 2) << 0.3, -0.7).finished();
  auto first_below = [](const std::vector<double>& losses) {
    for (std::size_t s = 0; s < losses.size(); ++s) {
      if (losses[s] < 1e-4) return static_cast<int>(s) + 1;
    }
    return -1;
  };
  mappers::TrainConfig cfg;
  cfg.steps = 2000;
  cfg.seed = 7;
  cfg.prior.seed = 8;
  const auto specs = cli::mapper_specs({}, 2, 2);
  const PointSet pool(q.replicate(cfg.transport_pool_m, 1));
  const auto trans = mappers::train_ottrans<float>(pool, cfg, nn::init_mlp<float>(specs, 9));
  const auto gen = mappers::train_otgen<float>([&](Index k) { return PointSet(q.replicate(k, 1)); }, cfg,
                                               nn::init_mlp<float>(specs, 9));
  const int t = first_below(trans.losses), g = first_below(gen.losses);
  return {t > 0 && g > 0,
          fmt("first step with loss < 1e-4: ottrans %d, otgen %d (of 2000); final loss %.2e / %.2e", t, g,
              trans.losses.back(), gen.losses.back())};
}

Outcome criterion8() {
  std::mt19937_64 rng(8);
  double worst_value = 0.0, worst_grad = 0.0;
  const int cases = 60;
  for (int rep = 0; rep < cases; ++rep) {
    const Index k = 2 + static_cast<Index>(rng() % 10);
    const Index d = 1 + static_cast<Index>(rng() % 4);
    const Matrix z = testing::random_matrix(k, d, rng, -1.0, 1.0);
    const Eigen::RowVectorXd shift = testing::random_matrix(1, d, rng, -5.0, 5.0).row(0);
    worst_value = std::max(worst_value, std::abs(mappers::diversity_penalty(PointSet(z), PointSet(z)).value));
    const Matrix moved = z.rowwise() + shift;
    worst_value = std::max(worst_value, std::abs(mappers::diversity_penalty(PointSet(moved), PointSet(z)).value));

    // Finite differences are only meaningful away from the kinks of |.|:
    // coincident points and a zero penalty.
    Matrix pm;
    do {
      pm = testing::random_matrix(k, d, rng, -1.0, 1.0);
    } while (testing::min_row_distance(pm) < 1e-2 ||
             std::abs(mappers::diversity_penalty(PointSet(pm), PointSet(z)).value) < 1e-3);
    const PointSet p(pm);
    const auto pen = mappers::diversity_penalty(p, PointSet(z));
    auto f = [&](const Eigen::VectorXd& v) {
      return mappers::diversity_penalty(PointSet(Matrix(Eigen::Map<const Matrix>(v.data(), k, d))), PointSet(z)).value;
    };
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(p.data().data(), p.data().size());
    const Eigen::VectorXd an = Eigen::Map<const Eigen::VectorXd>(pen.gradient.data(), pen.gradient.size());
    worst_grad = std::max(worst_grad, testing::max_relative_error(an, testing::central_difference(f, x)));
  }
  return {worst_value <= 1e-12 && worst_grad < 1e-4,
          fmt("max |D| on identical/translated sets %.1e, gradient max rel err %.2e over %d cases", worst_value,
              worst_grad, cases)};
}

nlohmann::json g_pipeline;

Outcome criterion9() {
  g_pipeline = run_cli({"pipeline", "--images", (kMnistDir / "mnist5k-images-idx3-ubyte.gz").string(), "--labels",
                        (kMnistDir / "mnist5k-labels-idx1-ubyte.gz").string(), "--seed", "1"},
                       kRunDir / "pipeline");
  const auto& r = g_pipeline["results"];
  const double ratio = r["divergence_ratio"].get<double>();
  const double secs = g_pipeline["timing"]["wall_seconds"].get<double>();
  const auto grid = io::read_pgm(kRunDir / "pipeline" / "samples.pgm");
  const bool grid_ok = grid.width == 280 && grid.height == 280;
  const bool in_range = r["samples_in_range"].get<bool>();
  return {ratio <= 1.5 && in_range && grid_ok && secs <= 3600.0,
          fmt("latent divergence generated %.4f vs data %.4f, ratio %.3f (<= 1.5); samples in range %s; grid %dx%d; "
              "%.0fs",
              r["latent_divergence_generated"].get<double>(), r["latent_divergence_data"].get<double>(), ratio,
              in_range ? "yes" : "no", grid.width, grid.height, secs)};
}

// Re-runs a report from its embedded config and compares results and artifacts.
bool rerun_matches(const fs::path& dir, std::string& detail) {
  const auto original = read_json_file(dir / "report.json");
  const auto config = dir.parent_path() / (dir.filename().string() + ".rerun.toml");
  cli::write_file_atomic(config, original["config"].get<std::string>());
  const auto replay_dir = dir.parent_path() / (dir.filename().string() + ".rerun");
  const auto replay = run_cli({original["command"].get<std::string>(), "--config", config.string()}, replay_dir);
  bool same = replay["results"] == original["results"] && replay["seeds"] == original["seeds"];
  for (const auto& [name, path] : original["artifacts"].items()) {
    const fs::path a = path.get<std::string>();
    if (a.extension() == ".ckpt" || a.extension() == ".csv" || a.extension() == ".json" || a.extension() == ".pgm") {
      same = same && slurp(a) == slurp(replay_dir / a.filename());
    }
  }
  detail += dir.filename().string() + (same ? " ok " : " MISMATCH ");
  return same;
}

Outcome criterion10() {
  std::vector<fs::path> dirs;
  const fs::path base = kRunDir / "determinism";
  run_cli({"train", "--algo", "ottrans", "--data", "moons", "--steps", "300", "--pool-m", "1024", "--eval-n", "2000",
           "--seed", "21"},
          base / "ottrans");
  run_cli({"train", "--algo", "otgen", "--data", "circles", "--steps", "300", "--lambda", "0.5", "--eval-n", "2000",
           "--trace-every", "100", "--seed", "22"},
          base / "otgen");
  run_cli({"baseline", "--data", "moons", "--n", "3000", "--eval-n", "2000", "--seed", "23"}, base / "baseline");
  run_cli({"eval", "--data", "moons", "--eval-n", "2000", "--data-baseline", "--checkpoint",
           (base / "ottrans" / "checkpoint.ckpt").string(), "--cluster-model",
           (base / "baseline" / "cluster_k8.json").string(), "--seed", "24"},
          base / "eval");
  run_cli({"pipeline", "--images", (kMnistDir / "mnist5k-images-idx3-ubyte.gz").string(), "--train-n", "1000",
           "--heldout-n", "500", "--ae-steps", "300", "--steps", "300", "--seed", "25"},
          base / "pipeline");
  run_cli({"interpolate", "--mapper", (base / "pipeline" / "mapper.ckpt").string(), "--decoder",
           (base / "pipeline" / "decoder.ckpt").string(), "--seed", "26"},
          base / "interpolate");
  std::string detail;
  bool pass = true;
  for (const char* name : {"ottrans", "otgen", "baseline", "eval", "pipeline", "interpolate"}) {
    pass = rerun_matches(base / name, detail) && pass;
  }
  if (fs::exists(kRunDir / "data" / "moons" / "report.json")) pass = rerun_matches(kRunDir / "data" / "moons", detail) && pass;
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                          criterion6, criterion7, criterion8, criterion9, criterion10};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  fs::create_directories(kRunDir);
  int failures = 0;
  for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) {
    if (!selected.empty() && !selected.count(c)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = criteria[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
    failures += !o.pass;
    std::printf("criterion %d: %s  %s(%.0fs)\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs.count());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
