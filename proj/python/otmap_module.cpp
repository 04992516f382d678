#include "otmap/baseline/cluster_model.hpp"
#include "otmap/cli/commands.hpp"
#include "otmap/data/synthetic.hpp"
#include "otmap/mappers/trainer.hpp"
#include "otmap/nn/checkpoint.hpp"
#include "otmap/ot/assignment.hpp"
#include "otmap/ot/divergence.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace otmap;

namespace {

ot::CostMetric metric(const std::string& name) {
  if (auto m = ot::parse_metric(name)) return *m;
  throw Error(ErrorCode::UnsupportedMetric, "unknown metric '" + name + "'");
}

data::AngleSampling angles(const std::string& name) {
  if (name == "uniform") return data::AngleSampling::Uniform;
  if (name == "grid") return data::AngleSampling::Grid;
  throw Error(ErrorCode::InvalidArgument, "angles must be 'uniform' or 'grid'");
}

}  // namespace

PYBIND11_MODULE(_otmap, m) {
  m.doc() = "Exact optimal transport assignment, OT mapping networks and their evaluation.";

  py::register_exception<Error>(m, "OtmapError");

  m.def(
      "solve_assignment",
      [](const Matrix& costs) {
        ot::Assignment a;
        {
          py::gil_scoped_release release;
          a = ot::solve_assignment(costs);
        }
        return py::make_tuple(a.perm, a.total_cost);
      },
      py::arg("costs"), "Exact minimum-cost assignment of a square cost matrix. Returns (perm, total_cost).");

  m.def(
      "ot_divergence",
      [](const Matrix& a, const Matrix& b, const std::string& assign, const std::string& report) {
        const PointSet pa(a), pb(b);
        py::gil_scoped_release release;
        return ot::ot_divergence(pa, pb, metric(assign), metric(report));
      },
      py::arg("a"), py::arg("b"), py::arg("assign_metric") = "sqeuclidean", py::arg("report_metric") = "euclidean",
      "Average matched-pair distance under the optimal bijection between two equal-size point sets.");

  m.def(
      "make_moons",
      [](Index n, double noise, std::uint64_t seed, const std::string& angle_mode) {
        return data::make_moons({data::SyntheticKind::Moons, n, noise, 0.5, seed, angles(angle_mode)}).data();
      },
      py::arg("n") = 10000, py::arg("noise") = 0.05, py::arg("seed") = 0, py::arg("angles") = "uniform");

  m.def(
      "make_circles",
      [](Index n, double noise, double factor, std::uint64_t seed, const std::string& angle_mode) {
        return data::make_circles({data::SyntheticKind::Circles, n, noise, factor, seed, angles(angle_mode)}).data();
      },
      py::arg("n") = 10000, py::arg("noise") = 0.05, py::arg("factor") = 0.5, py::arg("seed") = 0,
      py::arg("angles") = "uniform");

  m.def(
      "fit_cluster_model",
      [](const Matrix& points, Index k, int max_iters, std::uint64_t seed) {
        return baseline::to_json(baseline::kmeans_fit(PointSet(points), k, max_iters, seed).model).dump();
      },
      py::arg("points"), py::arg("k"), py::arg("max_iters") = 100, py::arg("seed") = 0,
      "K-means Gaussian cluster model, returned as JSON text.");

  m.def(
      "sample_cluster_model",
      [](const std::string& model_json, Index n, std::uint64_t seed) {
        return baseline::sample_cluster_model(baseline::cluster_model_from_json(nlohmann::json::parse(model_json)), n,
                                              seed)
            .data();
      },
      py::arg("model_json"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "generate",
      [](const std::filesystem::path& checkpoint, Index n, std::uint64_t seed) {
        const auto ck = nn::load_checkpoint(checkpoint);
        if (!ck.meta.contains("prior")) {
          throw Error(ErrorCode::ModelError, checkpoint.string() + " is not a mapper checkpoint");
        }
        const auto& p = ck.meta["prior"];
        const mappers::PriorSpec prior{p["low"].get<double>(), p["high"].get<double>(), p["dim"].get<Index>(), seed};
        return mappers::generate(ck.net, prior, n).data();
      },
      py::arg("checkpoint"), py::arg("n"), py::arg("seed") = 0,
      "Map n fresh prior samples through a trained mapper checkpoint.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        py::gil_scoped_release release;
        return cli::run_app(args);
      },
      py::arg("args"), "Run one otmap subcommand in-process; returns its exit code.");

  m.attr("MAX_ASSIGNMENT_SIZE") = ot::kMaxAssignmentSize;
}
