#include "otmap/cli/config.hpp"

#include "otmap/data/csv.hpp"
#include "otmap/data/synthetic.hpp"
#include "otmap/rng.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <random>

namespace otmap::cli {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::SpecError:
    case ErrorCode::UnsupportedMetric:
      return kExitUsage;
    case ErrorCode::NonFiniteGradient:
    case ErrorCode::InvalidCost:
      return kExitNumeric;
    default:
      return kExitData;
  }
}

std::filesystem::path default_output_dir(const std::string& command) {
  const char* env = std::getenv(kOutputDirEnv);
  const std::filesystem::path base = env && *env ? env : "otmap-out";
  return base / command;
}

RunSeeds derive_run_seeds(std::uint64_t seed) {
  return {derive_seed(seed, 100), derive_seed(seed, 101), derive_seed(seed, 102), derive_seed(seed, 103),
          derive_seed(seed, 104), derive_seed(seed, 105), derive_seed(seed, 106)};
}

bool is_synthetic(const DataOptions& data) { return data::parse_kind(data.source).has_value(); }

std::string dataset_name(const DataOptions& data) {
  return is_synthetic(data) ? data.source : std::filesystem::path(data.source).stem().string();
}

PointSet load_points(const DataOptions& data, Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidCount, "sample size must be >= 1");
  if (const auto kind = data::parse_kind(data.source)) {
    data::AngleSampling angles;
    if (data.angles == "uniform") {
      angles = data::AngleSampling::Uniform;
    } else if (data.angles == "grid") {
      angles = data::AngleSampling::Grid;
    } else {
      throw Error(ErrorCode::InvalidArgument, "angles must be 'uniform' or 'grid', got '" + data.angles + "'");
    }
    return data::make_synthetic({*kind, n, data.noise_sd, data.factor, seed, angles});
  }
  auto csv = data::read_points_csv(data.source);
  if (n >= csv.points.size()) return std::move(csv.points);
  std::vector<Index> order(static_cast<std::size_t>(csv.points.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < n; ++i) {
    std::uniform_int_distribution<Index> pick(i, csv.points.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(static_cast<std::size_t>(n));
  return csv.points.select(order);
}

std::vector<nn::LayerSpec> mapper_specs(const NetOptions& net, Index in_dim, Index out_dim) {
  const int depth = net.depth > 0 ? net.depth : (out_dim == 2 ? 4 : 6);
  return nn::mlp_specs(in_dim, net.width, depth, out_dim);
}

}  // namespace otmap::cli
