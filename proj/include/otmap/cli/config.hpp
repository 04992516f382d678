#pragma once

#include "otmap/error.hpp"
#include "otmap/mappers/trainer.hpp"
#include "otmap/ot/cost.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace otmap::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitNumeric = 4 };

/// Exit status for a library error: bad arguments map to usage, unreadable or
/// inconsistent inputs to data, and solver/optimizer blow-ups to numeric.
int exit_code_for(ErrorCode code) noexcept;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "OTMAP_OUTPUT_DIR";

/// $OTMAP_OUTPUT_DIR/<command> if the variable is set, otherwise otmap-out/<command>.
std::filesystem::path default_output_dir(const std::string& command);

/// Per-purpose seeds derived from one run seed. Every report records them.
struct RunSeeds {
  std::uint64_t data;        // training data / pool
  std::uint64_t init;        // network initialization
  std::uint64_t prior;       // training noise
  std::uint64_t train;       // minibatch order, diversity pairs
  std::uint64_t eval_real;   // fresh real sample for evaluation
  std::uint64_t eval_prior;  // noise for the evaluation sample
  std::uint64_t model;       // k-means seeding, autoencoder, cluster sampling
};
RunSeeds derive_run_seeds(std::uint64_t seed);

/// Synthetic dataset by name ("moons", "circles") or a point CSV path.
struct DataOptions {
  std::string source = "moons";
  Index n = 10000;
  double noise_sd = 0.05;
  double factor = 0.5;
  std::string angles = "uniform";
};

bool is_synthetic(const DataOptions& data);

/// Name used in tables: the synthetic kind, or the CSV file stem.
std::string dataset_name(const DataOptions& data);

/// n points from the data source. Synthetic sources draw a fresh sample from
/// `seed`; CSV sources return a seeded subsample without replacement of
/// min(n, rows) rows (all rows in file order when n >= rows).
PointSet load_points(const DataOptions& data, Index n, std::uint64_t seed);

struct EvalOptions {
  Index n = 10000;
  ot::CostMetric assign_metric = ot::CostMetric::SquaredEuclidean;
  ot::CostMetric report_metric = ot::CostMetric::Euclidean;
};

/// Mapping network layout: `depth` hidden LeakyReLU layers of `width`, then a
/// linear output. depth 0 picks 4 for 2-d data and 6 otherwise.
struct NetOptions {
  Index width = 512;
  int depth = 0;
};
std::vector<nn::LayerSpec> mapper_specs(const NetOptions& net, Index in_dim, Index out_dim);

}  // namespace otmap::cli
