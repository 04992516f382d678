#pragma once

#include "otmap/autoenc/autoencoder.hpp"
#include "otmap/cli/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace otmap::cli {

namespace fs = std::filesystem;

/// Fields shared by every command. `config_text` is the resolved config echoed into the report.
struct CommonOptions {
  std::uint64_t seed = 0;
  fs::path out;
  std::string config_text;
};

struct GenDataOptions : CommonOptions {
  DataOptions data;
};

struct TrainOptions : CommonOptions {
  std::string algo;  // "ottrans" or "otgen"
  DataOptions data;
  mappers::TrainConfig train;
  NetOptions net;
  EvalOptions eval;
  int eval_every = 0;      // divergence_estimate cadence in the loss CSV; 0 disables
  Index estimate_n = 512;  // sample size for divergence_estimate
};

struct EvalCommandOptions : CommonOptions {
  DataOptions data;
  std::vector<fs::path> checkpoints;
  std::vector<fs::path> cluster_models;
  bool data_baseline = false;
  EvalOptions eval;
};

struct BaselineOptions : CommonOptions {
  DataOptions data;
  std::vector<Index> ks = {8, 16};
  int max_iters = 100;
  EvalOptions eval;
};

struct PlotOptions {
  std::optional<fs::path> real, generated, predictions, noise;
  std::optional<fs::path> trace;
  int trace_index = -1;  // -1: last trace in the file
  bool l1 = false;       // re-solve the trace assignment under L1 before drawing
  fs::path out;          // SVG path
};

struct ImageOptions {
  fs::path images;
  std::optional<fs::path> labels;
};

struct TrainAeOptions : CommonOptions {
  ImageOptions input;
  Index train_n = 0;  // 0: all images
  autoenc::AutoencoderSpec spec;
  mappers::TrainConfig train;  // steps, batch_k, lr used
};

struct PipelineOptions : CommonOptions {
  ImageOptions input;
  Index train_n = 4000;
  Index heldout_n = 1000;
  autoenc::AutoencoderSpec ae_spec;
  mappers::TrainConfig ae_train;
  std::string algo = "otgen";
  mappers::TrainConfig mapper_train;
  NetOptions net;
  Index grid_rows = 10;
  Index grid_cols = 10;
};

struct InterpolateOptions : CommonOptions {
  fs::path mapper;
  fs::path decoder;
  std::uint64_t n0_seed = 1;
  std::uint64_t n1_seed = 2;
  int steps = 10;
};

/// Each command writes its artifacts under `out` and returns the report JSON
/// it wrote to out/report.json (plot returns a summary and writes only the SVG).
nlohmann::json cmd_gen_data(const GenDataOptions& opts);
nlohmann::json cmd_train(const TrainOptions& opts);
nlohmann::json cmd_eval(const EvalCommandOptions& opts);
nlohmann::json cmd_baseline(const BaselineOptions& opts);
nlohmann::json cmd_plot(const PlotOptions& opts);
nlohmann::json cmd_train_ae(const TrainAeOptions& opts);
nlohmann::json cmd_pipeline(const PipelineOptions& opts);
nlohmann::json cmd_interpolate(const InterpolateOptions& opts);

/// Parses argv with CLI11 and runs one subcommand. Returns the process exit code.
int run_app(const std::vector<std::string>& args);

}  // namespace otmap::cli
