#include "otmap/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace otmap::cli {
namespace {

void drop_empty(std::vector<fs::path>& paths) {
  std::erase_if(paths, [](const fs::path& p) { return p.empty(); });
}

void drop_empty(std::optional<fs::path>& path) {
  if (path && path->empty()) path.reset();
}

ot::CostMetric metric_from(const std::string& name, const char* flag) {
  if (const auto m = ot::parse_metric(name)) return *m;
  throw Error(ErrorCode::InvalidArgument, std::string(flag) + ": unknown metric '" + name + "'");
}

const std::vector<std::string> kMetricNames = {"sqeuclidean", "euclidean", "l1"};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--seed", opts.seed, "Run seed")->capture_default_str();
  opts.out = default_output_dir(sub->get_name());
  sub->add_option("--out", opts.out, "Output directory")->capture_default_str();
}

void add_data(CLI::App* sub, DataOptions& data, bool required) {
  auto* opt = sub->add_option("--data", data.source, "moons, circles, or a point CSV path");
  if (required) opt->required();
  sub->add_option("--n", data.n, "Sample size drawn from the data source")->capture_default_str();
  sub->add_option("--noise", data.noise_sd, "Gaussian noise standard deviation")->capture_default_str();
  sub->add_option("--factor", data.factor, "Circles inner/outer radius ratio")->capture_default_str();
  sub->add_option("--angles", data.angles, "Arc parameter sampling")
      ->check(CLI::IsMember({"uniform", "grid"}))
      ->capture_default_str();
}

struct MetricFlags {
  std::string assign = "sqeuclidean";
  std::string report = "euclidean";
};

void add_eval(CLI::App* sub, EvalOptions& eval, MetricFlags& metrics) {
  sub->add_option("--eval-n", eval.n, "Evaluation sample size (generated and real)")->capture_default_str();
  sub->add_option("--assign-metric", metrics.assign, "Cost used to solve the evaluation assignment")
      ->check(CLI::IsMember(kMetricNames))
      ->capture_default_str();
  sub->add_option("--report-metric", metrics.report, "Distance averaged over matched pairs")
      ->check(CLI::IsMember(kMetricNames))
      ->capture_default_str();
}

void resolve_metrics(EvalOptions& eval, const MetricFlags& metrics) {
  eval.assign_metric = metric_from(metrics.assign, "--assign-metric");
  eval.report_metric = metric_from(metrics.report, "--report-metric");
}

void add_mapper_training(CLI::App* sub, mappers::TrainConfig& cfg, NetOptions& net, const std::string& prefix = "") {
  sub->add_option("--" + prefix + "steps", cfg.steps, "Training steps")->capture_default_str();
  sub->add_option("--" + prefix + "lr", cfg.lr, "Adam learning rate")->capture_default_str();
  sub->add_option("--" + prefix + "batch", cfg.batch_k, "Minibatch size k")->capture_default_str();
  sub->add_option("--lambda", cfg.lambda_div, "Diversity penalty weight (OTgen)")->capture_default_str();
  sub->add_option("--pool-m", cfg.transport_pool_m, "OTtrans transport pool size")->capture_default_str();
  sub->add_option("--prior-low", cfg.prior.low, "Uniform prior lower bound")->capture_default_str();
  sub->add_option("--prior-high", cfg.prior.high, "Uniform prior upper bound")->capture_default_str();
  cfg.prior.dim = 0;
  sub->add_option("--prior-dim", cfg.prior.dim, "Prior dimension; 0 uses the target dimension")
      ->capture_default_str();
  sub->add_option("--width", net.width, "Hidden layer width")->capture_default_str();
  sub->add_option("--depth", net.depth, "Hidden layers; 0 picks 4 for 2-d targets, 6 otherwise")
      ->capture_default_str();
}

void add_images(CLI::App* sub, ImageOptions& input) {
  sub->add_option("--images", input.images, "IDX image file (optionally gzipped)")->required();
  sub->add_option("--labels", input.labels, "IDX label file");
}

void add_ae(CLI::App* sub, autoenc::AutoencoderSpec& spec, mappers::TrainConfig& cfg, const std::string& prefix) {
  cfg.lr = 1e-3;
  sub->add_option("--hidden", spec.hidden, "Encoder hidden widths (decoder mirrors them)")->capture_default_str();
  sub->add_option("--latent", spec.latent_dim, "Latent dimension")->capture_default_str();
  sub->add_option("--" + prefix + "steps", cfg.steps, "Autoencoder training steps")->capture_default_str();
  sub->add_option("--" + prefix + "batch", cfg.batch_k, "Autoencoder minibatch size")->capture_default_str();
  sub->add_option("--" + prefix + "lr", cfg.lr, "Autoencoder learning rate")->capture_default_str();
}

}  // namespace

int run_app(const std::vector<std::string>& args) {
  CLI::App app{"Optimal transport mapping networks: training, evaluation and plotting"};
  app.name("otmap");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file with one [command] section; command-line flags take precedence");
  app.fallthrough();

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic or subsampled point set as CSV");
  add_common(gen_cmd, gen);
  add_data(gen_cmd, gen.data, true);

  TrainOptions train;
  MetricFlags train_metrics;
  auto* train_cmd = app.add_subcommand("train", "Train an OTtrans or OTgen mapping network");
  add_common(train_cmd, train);
  train_cmd->add_option("--algo", train.algo, "Training algorithm")
      ->required()
      ->check(CLI::IsMember({"ottrans", "otgen"}));
  add_data(train_cmd, train.data, true);
  add_mapper_training(train_cmd, train.train, train.net);
  add_eval(train_cmd, train.eval, train_metrics);
  train_cmd->add_option("--eval-every", train.eval_every, "Steps between divergence estimates; 0 disables")
      ->capture_default_str();
  train_cmd->add_option("--estimate-n", train.estimate_n, "Sample size for divergence estimates")
      ->capture_default_str();
  train_cmd->add_option("--trace-every", train.train.trace_every, "OTgen steps between feedback traces; 0 disables")
      ->capture_default_str();

  EvalCommandOptions eval;
  MetricFlags eval_metrics;
  auto* eval_cmd = app.add_subcommand("eval", "Divergence table for checkpoints, cluster models and the data");
  add_common(eval_cmd, eval);
  add_data(eval_cmd, eval.data, true);
  eval_cmd->add_option("--checkpoint", eval.checkpoints, "Mapper checkpoint (repeatable)");
  eval_cmd->add_option("--cluster-model", eval.cluster_models, "Cluster model JSON (repeatable)");
  eval_cmd->add_flag("--data-baseline", eval.data_baseline, "Add a row comparing two independent data samples");
  add_eval(eval_cmd, eval.eval, eval_metrics);

  BaselineOptions base;
  MetricFlags base_metrics;
  auto* base_cmd = app.add_subcommand("baseline", "Fit k-means Gaussian cluster models and evaluate them");
  add_common(base_cmd, base);
  add_data(base_cmd, base.data, true);
  base_cmd->add_option("--k", base.ks, "Cluster counts")->capture_default_str();
  base_cmd->add_option("--max-iters", base.max_iters, "Lloyd iteration cap")->capture_default_str();
  add_eval(base_cmd, base.eval, base_metrics);

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render scatter or feedback plots as SVG");
  plot_cmd->add_option("--real", plot.real, "Real points CSV (green)");
  plot_cmd->add_option("--generated", plot.generated, "Generated points CSV (blue)");
  plot_cmd->add_option("--noise", plot.noise, "Noise points CSV (blue)");
  plot_cmd->add_option("--predictions", plot.predictions, "Prediction points CSV (purple)");
  plot_cmd->add_option("--trace", plot.trace, "Feedback trace JSON; draws red match segments");
  plot_cmd->add_option("--trace-index", plot.trace_index, "Trace to draw; -1 for the last")->capture_default_str();
  plot_cmd->add_flag("--l1", plot.l1, "Re-solve the drawn trace under L1 cost");
  plot_cmd->add_option("--svg", plot.out, "Output SVG path")->required();

  TrainAeOptions ae;
  auto* ae_cmd = app.add_subcommand("train-ae", "Train a fully connected autoencoder on IDX images");
  add_common(ae_cmd, ae);
  add_images(ae_cmd, ae.input);
  ae_cmd->add_option("--train-n", ae.train_n, "Images used for training; 0 uses all")->capture_default_str();
  add_ae(ae_cmd, ae.spec, ae.train, "");

  PipelineOptions pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Autoencoder, latent mapper, sampling and decoding in one run");
  add_common(pipe_cmd, pipe);
  add_images(pipe_cmd, pipe.input);
  pipe_cmd->add_option("--train-n", pipe.train_n, "Training images")->capture_default_str();
  pipe_cmd->add_option("--heldout-n", pipe.heldout_n, "Held-out images")->capture_default_str();
  add_ae(pipe_cmd, pipe.ae_spec, pipe.ae_train, "ae-");
  pipe_cmd->add_option("--algo", pipe.algo, "Latent mapper algorithm")
      ->check(CLI::IsMember({"ottrans", "otgen"}))
      ->capture_default_str();
  add_mapper_training(pipe_cmd, pipe.mapper_train, pipe.net);
  pipe_cmd->add_option("--grid-rows", pipe.grid_rows, "Sample grid rows")->capture_default_str();
  pipe_cmd->add_option("--grid-cols", pipe.grid_cols, "Sample grid columns")->capture_default_str();

  InterpolateOptions interp;
  auto* interp_cmd = app.add_subcommand("interpolate", "Decode a straight line between two prior samples");
  add_common(interp_cmd, interp);
  interp_cmd->add_option("--mapper", interp.mapper, "Mapper checkpoint")->required();
  interp_cmd->add_option("--decoder", interp.decoder, "Decoder checkpoint")->required();
  interp_cmd->add_option("--n0-seed", interp.n0_seed, "Seed of the first endpoint")->capture_default_str();
  interp_cmd->add_option("--n1-seed", interp.n1_seed, "Seed of the second endpoint")->capture_default_str();
  interp_cmd->add_option("--steps", interp.steps, "Frames including both endpoints")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }
  drop_empty(eval.checkpoints);
  drop_empty(eval.cluster_models);
  for (auto* p : {&plot.real, &plot.generated, &plot.predictions, &plot.noise, &plot.trace}) drop_empty(*p);
  drop_empty(ae.input.labels);
  drop_empty(pipe.input.labels);

  try {
    nlohmann::json report;
    auto config_of = [](CLI::App* sub) { return "[" + sub->get_name() + "]\n" + sub->config_to_str(true, false); };
    if (*gen_cmd) {
      gen.config_text = config_of(gen_cmd);
      report = cmd_gen_data(gen);
    } else if (*train_cmd) {
      resolve_metrics(train.eval, train_metrics);
      train.config_text = config_of(train_cmd);
      report = cmd_train(train);
    } else if (*eval_cmd) {
      resolve_metrics(eval.eval, eval_metrics);
      eval.config_text = config_of(eval_cmd);
      report = cmd_eval(eval);
    } else if (*base_cmd) {
      resolve_metrics(base.eval, base_metrics);
      base.config_text = config_of(base_cmd);
      report = cmd_baseline(base);
    } else if (*plot_cmd) {
      report = cmd_plot(plot);
    } else if (*ae_cmd) {
      ae.config_text = config_of(ae_cmd);
      report = cmd_train_ae(ae);
    } else if (*pipe_cmd) {
      pipe.config_text = config_of(pipe_cmd);
      report = cmd_pipeline(pipe);
    } else if (*interp_cmd) {
      interp.config_text = config_of(interp_cmd);
      report = cmd_interpolate(interp);
    }
    std::cout << (report.contains("results") ? report["results"] : report).dump(2) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "otmap: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "otmap: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace otmap::cli
