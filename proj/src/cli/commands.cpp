#include "otmap/cli/commands.hpp"

#include "otmap/baseline/cluster_model.hpp"
#include "otmap/cli/report.hpp"
#include "otmap/data/csv.hpp"
#include "otmap/data/idx.hpp"
#include "otmap/data/synthetic.hpp"
#include "otmap/io/pgm.hpp"
#include "otmap/io/svg.hpp"
#include "otmap/nn/checkpoint.hpp"
#include "otmap/ot/divergence.hpp"
#include "otmap/rng.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace otmap::cli {
namespace {

nlohmann::json seeds_json(const RunSeeds& s) {
  return {{"data", s.data},           {"init", s.init},           {"prior", s.prior}, {"train", s.train},
          {"eval_real", s.eval_real}, {"eval_prior", s.eval_prior}, {"model", s.model}};
}

fs::path prepare_out(const CommonOptions& opts) {
  fs::create_directories(opts.out);
  return opts.out;
}

nlohmann::json prior_json(const mappers::PriorSpec& p) { return {{"low", p.low}, {"high", p.high}, {"dim", p.dim}}; }

mappers::PriorSpec prior_from_meta(const nlohmann::json& meta, const fs::path& path) {
  if (!meta.contains("prior")) throw Error(ErrorCode::ModelError, path.string() + " is not a mapper checkpoint");
  const auto& p = meta.at("prior");
  return {p.at("low").get<double>(), p.at("high").get<double>(), p.at("dim").get<Index>(), 0};
}

nn::Checkpoint load_existing_checkpoint(const fs::path& path, const std::string& expected_kind) {
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "checkpoint not found: " + path.string());
  auto ck = nn::load_checkpoint(path);
  const auto kind = ck.meta.value("kind", std::string());
  if (kind != expected_kind) {
    throw Error(ErrorCode::ModelError,
                path.string() + " holds a '" + kind + "' network, expected '" + expected_kind + "'");
  }
  return ck;
}

std::uint64_t hash_pairing(const std::vector<Index>& perm) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (Index p : perm) {
    for (int b = 0; b < 8; ++b) {
      h ^= (static_cast<std::uint64_t>(p) >> (8 * b)) & 0xff;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

double divergence(const PointSet& generated, const PointSet& real, const EvalOptions& eval) {
  return ot::ot_divergence(generated, real, eval.assign_metric, eval.report_metric);
}

// Runs `fn`, prefixing any library error with the pipeline stage.
template <class Fn>
auto staged(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("[") + stage + "] " + e.message());
  }
}

std::vector<Index> seeded_permutation(Index n, std::uint64_t seed) {
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

data::ImageBatch select_images(const data::ImageBatch& all, const std::vector<Index>& rows) {
  data::ImageBatch out;
  out.height = all.height;
  out.width = all.width;
  out.channels = all.channels;
  out.pixels.resize(static_cast<Index>(rows.size()), all.pixel_count());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.pixels.row(static_cast<Index>(r)) = all.pixels.row(rows[r]);
    if (!all.labels.empty()) out.labels.push_back(all.labels[rows[r]]);
  }
  return out;
}

struct MapperRun {
  mappers::TrainResult<float> result;
  mappers::PriorSpec prior;
};

// Trains a mapping network onto `targets` (OTtrans: the first pool_m rows
// form the transport pool; OTgen: batches drawn from all rows).
MapperRun train_mapper(const std::string& algo, const PointSet& targets, mappers::TrainConfig cfg,
                       const NetOptions& net_opts, const RunSeeds& seeds,
                       const mappers::StepObserver<float>& observer = {}) {
  cfg.seed = seeds.train;
  cfg.prior.seed = seeds.prior;
  if (cfg.prior.dim < 1) cfg.prior.dim = targets.dim();
  auto net = nn::init_mlp<float>(mapper_specs(net_opts, cfg.prior.dim, targets.dim()), seeds.init);
  if (algo == "ottrans") {
    return {mappers::train_ottrans<float>(targets, cfg, std::move(net), observer), cfg.prior};
  }
  if (algo == "otgen") {
    mappers::PoolSampler sampler(targets, derive_seed(seeds.data, 1));
    return {mappers::train_otgen<float>(std::ref(sampler), cfg, std::move(net), observer), cfg.prior};
  }
  throw Error(ErrorCode::InvalidArgument, "algo must be 'ottrans' or 'otgen', got '" + algo + "'");
}

void save_mapper(const fs::path& path, const MapperRun& run, const std::string& algo, const std::string& dataset,
                 std::uint64_t seed) {
  nn::Checkpoint ck{run.result.net, run.result.adam, run.result.prior_state,
                    {{"kind", "mapper"}, {"algo", algo}, {"dataset", dataset}, {"seed", seed},
                     {"prior", prior_json(run.prior)}}};
  nn::save_checkpoint(path, ck);
}

}  // namespace

nlohmann::json cmd_gen_data(const GenDataOptions& opts) {
  const auto out = prepare_out(opts);
  const auto seeds = derive_run_seeds(opts.seed);
  Report report("gen-data", opts.config_text, opts.seed);
  report.seeds() = seeds_json(seeds);
  const auto points = load_points(opts.data, opts.data.n, seeds.data);
  std::ostringstream csv;
  if (is_synthetic(opts.data)) {
    const auto labels = data::synthetic_labels(points.size());
    data::write_points_csv(csv, points, &labels);
  } else {
    data::write_points_csv(csv, points);
  }
  write_file_atomic(out / "points.csv", csv.str());
  report.artifact("points", out / "points.csv");
  report.results() = {{"dataset", dataset_name(opts.data)}, {"n", points.size()}, {"dim", points.dim()}};
  return report.write(out / "report.json");
}

nlohmann::json cmd_train(const TrainOptions& opts) {
  const auto out = prepare_out(opts);
  const auto seeds = derive_run_seeds(opts.seed);
  Report report("train", opts.config_text, opts.seed);
  report.seeds() = seeds_json(seeds);

  const bool ottrans = opts.algo == "ottrans";
  const Index pool_n = ottrans ? opts.train.transport_pool_m : opts.data.n;
  const PointSet targets = load_points(opts.data, pool_n, seeds.data);

  std::map<int, double> estimates;
  std::optional<PointSet> estimate_real;
  if (opts.eval_every > 0) estimate_real = load_points(opts.data, opts.estimate_n, derive_seed(seeds.eval_real, 1));
  mappers::StepObserver<float> observer;
  if (estimate_real) {
    observer = [&](const mappers::StepInfo<float>& info) {
      if ((info.step + 1) % opts.eval_every != 0) return;
      auto prior = opts.train.prior;
      if (prior.dim < 1) prior.dim = targets.dim();
      prior.seed = derive_seed(seeds.eval_prior, 1);
      const auto gen = mappers::generate(info.net, prior, estimate_real->size());
      estimates[info.step] = divergence(gen, *estimate_real, opts.eval);
    };
  }

  const auto run = train_mapper(opts.algo, targets, opts.train, opts.net, seeds, observer);

  const PointSet real = load_points(opts.data, opts.eval.n, seeds.eval_real);
  auto eval_prior = run.prior;
  eval_prior.seed = seeds.eval_prior;
  const PointSet generated = mappers::generate(run.result.net, eval_prior, real.size());
  const double div = divergence(generated, real, opts.eval);

  save_mapper(out / "checkpoint.ckpt", run, opts.algo, dataset_name(opts.data), opts.seed);
  write_file_atomic(out / "loss.csv", loss_csv(run.result.losses, estimates));
  std::ostringstream gen_csv;
  data::write_points_csv(gen_csv, generated);
  write_file_atomic(out / "generated.csv", gen_csv.str());
  report.artifact("checkpoint", out / "checkpoint.ckpt");
  report.artifact("loss_csv", out / "loss.csv");
  report.artifact("generated", out / "generated.csv");
  if (!run.result.traces.empty()) {
    write_file_atomic(out / "traces.json", traces_to_json(run.result.traces).dump() + "\n");
    report.artifact("traces", out / "traces.json");
  }

  auto& r = report.results();
  r["algo"] = opts.algo;
  r["dataset"] = dataset_name(opts.data);
  r["divergence"] = div;
  r["eval_n"] = real.size();
  r["assign_metric"] = ot::to_string(opts.eval.assign_metric);
  r["report_metric"] = ot::to_string(opts.eval.report_metric);
  r["steps"] = opts.train.steps;
  r["final_loss"] = run.result.losses.empty() ? 0.0 : run.result.losses.back();
  r["param_count"] = run.result.net.param_count();
  if (ottrans) r["pairing_hash"] = hash_pairing(run.result.pairing);
  return report.write(out / "report.json");
}

nlohmann::json cmd_eval(const EvalCommandOptions& opts) {
  const auto out = prepare_out(opts);
  const auto seeds = derive_run_seeds(opts.seed);
  Report report("eval", opts.config_text, opts.seed);
  report.seeds() = seeds_json(seeds);
  if (!opts.data_baseline && opts.checkpoints.empty() && opts.cluster_models.empty()) {
    throw Error(ErrorCode::InvalidArgument, "nothing to evaluate: pass --checkpoint, --cluster-model or --data-baseline");
  }
  const std::string dataset = dataset_name(opts.data);
  const PointSet real = load_points(opts.data, opts.eval.n, seeds.eval_real);
  const Index n = real.size();
  std::vector<EvalRow> rows;

  if (opts.data_baseline) {
    const PointSet other = load_points(opts.data, n, derive_seed(seeds.eval_real, 1));
    rows.push_back({"data", dataset, divergence(other, real, opts.eval), n, opts.seed});
  }
  for (const auto& path : opts.checkpoints) {
    const auto ck = load_existing_checkpoint(path, "mapper");
    auto prior = prior_from_meta(ck.meta, path);
    prior.seed = seeds.eval_prior;
    const auto gen = mappers::generate(ck.net, prior, n);
    rows.push_back({ck.meta.value("algo", std::string("mapper")), dataset, divergence(gen, real, opts.eval), n,
                    opts.seed});
  }
  for (const auto& path : opts.cluster_models) {
    if (!fs::exists(path)) throw Error(ErrorCode::IoError, "cluster model not found: " + path.string());
    const auto model = baseline::cluster_model_from_json(read_json_file(path));
    const auto gen = baseline::sample_cluster_model(model, n, seeds.eval_prior);
    rows.push_back({"cluster_k" + std::to_string(model.clusters()), dataset, divergence(gen, real, opts.eval), n,
                    opts.seed});
  }

  write_file_atomic(out / "eval.csv", eval_csv(rows));
  report.artifact("table", out / "eval.csv");
  auto& table = report.results()["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    table.push_back({{"method", r.method}, {"dataset", r.dataset}, {"divergence", r.divergence}, {"eval_n", r.eval_n}});
  }
  report.results()["assign_metric"] = ot::to_string(opts.eval.assign_metric);
  report.results()["report_metric"] = ot::to_string(opts.eval.report_metric);
  return report.write(out / "report.json");
}

nlohmann::json cmd_baseline(const BaselineOptions& opts) {
  const auto out = prepare_out(opts);
  const auto seeds = derive_run_seeds(opts.seed);
  Report report("baseline", opts.config_text, opts.seed);
  report.seeds() = seeds_json(seeds);
  const PointSet train = load_points(opts.data, opts.data.n, seeds.data);
  const PointSet real = load_points(opts.data, opts.eval.n, seeds.eval_real);

  for (Index k : opts.ks) {
    const auto fit = baseline::kmeans_fit(train, k, opts.max_iters, seeds.model);
    const std::string name = "cluster_k" + std::to_string(k);
    write_file_atomic(out / (name + ".json"), baseline::to_json(fit.model).dump(2) + "\n");
    report.artifact(name, out / (name + ".json"));
    const auto gen = baseline::sample_cluster_model(fit.model, real.size(), seeds.eval_prior);
    report.results()[name] = {{"divergence", divergence(gen, real, opts.eval)},
                              {"eval_n", real.size()},
                              {"iterations", fit.iterations},
                              {"sse", fit.sse_history.empty() ? 0.0 : fit.sse_history.back()}};
  }
  report.results()["dataset"] = dataset_name(opts.data);
  return report.write(out / "report.json");
}

nlohmann::json cmd_plot(const PlotOptions& opts) {
  std::vector<io::PlotLayer> layers;
  std::vector<io::Segment> segments;
  nlohmann::json summary;
  if (opts.trace) {
    const auto traces = traces_from_json(read_json_file(*opts.trace));
    if (traces.empty()) throw Error(ErrorCode::ParseError, opts.trace->string() + ": no traces");
    const int idx = opts.trace_index < 0 ? static_cast<int>(traces.size()) - 1 : opts.trace_index;
    if (idx >= static_cast<int>(traces.size())) {
      throw Error(ErrorCode::InvalidArgument, "trace index " + std::to_string(idx) + " out of range (file has " +
                                                  std::to_string(traces.size()) + ")");
    }
    const auto& tr = traces[static_cast<std::size_t>(idx)];
    const auto sigma = opts.l1 ? ot::solve_assignment(tr.predictions, tr.targets, ot::CostMetric::L1) : tr.sigma;
    layers.push_back({"real", tr.targets, io::kRealColor});
    layers.push_back({"predictions", tr.predictions, io::kPredictionColor});
    for (Index i = 0; i < tr.predictions.size(); ++i) {
      const auto p = tr.predictions.row(i);
      const auto z = tr.targets.row(sigma.perm[i]);
      segments.push_back({p(0), p(1), z(0), z(1)});
    }
    summary["step"] = tr.step;
    summary["mean_l1"] = ot::matched_mean_distance(tr.predictions, tr.targets, sigma, ot::CostMetric::L1);
  }
  auto add = [&](const std::optional<fs::path>& path, const char* name, const char* color) {
    if (path) layers.push_back({name, data::read_points_csv(*path).points, color});
  };
  add(opts.real, "real", io::kRealColor);
  add(opts.noise, "noise", io::kGeneratedColor);
  add(opts.generated, "generated", io::kGeneratedColor);
  add(opts.predictions, "predictions", io::kPredictionColor);
  if (layers.empty()) throw Error(ErrorCode::InvalidArgument, "plot needs --trace or at least one point CSV");

  const std::string svg = io::render_svg(layers, segments);
  write_file_atomic(opts.out, svg);
  summary["out"] = opts.out.string();
  summary["segments"] = segments.size();
  summary["bytes"] = svg.size();
  return summary;
}

nlohmann::json cmd_train_ae(const TrainAeOptions& opts) {
  const auto out = prepare_out(opts);
  const auto seeds = derive_run_seeds(opts.seed);
  Report report("train-ae", opts.config_text, opts.seed);
  report.seeds() = seeds_json(seeds);
  auto images = data::load_idx(opts.input.images, opts.input.labels);
  if (opts.train_n > 0 && opts.train_n < images.size()) {
    auto order = seeded_permutation(images.size(), seeds.data);
    order.resize(static_cast<std::size_t>(opts.train_n));
    images = select_images(images, order);
  }
  auto cfg = opts.train;
  cfg.seed = seeds.model;
  auto spec = opts.spec;
  spec.input_dim = images.pixel_count();
  const auto run = autoenc::train_autoencoder(images, spec, cfg);

  nn::save_checkpoint(out / "encoder.ckpt", {run.model.encoder, std::nullopt, "", {{"kind", "encoder"}}});
  nn::save_checkpoint(out / "decoder.ckpt",
                      {run.model.decoder, std::nullopt, "",
                       {{"kind", "decoder"}, {"height", images.height}, {"width", images.width},
                        {"channels", images.channels}}});
  write_file_atomic(out / "ae_loss.csv", loss_csv(run.losses));
  std::ostringstream latents;
  data::write_points_csv(latents, autoenc::encode(run.model.encoder, images));
  write_file_atomic(out / "latents.csv", latents.str());
  for (const char* name : {"encoder", "decoder"}) report.artifact(name, out / (std::string(name) + ".ckpt"));
  report.artifact("loss_csv", out / "ae_loss.csv");
  report.artifact("latents", out / "latents.csv");
  report.results() = {{"images", images.size()},
                      {"final_loss", run.losses.empty() ? 0.0 : run.losses.back()},
                      {"reconstruction_mse", autoenc::reconstruction_mse(run.model, images)}};
  return report.write(out / "report.json");
}

nlohmann::json cmd_pipeline(const PipelineOptions& opts) {
  const auto out = prepare_out(opts);
  const auto seeds = derive_run_seeds(opts.seed);
  Report report("pipeline", opts.config_text, opts.seed);
  report.seeds() = seeds_json(seeds);

  const auto all = staged("load", [&] { return data::load_idx(opts.input.images, opts.input.labels); });
  const auto [train, heldout] = staged("split", [&] {
    if (opts.train_n < 1 || opts.heldout_n < 1 || opts.train_n + opts.heldout_n > all.size()) {
      throw Error(ErrorCode::InvalidCount, "train_n + heldout_n must fit in " + std::to_string(all.size()) +
                                               " images");
    }
    const auto order = seeded_permutation(all.size(), seeds.data);
    const std::vector<Index> tr(order.begin(), order.begin() + opts.train_n);
    const std::vector<Index> ho(order.begin() + opts.train_n, order.begin() + opts.train_n + opts.heldout_n);
    return std::pair{select_images(all, tr), select_images(all, ho)};
  });

  const auto ae = staged("autoencoder", [&] {
    auto cfg = opts.ae_train;
    cfg.seed = seeds.model;
    auto spec = opts.ae_spec;
    spec.input_dim = train.pixel_count();
    return autoenc::train_autoencoder(train, spec, cfg);
  });
  const auto [z_train, z_heldout] = staged("encode", [&] {
    return std::pair{autoenc::encode(ae.model.encoder, train), autoenc::encode(ae.model.encoder, heldout)};
  });

  const auto mapper = staged("mapper", [&] {
    auto cfg = opts.mapper_train;
    cfg.transport_pool_m = std::min(cfg.transport_pool_m, z_train.size());
    if (opts.algo != "ottrans") return train_mapper(opts.algo, z_train, cfg, opts.net, seeds);
    auto pool = seeded_permutation(z_train.size(), derive_seed(seeds.data, 2));
    pool.resize(static_cast<std::size_t>(cfg.transport_pool_m));
    const PointSet targets = z_train.select(pool);
    return train_mapper(opts.algo, targets, cfg, opts.net, seeds);
  });

  const auto [generated, div_generated, div_data] = staged("evaluate", [&] {
    auto prior = mapper.prior;
    prior.seed = seeds.eval_prior;
    const PointSet gen = mappers::generate(mapper.result.net, prior, opts.heldout_n);
    auto sub = seeded_permutation(z_train.size(), seeds.eval_real);
    sub.resize(static_cast<std::size_t>(std::min(opts.heldout_n, z_train.size())));
    const PointSet train_sub = z_train.select(sub);
    const EvalOptions eval;
    return std::tuple{gen, divergence(gen, z_heldout, eval), divergence(train_sub, z_heldout, eval)};
  });

  const auto samples = staged("decode", [&] {
    const Index tiles = opts.grid_rows * opts.grid_cols;
    std::vector<Index> first(static_cast<std::size_t>(std::min(tiles, generated.size())));
    std::iota(first.begin(), first.end(), Index{0});
    return autoenc::decode(ae.model.decoder, generated.select(first), train.height, train.width, train.channels);
  });
  const bool in_range =
      samples.pixels.allFinite() && samples.pixels.minCoeff() >= 0.0f && samples.pixels.maxCoeff() <= 1.0f;

  staged("write", [&] {
    io::write_pgm_grid(out / "samples.pgm", samples, static_cast<int>(opts.grid_rows),
                       static_cast<int>(opts.grid_cols));
    nn::save_checkpoint(out / "encoder.ckpt", {ae.model.encoder, std::nullopt, "", {{"kind", "encoder"}}});
    nn::save_checkpoint(out / "decoder.ckpt",
                        {ae.model.decoder, std::nullopt, "",
                         {{"kind", "decoder"}, {"height", train.height}, {"width", train.width},
                          {"channels", train.channels}}});
    save_mapper(out / "mapper.ckpt", mapper, opts.algo, "latent", opts.seed);
    write_file_atomic(out / "ae_loss.csv", loss_csv(ae.losses));
    write_file_atomic(out / "loss.csv", loss_csv(mapper.result.losses));
    return 0;
  });
  for (const char* name : {"encoder", "decoder", "mapper"}) report.artifact(name, out / (std::string(name) + ".ckpt"));
  report.artifact("samples", out / "samples.pgm");
  report.artifact("ae_loss_csv", out / "ae_loss.csv");
  report.artifact("loss_csv", out / "loss.csv");

  auto& r = report.results();
  r["train_n"] = train.size();
  r["heldout_n"] = heldout.size();
  r["latent_dim"] = z_train.dim();
  r["algo"] = opts.algo;
  r["ae_final_loss"] = ae.losses.empty() ? 0.0 : ae.losses.back();
  r["ae_reconstruction_mse_train"] = autoenc::reconstruction_mse(ae.model, train);
  r["ae_reconstruction_mse_heldout"] = autoenc::reconstruction_mse(ae.model, heldout);
  r["mapper_final_loss"] = mapper.result.losses.empty() ? 0.0 : mapper.result.losses.back();
  r["latent_divergence_generated"] = div_generated;
  r["latent_divergence_data"] = div_data;
  r["divergence_ratio"] = div_generated / div_data;
  r["samples_in_range"] = in_range;
  return report.write(out / "report.json");
}

nlohmann::json cmd_interpolate(const InterpolateOptions& opts) {
  if (opts.steps < 2) throw Error(ErrorCode::InvalidCount, "interpolation needs steps >= 2, got " + std::to_string(opts.steps));
  const auto out = prepare_out(opts);
  Report report("interpolate", opts.config_text, opts.seed);
  report.seeds() = {{"n0", opts.n0_seed}, {"n1", opts.n1_seed}};
  const auto mapper = load_existing_checkpoint(opts.mapper, "mapper");
  const auto decoder = load_existing_checkpoint(opts.decoder, "decoder");
  auto prior = prior_from_meta(mapper.meta, opts.mapper);

  prior.seed = opts.n0_seed;
  const PointSet n0 = mappers::sample_prior(prior, 1);
  prior.seed = opts.n1_seed;
  const PointSet n1 = mappers::sample_prior(prior, 1);
  Matrix noise(opts.steps, prior.dim);
  for (int i = 0; i < opts.steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(opts.steps - 1);
    noise.row(i) = (1.0 - t) * n0.data().row(0) + t * n1.data().row(0);
  }
  const PointSet latents = nn::forward(mapper.net, PointSet(std::move(noise)));
  const auto frames = autoenc::decode(decoder.net, latents, decoder.meta.at("height").get<int>(),
                                      decoder.meta.at("width").get<int>(), decoder.meta.value("channels", 1));
  io::write_pgm_grid(out / "interpolation.pgm", frames, 1, opts.steps);
  report.artifact("strip", out / "interpolation.pgm");

  auto mean_abs = [&](Index a, Index b) {
    return (frames.pixels.row(a) - frames.pixels.row(b)).cwiseAbs().cast<double>().mean();
  };
  std::vector<double> adjacent;
  for (Index i = 0; i + 1 < frames.size(); ++i) adjacent.push_back(mean_abs(i, i + 1));
  auto& r = report.results();
  r["steps"] = opts.steps;
  r["adjacent_mean_abs_diff"] = adjacent;
  r["endpoint_mean_abs_diff"] = mean_abs(0, frames.size() - 1);
  r["frames_in_range"] = frames.pixels.allFinite() && frames.pixels.minCoeff() >= 0.0f &&
                         frames.pixels.maxCoeff() <= 1.0f;
  return report.write(out / "report.json");
}

}  // namespace otmap::cli
