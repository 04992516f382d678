#include "otmap/autoenc/autoencoder.hpp"

#include "otmap/error.hpp"
#include "otmap/rng.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace otmap::autoenc {
namespace {

constexpr Index kChunk = 1024;
constexpr std::uint64_t kEncoderInitStream = 10;
constexpr std::uint64_t kDecoderInitStream = 11;
constexpr std::uint64_t kBatchStream = 12;

}  // namespace

std::vector<nn::LayerSpec> encoder_specs(const AutoencoderSpec& spec) {
  std::vector<nn::LayerSpec> out;
  Index prev = spec.input_dim;
  for (Index w : spec.hidden) {
    out.push_back({prev, w, spec.activation});
    prev = w;
  }
  out.push_back({prev, spec.latent_dim, nn::Activation::identity()});
  return out;
}

std::vector<nn::LayerSpec> decoder_specs(const AutoencoderSpec& spec) {
  std::vector<nn::LayerSpec> out;
  Index prev = spec.latent_dim;
  for (auto it = spec.hidden.rbegin(); it != spec.hidden.rend(); ++it) {
    out.push_back({prev, *it, spec.activation});
    prev = *it;
  }
  out.push_back({prev, spec.input_dim, spec.output_activation});
  return out;
}

AutoencoderRun train_autoencoder(const data::ImageBatch& images, const AutoencoderSpec& spec,
                                 const mappers::TrainConfig& cfg,
                                 const std::function<void(int, double)>& observer) {
  if (images.size() < 1) throw Error(ErrorCode::InvalidCount, "no training images");
  if (images.pixel_count() != spec.input_dim) {
    throw Error(ErrorCode::SizeMismatch, "images have " + std::to_string(images.pixel_count()) +
                                             " pixels, autoencoder expects " + std::to_string(spec.input_dim));
  }
  if (spec.latent_dim < 1) throw Error(ErrorCode::SpecError, "latent_dim must be >= 1");
  if (cfg.batch_k < 1 || cfg.batch_k > images.size()) {
    throw Error(ErrorCode::InvalidArgument, "batch size must lie in [1, " + std::to_string(images.size()) + "]");
  }

  AutoencoderRun run{{nn::init_mlp<float>(encoder_specs(spec), derive_seed(cfg.seed, kEncoderInitStream)),
                      nn::init_mlp<float>(decoder_specs(spec), derive_seed(cfg.seed, kDecoderInitStream))},
                     {}};
  auto& enc = run.model.encoder;
  auto& dec = run.model.decoder;
  auto enc_state = nn::AdamState<float>::fresh(enc, cfg.adam);
  auto dec_state = nn::AdamState<float>::fresh(dec, cfg.adam);

  const Index n = images.size();
  const Index k = cfg.batch_k;
  std::mt19937_64 rng(derive_seed(cfg.seed, kBatchStream));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Index cursor = n;
  nn::MatrixT<float> batch(k, images.pixel_count());
  const double scale = 2.0 / static_cast<double>(k * images.pixel_count());

  for (int step = 0; step < cfg.steps; ++step) {
    if (n - cursor < k) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    for (Index r = 0; r < k; ++r) batch.row(r) = images.pixels.row(order[cursor + r]);
    cursor += k;

    const auto enc_trace = enc.forward_trace(batch);
    const auto dec_trace = dec.forward_trace(enc_trace.output());
    const nn::MatrixT<float> diff = dec_trace.output() - batch;
    const double loss = diff.template cast<double>().squaredNorm() / static_cast<double>(diff.size());
    const nn::MatrixT<float> out_grad = (static_cast<float>(scale) * diff).eval();

    const auto dec_grads = dec.backward(dec_trace, out_grad);
    const auto enc_grads = enc.backward(enc_trace, dec_grads.input);
    nn::adam_step(dec, dec_grads, dec_state, cfg.lr);
    nn::adam_step(enc, enc_grads, enc_state, cfg.lr);

    run.losses.push_back(loss);
    if (observer) observer(step, loss);
  }
  return run;
}

PointSet encode(const nn::Mlp<float>& encoder, const data::ImageBatch& images) {
  if (images.size() < 1) throw Error(ErrorCode::InvalidCount, "no images to encode");
  Matrix out(images.size(), encoder.output_dim());
  for (Index begin = 0; begin < images.size(); begin += kChunk) {
    const Index len = std::min(kChunk, images.size() - begin);
    const nn::MatrixT<float> chunk = images.pixels.middleRows(begin, len);
    out.middleRows(begin, len) = encoder.forward(chunk).template cast<double>();
  }
  return PointSet(std::move(out));
}

data::ImageBatch decode(const nn::Mlp<float>& decoder, const PointSet& latents, int height, int width,
                        int channels) {
  if (latents.dim() != decoder.input_dim()) {
    throw Error(ErrorCode::SizeMismatch, "latents have dimension " + std::to_string(latents.dim()) +
                                             ", decoder expects " + std::to_string(decoder.input_dim()));
  }
  if (static_cast<Index>(height) * width * channels != decoder.output_dim()) {
    throw Error(ErrorCode::SizeMismatch, "image shape does not match decoder output width");
  }
  data::ImageBatch out;
  out.height = height;
  out.width = width;
  out.channels = channels;
  out.pixels.resize(latents.size(), decoder.output_dim());
  for (Index begin = 0; begin < latents.size(); begin += kChunk) {
    const Index len = std::min(kChunk, latents.size() - begin);
    const nn::MatrixT<float> chunk = latents.data().middleRows(begin, len).template cast<float>();
    out.pixels.middleRows(begin, len) = decoder.forward(chunk).cwiseMax(0.0f).cwiseMin(1.0f);
  }
  return out;
}

double reconstruction_mse(const Autoencoder& ae, const data::ImageBatch& images) {
  const PointSet z = encode(ae.encoder, images);
  const auto recon = decode(ae.decoder, z, images.height, images.width, images.channels);
  return (recon.pixels - images.pixels).template cast<double>().squaredNorm() /
         static_cast<double>(images.pixels.size());
}

}  // namespace otmap::autoenc
