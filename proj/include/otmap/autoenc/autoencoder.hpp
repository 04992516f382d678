#pragma once

#include "otmap/data/idx.hpp"
#include "otmap/mappers/trainer.hpp"
#include "otmap/nn/adam.hpp"
#include "otmap/nn/mlp.hpp"
#include "otmap/point_set.hpp"

#include <functional>
#include <vector>

namespace otmap::autoenc {

/// Fully connected autoencoder layout. The encoder is
/// input -> hidden... -> latent (linear); the decoder mirrors the hidden
/// widths and ends in output_activation.
struct AutoencoderSpec {
  Index input_dim = 784;
  std::vector<Index> hidden = {512, 256};
  Index latent_dim = 8;
  nn::Activation activation = nn::Activation::leaky_relu();
  nn::Activation output_activation = nn::Activation::sigmoid();
};

std::vector<nn::LayerSpec> encoder_specs(const AutoencoderSpec& spec);
std::vector<nn::LayerSpec> decoder_specs(const AutoencoderSpec& spec);

struct Autoencoder {
  nn::Mlp<float> encoder;
  nn::Mlp<float> decoder;
};

struct AutoencoderRun {
  Autoencoder model;
  std::vector<double> losses;  // per-step minibatch MSE per pixel
};

/// Minimizes mean squared reconstruction error with Adam over minibatches of
/// cfg.batch_k images drawn without replacement (reshuffled per epoch).
/// Uses cfg.steps, cfg.batch_k, cfg.lr, cfg.seed and cfg.adam.
AutoencoderRun train_autoencoder(const data::ImageBatch& images, const AutoencoderSpec& spec,
                                 const mappers::TrainConfig& cfg,
                                 const std::function<void(int step, double loss)>& observer = {});

/// Latent code of every image (k = n, d = latent_dim).
PointSet encode(const nn::Mlp<float>& encoder, const data::ImageBatch& images);

/// Images for every latent row; values are clamped into [0, 1].
data::ImageBatch decode(const nn::Mlp<float>& decoder, const PointSet& latents, int height, int width,
                        int channels = 1);

/// Per-pixel mean squared error of decode(encode(images)).
double reconstruction_mse(const Autoencoder& ae, const data::ImageBatch& images);

}  // namespace otmap::autoenc
