#pragma once

#include "otmap/nn/adam.hpp"
#include "otmap/nn/mlp.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace otmap::nn {

/// Everything needed to resume or replay a training run.
///
/// On-disk layout (all integers little-endian):
///
///   offset 0   8 bytes   magic "OTMAPCKP"
///   offset 8   u32       format version (1)
///   offset 12  u32       scalar width in bytes (4 = float32)
///   offset 16  u64       header length H
///   offset 24  H bytes   UTF-8 JSON header: layer specs, Adam config and
///                        step counter, RNG state string, free-form "meta"
///   then       raw float32 blocks, per layer: weight (out x in, row-major),
///              bias (out); if the header has "adam", per layer m_weight,
///              v_weight, m_bias, v_bias in the same order and layout.
///
/// save followed by load reproduces every parameter bit for bit.
struct Checkpoint {
  Mlp<float> net;
  std::optional<AdamState<float>> adam;
  std::string rng_state;
  nlohmann::json meta = nlohmann::json::object();
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace otmap::nn
