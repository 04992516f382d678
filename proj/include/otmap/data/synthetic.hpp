#pragma once

#include "otmap/point_set.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace otmap::data {

enum class SyntheticKind { Moons, Circles };

/// How arc parameters are drawn: i.i.d. uniform, or an evenly spaced grid
/// over the same range (endpoints included).
enum class AngleSampling { Uniform, Grid };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::Moons;
  Index n = 10000;
  double noise_sd = 0.05;
  double factor = 0.5;  // circles: inner radius / outer radius
  std::uint64_t seed = 0;
  AngleSampling angles = AngleSampling::Uniform;
};

std::string_view to_string(SyntheticKind kind) noexcept;
std::optional<SyntheticKind> parse_kind(std::string_view name) noexcept;

/// Two interleaved half circles. The first n - n/2 points lie on the upper
/// arc (cos t, sin t), the remaining n/2 on the lower arc
/// (1 - cos t, 0.5 - sin t), t in [0, pi], plus N(0, noise_sd^2 I).
PointSet make_moons(const SyntheticSpec& spec);

/// Two concentric circles: the first n - n/2 points on radius 1, the rest on
/// radius `factor`, angle in [0, 2 pi), plus N(0, noise_sd^2 I).
PointSet make_circles(const SyntheticSpec& spec);

/// Dispatches on spec.kind.
PointSet make_synthetic(const SyntheticSpec& spec);

/// Component label of each point produced for size n: 0 for the first
/// (upper/outer) component, 1 for the second.
std::vector<int> synthetic_labels(Index n);

}  // namespace otmap::data
