#pragma once

#include "otmap/point_set.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace otmap::mappers {

/// Batches up to this size use every unordered pair; larger batches use 2k sampled pairs.
inline constexpr Index kAllPairsLimit = 512;

struct DiversityPenalty {
  double value = 0.0;
  Matrix gradient;  // d value / d p, same shape as p
};

/// Unordered index pairs used for batch size k: all pairs when k <= kAllPairsLimit,
/// otherwise 2k distinct-endpoint pairs drawn uniformly with `seed`.
std::vector<std::pair<Index, Index>> diversity_pairs(Index k, std::uint64_t seed);

/// Mean Euclidean distance over the given pairs.
double mean_pair_distance(const PointSet& s, const std::vector<std::pair<Index, Index>>& pairs);

/// |meanPairDist(p) - meanPairDist(z)| and its gradient with respect to p (z
/// constant). Both sets are evaluated on the same pairs. Coincident points
/// and a zero difference contribute a zero subgradient.
/// Throws TooFewPoints for k < 2 and SizeMismatch for unequal shapes.
DiversityPenalty diversity_penalty(const PointSet& p, const PointSet& z, std::uint64_t pair_seed = 0);

}  // namespace otmap::mappers
