#include "otmap/mappers/diversity.hpp"

#include "otmap/error.hpp"

#include <cmath>
#include <random>

namespace otmap::mappers {

std::vector<std::pair<Index, Index>> diversity_pairs(Index k, std::uint64_t seed) {
  std::vector<std::pair<Index, Index>> pairs;
  if (k <= kAllPairsLimit) {
    pairs.reserve(static_cast<std::size_t>(k * (k - 1) / 2));
    for (Index i = 0; i < k; ++i) {
      for (Index j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> first(0, k - 1);
  std::uniform_int_distribution<Index> offset(1, k - 1);
  pairs.reserve(static_cast<std::size_t>(2 * k));
  for (Index n = 0; n < 2 * k; ++n) {
    const Index i = first(rng);
    const Index j = (i + offset(rng)) % k;
    pairs.emplace_back(i, j);
  }
  return pairs;
}

double mean_pair_distance(const PointSet& s, const std::vector<std::pair<Index, Index>>& pairs) {
  double sum = 0.0;
  for (const auto& [i, j] : pairs) sum += (s.row(i) - s.row(j)).norm();
  return sum / static_cast<double>(pairs.size());
}

DiversityPenalty diversity_penalty(const PointSet& p, const PointSet& z, std::uint64_t pair_seed) {
  require_same_shape(p, z, "diversity_penalty");
  if (p.size() < 2) throw Error(ErrorCode::TooFewPoints, "diversity penalty needs at least 2 points");
  const auto pairs = diversity_pairs(p.size(), pair_seed);
  const double diff = mean_pair_distance(p, pairs) - mean_pair_distance(z, pairs);

  DiversityPenalty out{std::abs(diff), Matrix::Zero(p.size(), p.dim())};
  if (diff == 0.0) return out;
  const double scale = (diff > 0.0 ? 1.0 : -1.0) / static_cast<double>(pairs.size());
  for (const auto& [i, j] : pairs) {
    Eigen::RowVectorXd delta = p.row(i) - p.row(j);
    const double norm = delta.norm();
    if (norm == 0.0) continue;
    delta *= scale / norm;
    out.gradient.row(i) += delta;
    out.gradient.row(j) -= delta;
  }
  return out;
}

}  // namespace otmap::mappers
