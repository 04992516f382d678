#pragma once

#include "otmap/point_set.hpp"

#include <cmath>
#include <optional>
#include <string_view>

namespace otmap::ot {

enum class CostMetric { SquaredEuclidean, Euclidean, L1 };

std::string_view to_string(CostMetric metric) noexcept;
std::optional<CostMetric> parse_metric(std::string_view name) noexcept;

/// Distance between two d-dimensional points under `metric`.
inline double point_cost(CostMetric metric, const double* a, const double* b, Index d) noexcept {
  double acc = 0.0;
  switch (metric) {
    case CostMetric::SquaredEuclidean:
      for (Index t = 0; t < d; ++t) {
        const double diff = a[t] - b[t];
        acc += diff * diff;
      }
      return acc;
    case CostMetric::Euclidean:
      for (Index t = 0; t < d; ++t) {
        const double diff = a[t] - b[t];
        acc += diff * diff;
      }
      return std::sqrt(acc);
    case CostMetric::L1:
      for (Index t = 0; t < d; ++t) acc += std::abs(a[t] - b[t]);
      return acc;
  }
  return acc;
}

struct CostMatrix {
  Matrix values;  // k x k, entry (i, j) = metric(source_i, target_j)
  CostMetric metric = CostMetric::SquaredEuclidean;
};

/// All source-to-target costs. Requires equal k and d.
CostMatrix pairwise_cost(const PointSet& sources, const PointSet& targets, CostMetric metric);

}  // namespace otmap::ot
