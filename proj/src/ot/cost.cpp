#include "otmap/ot/cost.hpp"

#include "otmap/error.hpp"

#include <cmath>

namespace otmap::ot {

std::string_view to_string(CostMetric metric) noexcept {
  switch (metric) {
    case CostMetric::SquaredEuclidean: return "sqeuclidean";
    case CostMetric::Euclidean: return "euclidean";
    case CostMetric::L1: return "l1";
  }
  return "unknown";
}

std::optional<CostMetric> parse_metric(std::string_view name) noexcept {
  if (name == "sqeuclidean" || name == "squared_euclidean") return CostMetric::SquaredEuclidean;
  if (name == "euclidean" || name == "l2") return CostMetric::Euclidean;
  if (name == "l1" || name == "cityblock") return CostMetric::L1;
  return std::nullopt;
}

CostMatrix pairwise_cost(const PointSet& sources, const PointSet& targets, CostMetric metric) {
  require_same_shape(sources, targets, "pairwise_cost");
  const Index k = sources.size();
  const Index d = sources.dim();
  CostMatrix out{Matrix(k, k), metric};
  for (Index i = 0; i < k; ++i) {
    const double* a = sources.row_ptr(i);
    for (Index j = 0; j < k; ++j) out.values(i, j) = point_cost(metric, a, targets.row_ptr(j), d);
  }
  return out;
}

}  // namespace otmap::ot
