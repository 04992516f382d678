#include "otmap/ot/divergence.hpp"

#include "otmap/error.hpp"

namespace otmap::ot {
namespace {

void require_valid_sigma(const PointSet& a, const Assignment& sigma) {
  if (static_cast<Index>(sigma.perm.size()) != a.size() || !is_permutation(sigma.perm)) {
    throw Error(ErrorCode::SizeMismatch, "assignment is not a permutation of size " + std::to_string(a.size()));
  }
}

}  // namespace

double ot_divergence(const PointSet& a, const PointSet& b, CostMetric assign_metric, CostMetric report_metric) {
  require_same_shape(a, b, "ot_divergence");
  const Assignment sigma = solve_assignment(a, b, assign_metric);
  return matched_mean_distance(a, b, sigma, report_metric);
}

double matched_mean_distance(const PointSet& a, const PointSet& b, const Assignment& sigma, CostMetric metric) {
  require_same_shape(a, b, "matched_mean_distance");
  require_valid_sigma(a, sigma);
  double sum = 0.0;
  for (Index i = 0; i < a.size(); ++i) sum += point_cost(metric, a.row_ptr(i), b.row_ptr(sigma.perm[i]), a.dim());
  return sum / static_cast<double>(a.size());
}

Matrix assignment_cost_gradient(const PointSet& a, const PointSet& b, const Assignment& sigma, CostMetric metric) {
  if (metric != CostMetric::SquaredEuclidean) {
    throw Error(ErrorCode::UnsupportedMetric,
                "assignment_cost_gradient supports sqeuclidean only, got " + std::string(to_string(metric)));
  }
  require_same_shape(a, b, "assignment_cost_gradient");
  require_valid_sigma(a, sigma);
  const double scale = 2.0 / static_cast<double>(a.size());
  Matrix grad(a.size(), a.dim());
  for (Index i = 0; i < a.size(); ++i) grad.row(i) = scale * (a.row(i) - b.row(sigma.perm[i]));
  return grad;
}

}  // namespace otmap::ot
