#pragma once

#include "otmap/ot/assignment.hpp"
#include "otmap/ot/cost.hpp"
#include "otmap/point_set.hpp"

namespace otmap::ot {

/// Average matched-pair distance under the optimal bijection from `a` to `b`.
///
/// The bijection minimizes total cost under `assign_metric`; the reported
/// average uses `report_metric`.
double ot_divergence(const PointSet& a, const PointSet& b,
                     CostMetric assign_metric = CostMetric::SquaredEuclidean,
                     CostMetric report_metric = CostMetric::Euclidean);

/// Mean `metric` distance between a_i and b_{perm[i]}.
double matched_mean_distance(const PointSet& a, const PointSet& b, const Assignment& sigma, CostMetric metric);

/// Gradient with respect to `a` of (1/k) sum_i c(a_i, b_{sigma(i)}) with sigma
/// held fixed. Only SquaredEuclidean is differentiable here: the result is
/// (2/k)(a_i - b_{sigma(i)}). Other metrics throw UnsupportedMetric.
Matrix assignment_cost_gradient(const PointSet& a, const PointSet& b, const Assignment& sigma, CostMetric metric);

}  // namespace otmap::ot
