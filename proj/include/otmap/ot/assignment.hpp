#pragma once

#include "otmap/ot/cost.hpp"
#include "otmap/point_set.hpp"

#include <vector>

namespace otmap::ot {

/// Largest k accepted by the dense solvers.
inline constexpr Index kMaxAssignmentSize = 16384;

/// A bijection between two equal-size point sets: source i is matched to target perm[i].
struct Assignment {
  std::vector<Index> perm;
  double total_cost = 0.0;
};

/// Exact minimum-cost perfect matching for a square cost matrix.
///
/// Shortest augmenting path method with dual potentials (Jonker-Volgenant
/// family). Rows are augmented in increasing index order; while growing a
/// shortest-path tree, ties on reduced distance prefer a free column, then
/// the column reached first in scan order. The result is therefore a pure
/// function of the matrix. total_cost is summed over rows in index order.
///
/// Throws SizeMismatch for a non-square matrix, InvalidCost for NaN, infinite
/// or negative entries, and ProblemTooLarge above kMaxAssignmentSize.
Assignment solve_assignment(const CostMatrix& costs);
Assignment solve_assignment(const Matrix& costs);

/// Same solver, with costs evaluated on the fly from the two point sets
/// instead of materializing the k x k matrix. Produces exactly the result of
/// solve_assignment(pairwise_cost(sources, targets, metric)).
Assignment solve_assignment(const PointSet& sources, const PointSet& targets, CostMetric metric);

/// True iff perm is a permutation of 0..perm.size()-1.
bool is_permutation(const std::vector<Index>& perm);

}  // namespace otmap::ot
