#include "otmap/ot/assignment.hpp"

#include "otmap/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace otmap::ot {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_size(Index n) {
  if (n < 1) throw Error(ErrorCode::SizeMismatch, "assignment problem must have k >= 1");
  if (n > kMaxAssignmentSize) {
    throw Error(ErrorCode::ProblemTooLarge, "assignment of size " + std::to_string(n) + " exceeds the dense limit " +
                                                std::to_string(kMaxAssignmentSize));
  }
}

// Shortest augmenting path solver. `cost(i, j)` must be a pure function.
// row_dual and col_dual keep every reduced cost c(i,j) - u_i - v_j >= 0 (up to
// rounding), and matched pairs have reduced cost zero.
template <class CostFn>
std::vector<Index> augment_all_rows(Index n, CostFn&& cost) {
  std::vector<double> row_dual(n, 0.0);
  std::vector<double> col_dual(n, 0.0);
  std::vector<Index> col_for_row(n, -1);
  std::vector<Index> row_for_col(n, -1);

  std::vector<double> shortest(n);
  std::vector<Index> path(n);
  std::vector<Index> remaining(n);
  std::vector<char> row_visited(n);
  std::vector<char> col_visited(n);

  for (Index current = 0; current < n; ++current) {
    std::fill(shortest.begin(), shortest.end(), kInf);
    std::fill(path.begin(), path.end(), -1);
    std::fill(row_visited.begin(), row_visited.end(), 0);
    std::fill(col_visited.begin(), col_visited.end(), 0);
    std::iota(remaining.begin(), remaining.end(), Index{0});
    Index num_remaining = n;

    double min_dist = 0.0;
    Index row = current;
    Index sink = -1;
    while (sink < 0) {
      row_visited[row] = 1;
      const double base = min_dist - row_dual[row];
      Index best = -1;
      double lowest = kInf;
      for (Index it = 0; it < num_remaining; ++it) {
        const Index col = remaining[it];
        const double reduced = base + cost(row, col) - col_dual[col];
        if (reduced < shortest[col]) {
          path[col] = row;
          shortest[col] = reduced;
        }
        if (shortest[col] < lowest || (shortest[col] == lowest && row_for_col[col] < 0)) {
          lowest = shortest[col];
          best = it;
        }
      }
      if (best < 0 || !std::isfinite(lowest)) {
        throw Error(ErrorCode::InvalidCost, "no finite augmenting path (cost matrix is not finite)");
      }
      min_dist = lowest;
      const Index col = remaining[best];
      col_visited[col] = 1;
      remaining[best] = remaining[--num_remaining];
      if (row_for_col[col] < 0) {
        sink = col;
      } else {
        row = row_for_col[col];
      }
    }

    row_dual[current] += min_dist;
    for (Index i = 0; i < n; ++i) {
      if (row_visited[i] && i != current) row_dual[i] += min_dist - shortest[col_for_row[i]];
    }
    for (Index j = 0; j < n; ++j) {
      if (col_visited[j]) col_dual[j] -= min_dist - shortest[j];
    }

    for (Index col = sink;;) {
      const Index r = path[col];
      row_for_col[col] = r;
      std::swap(col_for_row[r], col);
      if (r == current) break;
    }
  }
  return col_for_row;
}

template <class CostFn>
Assignment finish(std::vector<Index> perm, CostFn&& cost) {
  Assignment out;
  out.perm = std::move(perm);
  for (Index i = 0; i < static_cast<Index>(out.perm.size()); ++i) out.total_cost += cost(i, out.perm[i]);
  return out;
}

template <CostMetric M>
Assignment solve_points(const PointSet& sources, const PointSet& targets) {
  const Index d = sources.dim();
  auto cost = [&](Index i, Index j) { return point_cost(M, sources.row_ptr(i), targets.row_ptr(j), d); };
  return finish(augment_all_rows(sources.size(), cost), cost);
}

}  // namespace

Assignment solve_assignment(const Matrix& costs) {
  if (costs.rows() != costs.cols()) {
    throw Error(ErrorCode::SizeMismatch, "cost matrix must be square, got " + std::to_string(costs.rows()) + "x" +
                                             std::to_string(costs.cols()));
  }
  const Index n = costs.rows();
  check_size(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double c = costs(i, j);
      if (std::isnan(c)) {
        throw Error(ErrorCode::InvalidCost, "NaN cost at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      if (!std::isfinite(c) || c < 0.0) {
        throw Error(ErrorCode::InvalidCost, "cost at (" + std::to_string(i) + ", " + std::to_string(j) +
                                                ") must be finite and non-negative");
      }
    }
  }
  auto cost = [&](Index i, Index j) { return costs(i, j); };
  return finish(augment_all_rows(n, cost), cost);
}

Assignment solve_assignment(const CostMatrix& costs) { return solve_assignment(costs.values); }

Assignment solve_assignment(const PointSet& sources, const PointSet& targets, CostMetric metric) {
  require_same_shape(sources, targets, "solve_assignment");
  check_size(sources.size());
  switch (metric) {
    case CostMetric::SquaredEuclidean: return solve_points<CostMetric::SquaredEuclidean>(sources, targets);
    case CostMetric::Euclidean: return solve_points<CostMetric::Euclidean>(sources, targets);
    case CostMetric::L1: return solve_points<CostMetric::L1>(sources, targets);
  }
  throw Error(ErrorCode::UnsupportedMetric, "unknown cost metric");
}

bool is_permutation(const std::vector<Index>& perm) {
  std::vector<char> seen(perm.size(), 0);
  for (Index p : perm) {
    if (p < 0 || p >= static_cast<Index>(perm.size()) || seen[p]) return false;
    seen[p] = 1;
  }
  return true;
}

}  // namespace otmap::ot
