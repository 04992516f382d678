#pragma once

#include "otmap/point_set.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <vector>

namespace otmap::baseline {

inline constexpr double kCovarianceRidge = 1e-6;

/// Mixture of Gaussians with one component per K-means cluster.
struct ClusterModel {
  std::vector<double> weights;               // occupancy fractions, sum to 1
  Matrix means;                              // clusters x d
  std::vector<Eigen::MatrixXd> covariances;  // d x d each

  Index clusters() const noexcept { return means.rows(); }
  Index dim() const noexcept { return means.cols(); }
};

struct KMeansFit {
  ClusterModel model;
  std::vector<Index> assignment;    // cluster of each input point
  std::vector<double> sse_history;  // within-cluster SSE after each center update
  int iterations = 0;
};

/// Within-cluster sum of squared distances.
double within_cluster_sse(const PointSet& points, const Matrix& centers, const std::vector<Index>& assignment);

/// Lloyd's algorithm with greedy k-means++ seeding, then per-cluster sample mean,
/// sample covariance (n - 1 denominator) plus kCovarianceRidge * I, and
/// occupancy weight. Stops after max_iters updates or when no assignment
/// changes. A cluster that empties is re-seeded at the point farthest from
/// its current center. Ties in nearest-center search go to the lower index.
///
/// Throws InvalidCount unless 1 <= k <= |points|.
KMeansFit kmeans_fit(const PointSet& points, Index k, int max_iters = 100, std::uint64_t seed = 0);

/// n draws: component chosen by weight, then mean + F xi with F F^T = cov
/// from a pivoted LDLT factorization. Throws ModelError if a covariance is
/// asymmetric or has a pivot below -kCovarianceRidge, InvalidCount for n < 1.
PointSet sample_cluster_model(const ClusterModel& model, Index n, std::uint64_t seed);

/// Checks weights, shapes and covariance symmetry; throws ModelError.
void validate(const ClusterModel& model);

nlohmann::json to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const nlohmann::json& j);

}  // namespace otmap::baseline
