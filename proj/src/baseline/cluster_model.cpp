#include "otmap/baseline/cluster_model.hpp"

#include "otmap/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <random>

namespace otmap::baseline {
namespace {

Index nearest_center(const PointSet& points, Index i, const Matrix& centers, double* dist_out = nullptr) {
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < centers.rows(); ++c) {
    const double d = (points.row(i) - centers.row(c)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

std::vector<Index> assign_all(const PointSet& points, const Matrix& centers) {
  std::vector<Index> out(static_cast<std::size_t>(points.size()));
  for (Index i = 0; i < points.size(); ++i) out[i] = nearest_center(points, i, centers);
  return out;
}

// Greedy k-means++: each new center is the best of 2 + ln(k) D^2-weighted
// candidates, judged by the resulting potential.
Matrix seed_plus_plus(const PointSet& points, Index k, std::mt19937_64& rng) {
  const Index n = points.size();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  Matrix centers(k, points.dim());
  std::uniform_int_distribution<Index> first(0, n - 1);
  centers.row(0) = points.row(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) d2[i] = (points.row(i) - centers.row(0)).squaredNorm();
  std::vector<double> trial_d2(d2.size()), best_d2(d2.size());
  for (Index c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Index chosen = -1;
    double best_potential = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      Index cand = first(rng);
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        cand = n - 1;
        for (Index i = 0; i < n; ++i) {
          target -= d2[i];
          if (target < 0.0) {
            cand = i;
            break;
          }
        }
      }
      double potential = 0.0;
      for (Index i = 0; i < n; ++i) {
        trial_d2[i] = std::min(d2[i], (points.row(i) - points.row(cand)).squaredNorm());
        potential += trial_d2[i];
      }
      if (potential < best_potential) {
        best_potential = potential;
        chosen = cand;
        best_d2.swap(trial_d2);
      }
    }
    centers.row(c) = points.row(chosen);
    d2.swap(best_d2);
  }
  return centers;
}

// Recomputes centers from the assignment; empty clusters move to the point
// farthest from its own center.
void update_centers(const PointSet& points, const std::vector<Index>& assignment, Matrix& centers) {
  const Index k = centers.rows();
  Matrix sums = Matrix::Zero(k, points.dim());
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < points.size(); ++i) {
    sums.row(assignment[i]) += points.row(i);
    ++counts[assignment[i]];
  }
  const Matrix old = centers;
  std::vector<char> taken(static_cast<std::size_t>(points.size()), 0);
  for (Index c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      continue;
    }
    Index far = -1;
    double far_d = -1.0;
    for (Index i = 0; i < points.size(); ++i) {
      if (taken[i]) continue;
      const double d = (points.row(i) - old.row(assignment[i])).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    taken[far] = 1;
    centers.row(c) = points.row(far);
  }
}

}  // namespace

double within_cluster_sse(const PointSet& points, const Matrix& centers, const std::vector<Index>& assignment) {
  double sse = 0.0;
  for (Index i = 0; i < points.size(); ++i) sse += (points.row(i) - centers.row(assignment[i])).squaredNorm();
  return sse;
}

KMeansFit kmeans_fit(const PointSet& points, Index k, int max_iters, std::uint64_t seed) {
  if (k < 1 || k > points.size()) {
    throw Error(ErrorCode::InvalidCount, "k-means needs 1 <= k <= " + std::to_string(points.size()) + ", got " +
                                             std::to_string(k));
  }
  std::mt19937_64 rng(seed);
  Matrix centers = seed_plus_plus(points, k, rng);
  KMeansFit fit;
  fit.assignment = assign_all(points, centers);
  for (int it = 0; it < max_iters; ++it) {
    update_centers(points, fit.assignment, centers);
    fit.sse_history.push_back(within_cluster_sse(points, centers, fit.assignment));
    fit.iterations = it + 1;
    auto next = assign_all(points, centers);
    if (next == fit.assignment) break;
    fit.assignment = std::move(next);
  }

  const Index n = points.size();
  const Index d = points.dim();
  ClusterModel& model = fit.model;
  model.means = Matrix::Zero(k, d);
  model.weights.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < n; ++i) {
    model.means.row(fit.assignment[i]) += points.row(i);
    ++counts[fit.assignment[i]];
  }
  model.covariances.assign(static_cast<std::size_t>(k), Eigen::MatrixXd::Zero(d, d));
  for (Index c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      model.means.row(c) /= static_cast<double>(counts[c]);
    } else {
      model.means.row(c) = centers.row(c);
    }
    model.weights[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
  }
  for (Index i = 0; i < n; ++i) {
    const Index c = fit.assignment[i];
    const Eigen::VectorXd delta = (points.row(i) - model.means.row(c)).transpose();
    model.covariances[c] += delta * delta.transpose();
  }
  for (Index c = 0; c < k; ++c) {
    if (counts[c] > 1) model.covariances[c] /= static_cast<double>(counts[c] - 1);
    else model.covariances[c].setZero();
    model.covariances[c] += kCovarianceRidge * Eigen::MatrixXd::Identity(d, d);
  }
  return fit;
}

void validate(const ClusterModel& model) {
  const Index k = model.clusters();
  if (k < 1 || model.dim() < 1) throw Error(ErrorCode::ModelError, "cluster model is empty");
  if (static_cast<Index>(model.weights.size()) != k || static_cast<Index>(model.covariances.size()) != k) {
    throw Error(ErrorCode::ModelError, "cluster model component counts disagree");
  }
  double total = 0.0;
  for (double w : model.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::ModelError, "negative or non-finite weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::ModelError, "weights sum to " + std::to_string(total));
  if (!model.means.allFinite()) throw Error(ErrorCode::ModelError, "non-finite cluster mean");
  for (const auto& cov : model.covariances) {
    if (cov.rows() != model.dim() || cov.cols() != model.dim()) {
      throw Error(ErrorCode::ModelError, "covariance shape does not match dimension");
    }
    if (!cov.allFinite() || (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw Error(ErrorCode::ModelError, "covariance is not finite and symmetric");
    }
  }
}

PointSet sample_cluster_model(const ClusterModel& model, Index n, std::uint64_t seed) {
  validate(model);
  if (n < 1) throw Error(ErrorCode::InvalidCount, "sample size must be >= 1");
  const Index d = model.dim();
  std::vector<Eigen::MatrixXd> factors;
  for (Index c = 0; c < model.clusters(); ++c) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(model.covariances[c]);
    Eigen::VectorXd diag = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || diag.minCoeff() < -kCovarianceRidge) {
      throw Error(ErrorCode::ModelError, "covariance of cluster " + std::to_string(c) + " is not PSD");
    }
    diag = diag.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd lower = ldlt.matrixL();
    Eigen::MatrixXd f = ldlt.transpositionsP().transpose() * (lower * diag.asDiagonal());
    factors.push_back(std::move(f));
  }

  std::mt19937_64 rng(seed);
  std::discrete_distribution<Index> pick(model.weights.begin(), model.weights.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(n, d);
  Eigen::VectorXd xi(d);
  for (Index i = 0; i < n; ++i) {
    const Index c = pick(rng);
    for (Index t = 0; t < d; ++t) xi[t] = normal(rng);
    out.row(i) = model.means.row(c) + (factors[c] * xi).transpose();
  }
  return PointSet(std::move(out));
}

nlohmann::json to_json(const ClusterModel& model) {
  nlohmann::json j;
  j["clusters"] = model.clusters();
  j["dim"] = model.dim();
  j["weights"] = model.weights;
  j["means"] = nlohmann::json::array();
  j["covariances"] = nlohmann::json::array();
  for (Index c = 0; c < model.clusters(); ++c) {
    std::vector<double> mean(model.means.row(c).begin(), model.means.row(c).end());
    j["means"].push_back(mean);
    nlohmann::json cov = nlohmann::json::array();
    for (Index r = 0; r < model.dim(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(model.dim()));
      for (Index t = 0; t < model.dim(); ++t) row[t] = model.covariances[c](r, t);
      cov.push_back(row);
    }
    j["covariances"].push_back(cov);
  }
  return j;
}

ClusterModel cluster_model_from_json(const nlohmann::json& j) {
  try {
    ClusterModel model;
    const Index k = j.at("clusters").get<Index>();
    const Index d = j.at("dim").get<Index>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.means.resize(k, d);
    for (Index c = 0; c < k; ++c) {
      const auto mean = j.at("means").at(c).get<std::vector<double>>();
      if (static_cast<Index>(mean.size()) != d) throw Error(ErrorCode::ModelError, "mean has wrong dimension");
      for (Index t = 0; t < d; ++t) model.means(c, t) = mean[t];
      Eigen::MatrixXd cov(d, d);
      for (Index r = 0; r < d; ++r) {
        const auto row = j.at("covariances").at(c).at(r).get<std::vector<double>>();
        if (static_cast<Index>(row.size()) != d) throw Error(ErrorCode::ModelError, "covariance row width");
        for (Index t = 0; t < d; ++t) cov(r, t) = row[t];
      }
      model.covariances.push_back(std::move(cov));
    }
    validate(model);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("cluster model JSON: ") + e.what());
  }
}

}  // namespace otmap::baseline
