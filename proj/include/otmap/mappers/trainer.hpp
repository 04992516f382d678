#pragma once

#include "otmap/mappers/prior.hpp"
#include "otmap/nn/adam.hpp"
#include "otmap/nn/mlp.hpp"
#include "otmap/ot/assignment.hpp"
#include "otmap/ot/cost.hpp"
#include "otmap/point_set.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace otmap::mappers {

struct TrainConfig {
  int steps = 10000;
  Index batch_k = 128;
  double lr = 3e-4;
  double lambda_div = 0.0;
  Index transport_pool_m = 4096;  // OTtrans pool size; callers draw this many targets
  PriorSpec prior;
  std::uint64_t seed = 0;  // minibatch order and diversity pair sampling
  ot::CostMetric cost = ot::CostMetric::SquaredEuclidean;  // assignment cost
  nn::AdamConfig adam;
  int trace_every = 0;  // record a FeedbackTrace every N steps; 0 disables
};

/// One OTgen step's noise, predictions, real batch and matching, for plotting.
struct FeedbackTrace {
  int step;
  PointSet noise;
  PointSet predictions;
  PointSet targets;
  ot::Assignment sigma;  // predictions[i] -> targets[sigma.perm[i]]
  double loss;
};

/// Read-only view handed to a StepObserver after every update.
/// `targets` is aligned with `inputs`: row i is the supervision for input i.
template <class T>
struct StepInfo {
  int step;
  double loss;
  const nn::Mlp<T>& net;  // after the update
  const PointSet& inputs;
  const PointSet& targets;
};
template <class T>
using StepObserver = std::function<void(const StepInfo<T>&)>;

template <class T>
struct TrainResult {
  nn::Mlp<T> net;
  nn::AdamState<T> adam;
  std::vector<double> losses;
  std::vector<FeedbackTrace> traces;
  std::vector<Index> pairing;  // OTtrans: noise i -> target pairing[i]
  std::string prior_state;
};

/// Source of real batches for OTgen.
using TargetSampler = std::function<PointSet(Index k)>;

/// Draws batches from a fixed pool without replacement, reshuffling the
/// whole pool once fewer than k unused points remain.
class PoolSampler {
 public:
  PoolSampler(PointSet pool, std::uint64_t seed);

  PointSet operator()(Index k);
  const PointSet& pool() const noexcept { return pool_; }

 private:
  PointSet pool_;
  std::mt19937_64 rng_;
  std::vector<Index> order_;
  Index cursor_;
};

/// Loss and parameter gradients of the OTgen objective
///   (1/k) sum_i |f(n_i) - z_sigma(i)|^2 + lambda * D(f(N), Z)
/// with sigma held fixed.
template <class T>
std::pair<double, nn::Gradients<T>> otgen_objective(const nn::Mlp<T>& net, const PointSet& noise,
                                                    const PointSet& targets, const ot::Assignment& sigma,
                                                    double lambda_div, std::uint64_t pair_seed = 0);

/// OTtrans: sample one noise set of |targets| points, solve a single exact
/// assignment from noise to targets, then regress minibatches of noise onto
/// their fixed matched targets with Adam for cfg.steps steps.
///
/// Throws PoolTooLarge when |targets| exceeds the dense solver limit,
/// InvalidArgument when batch_k > |targets|, SizeMismatch on dimension
/// mismatch, UnsupportedMetric if cfg.cost is not usable.
template <class T>
TrainResult<T> train_ottrans(const PointSet& targets, const TrainConfig& cfg, nn::Mlp<T> net,
                             const StepObserver<T>& observer = {});

/// OTgen: every step draws k real points and k noise points, predicts
/// P = f(N), solves an exact k x k assignment P -> Z and takes one Adam step
/// on the frozen-assignment objective. Records a FeedbackTrace every
/// cfg.trace_every steps.
template <class T>
TrainResult<T> train_otgen(const TargetSampler& sampler, const TrainConfig& cfg, nn::Mlp<T> net,
                           const StepObserver<T>& observer = {});

/// f(noise) for n fresh prior samples. Throws InvalidCount for n < 1.
template <class T>
PointSet generate(const nn::Mlp<T>& net, const PriorSpec& prior, Index n);

}  // namespace otmap::mappers
