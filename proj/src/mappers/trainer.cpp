#include "otmap/mappers/trainer.hpp"

#include "otmap/error.hpp"
#include "otmap/mappers/diversity.hpp"
#include "otmap/ot/divergence.hpp"
#include "otmap/rng.hpp"

#include <numeric>

namespace otmap::mappers {
namespace {

// Sub-stream ids for derive_seed.
constexpr std::uint64_t kBatchStream = 1;
constexpr std::uint64_t kPairStream = 2;

void validate_config(const TrainConfig& cfg) {
  if (cfg.steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be >= 0");
  if (cfg.batch_k < 1) throw Error(ErrorCode::InvalidArgument, "batch size must be >= 1");
  if (!(cfg.lr > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  if (!(cfg.lambda_div >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  validate(cfg.prior);
}

template <class T>
void require_net_dims(const nn::Mlp<T>& net, Index in_dim, Index out_dim) {
  if (net.input_dim() != in_dim || net.output_dim() != out_dim) {
    throw Error(ErrorCode::SizeMismatch, "network maps " + std::to_string(net.input_dim()) + " -> " +
                                             std::to_string(net.output_dim()) + " but the run needs " +
                                             std::to_string(in_dim) + " -> " + std::to_string(out_dim));
  }
}

double mean_squared_distance(const nn::MatrixT<double>& a, const Matrix& b) {
  return (a - b).rowwise().squaredNorm().sum() / static_cast<double>(a.rows());
}

}  // namespace

PoolSampler::PoolSampler(PointSet pool, std::uint64_t seed)
    : pool_(std::move(pool)), rng_(seed), order_(static_cast<std::size_t>(pool_.size())), cursor_(pool_.size()) {
  std::iota(order_.begin(), order_.end(), Index{0});
}

PointSet PoolSampler::operator()(Index k) {
  if (k < 1 || k > pool_.size()) {
    throw Error(ErrorCode::InvalidArgument, "batch of " + std::to_string(k) + " from a pool of " +
                                                std::to_string(pool_.size()));
  }
  if (pool_.size() - cursor_ < k) {
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
  }
  std::vector<Index> picked(order_.begin() + cursor_, order_.begin() + cursor_ + k);
  cursor_ += k;
  return pool_.select(picked);
}

namespace {

template <class T>
std::pair<double, nn::Gradients<T>> objective_from_trace(const nn::Mlp<T>& net, const nn::ForwardTrace<T>& trace,
                                                         const PointSet& predictions, const PointSet& targets,
                                                         const ot::Assignment& sigma, double lambda_div,
                                                         std::uint64_t pair_seed) {
  require_same_shape(predictions, targets, "otgen_objective");
  double loss = ot::matched_mean_distance(predictions, targets, sigma, ot::CostMetric::SquaredEuclidean);
  Matrix grad = ot::assignment_cost_gradient(predictions, targets, sigma, ot::CostMetric::SquaredEuclidean);
  if (lambda_div > 0.0) {
    const auto div = diversity_penalty(predictions, targets, pair_seed);
    loss += lambda_div * div.value;
    grad += lambda_div * div.gradient;
  }
  nn::MatrixT<T> out_grad = grad.template cast<T>();
  return {loss, net.backward(trace, out_grad)};
}

}  // namespace

template <class T>
std::pair<double, nn::Gradients<T>> otgen_objective(const nn::Mlp<T>& net, const PointSet& noise,
                                                    const PointSet& targets, const ot::Assignment& sigma,
                                                    double lambda_div, std::uint64_t pair_seed) {
  const auto trace = net.forward_trace(nn::to_batch<T>(noise));
  const PointSet predictions = nn::to_points<T>(trace.output());
  return objective_from_trace(net, trace, predictions, targets, sigma, lambda_div, pair_seed);
}

template <class T>
TrainResult<T> train_ottrans(const PointSet& targets, const TrainConfig& cfg, nn::Mlp<T> net,
                             const StepObserver<T>& observer) {
  validate_config(cfg);
  const Index m = targets.size();
  if (m > ot::kMaxAssignmentSize) {
    throw Error(ErrorCode::PoolTooLarge, "transport pool of " + std::to_string(m) + " exceeds " +
                                             std::to_string(ot::kMaxAssignmentSize));
  }
  if (cfg.batch_k > m) {
    throw Error(ErrorCode::InvalidArgument, "batch size " + std::to_string(cfg.batch_k) +
                                                " exceeds the transport pool of " + std::to_string(m));
  }
  require_net_dims(net, cfg.prior.dim, targets.dim());

  PriorSampler prior(cfg.prior);
  const PointSet noise = prior.sample(m);
  const ot::Assignment sigma = ot::solve_assignment(noise, targets, cfg.cost);
  const PointSet matched = targets.select(sigma.perm);

  TrainResult<T> result{std::move(net), {}, {}, {}, sigma.perm, {}};
  result.adam = nn::AdamState<T>::fresh(result.net, cfg.adam);
  result.losses.reserve(static_cast<std::size_t>(cfg.steps));

  std::mt19937_64 rng(derive_seed(cfg.seed, kBatchStream));
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<Index> batch_idx(static_cast<std::size_t>(cfg.batch_k));
  const double k = static_cast<double>(cfg.batch_k);

  for (int step = 0; step < cfg.steps; ++step) {
    // Partial Fisher-Yates: the first batch_k entries form a uniform subset.
    for (Index i = 0; i < cfg.batch_k; ++i) {
      std::uniform_int_distribution<Index> pick(i, m - 1);
      std::swap(order[i], order[pick(rng)]);
      batch_idx[i] = order[i];
    }
    const PointSet batch_noise = noise.select(batch_idx);
    const PointSet batch_targets = matched.select(batch_idx);
    const auto trace = result.net.forward_trace(nn::to_batch<T>(batch_noise));

    const nn::MatrixT<double> out64 = trace.output().template cast<double>();
    const double loss = mean_squared_distance(out64, batch_targets.data());
    const nn::MatrixT<double> grad64 = (2.0 / k) * (out64 - batch_targets.data());
    nn::MatrixT<T> out_grad = grad64.template cast<T>();
    const auto grads = result.net.backward(trace, out_grad);
    nn::adam_step(result.net, grads, result.adam, cfg.lr);

    result.losses.push_back(loss);
    if (observer) observer(StepInfo<T>{step, loss, result.net, batch_noise, batch_targets});
  }
  result.prior_state = prior.state();
  return result;
}

template <class T>
TrainResult<T> train_otgen(const TargetSampler& sampler, const TrainConfig& cfg, nn::Mlp<T> net,
                           const StepObserver<T>& observer) {
  validate_config(cfg);
  if (cfg.batch_k > ot::kMaxAssignmentSize) {
    throw Error(ErrorCode::PoolTooLarge, "batch size exceeds the dense solver limit");
  }
  if (cfg.lambda_div > 0.0 && cfg.batch_k < 2) {
    throw Error(ErrorCode::TooFewPoints, "diversity penalty needs batch size >= 2");
  }

  PriorSampler prior(cfg.prior);
  TrainResult<T> result{std::move(net), {}, {}, {}, {}, {}};
  result.adam = nn::AdamState<T>::fresh(result.net, cfg.adam);
  result.losses.reserve(static_cast<std::size_t>(cfg.steps));
  const std::uint64_t pair_base = derive_seed(cfg.seed, kPairStream);

  for (int step = 0; step < cfg.steps; ++step) {
    const PointSet targets = sampler(cfg.batch_k);
    if (targets.size() != cfg.batch_k) {
      throw Error(ErrorCode::SizeMismatch, "target sampler returned " + std::to_string(targets.size()) +
                                               " points, expected " + std::to_string(cfg.batch_k));
    }
    if (step == 0) require_net_dims(result.net, cfg.prior.dim, targets.dim());
    const PointSet noise = prior.sample(cfg.batch_k);
    const auto trace = result.net.forward_trace(nn::to_batch<T>(noise));
    const PointSet predictions = nn::to_points<T>(trace.output());
    const ot::Assignment sigma = ot::solve_assignment(predictions, targets, cfg.cost);

    const std::uint64_t pair_seed = derive_seed(pair_base, static_cast<std::uint64_t>(step));
    auto [loss, grads] =
        objective_from_trace(result.net, trace, predictions, targets, sigma, cfg.lambda_div, pair_seed);
    if (cfg.cost == ot::CostMetric::SquaredEuclidean && cfg.lambda_div == 0.0) {
      loss = sigma.total_cost / static_cast<double>(cfg.batch_k);
    }

    if (cfg.trace_every > 0 && step % cfg.trace_every == 0) {
      result.traces.push_back(FeedbackTrace{step, noise, predictions, targets, sigma, loss});
    }
    nn::adam_step(result.net, grads, result.adam, cfg.lr);
    result.losses.push_back(loss);
    if (observer) {
      const PointSet matched = targets.select(sigma.perm);
      observer(StepInfo<T>{step, loss, result.net, noise, matched});
    }
  }
  result.prior_state = prior.state();
  return result;
}

template <class T>
PointSet generate(const nn::Mlp<T>& net, const PriorSpec& prior, Index n) {
  if (n < 1) throw Error(ErrorCode::InvalidCount, "generate needs n >= 1, got " + std::to_string(n));
  if (net.input_dim() != prior.dim) {
    throw Error(ErrorCode::SizeMismatch, "network input width " + std::to_string(net.input_dim()) +
                                             " differs from prior dimension " + std::to_string(prior.dim));
  }
  return nn::forward(net, sample_prior(prior, n));
}

#define OTMAP_INSTANTIATE(T)                                                                                  \
  template std::pair<double, nn::Gradients<T>> otgen_objective<T>(                                           \
      const nn::Mlp<T>&, const PointSet&, const PointSet&, const ot::Assignment&, double, std::uint64_t);    \
  template TrainResult<T> train_ottrans<T>(const PointSet&, const TrainConfig&, nn::Mlp<T>,                  \
                                           const StepObserver<T>&);                                          \
  template TrainResult<T> train_otgen<T>(const TargetSampler&, const TrainConfig&, nn::Mlp<T>,               \
                                         const StepObserver<T>&);                                            \
  template PointSet generate<T>(const nn::Mlp<T>&, const PriorSpec&, Index);

OTMAP_INSTANTIATE(float)
OTMAP_INSTANTIATE(double)

#undef OTMAP_INSTANTIATE

}  // namespace otmap::mappers
