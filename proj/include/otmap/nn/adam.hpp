#pragma once

#include "otmap/nn/mlp.hpp"

#include <cstdint>

namespace otmap::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moment buffers shaped like the network parameters.
template <class T>
struct AdamState {
  AdamConfig config;
  std::int64_t t = 0;
  std::vector<MatrixT<T>> m_weight, v_weight;
  std::vector<VectorT<T>> m_bias, v_bias;

  static AdamState fresh(const Mlp<T>& net, AdamConfig config = {});
};

/// One bias-corrected Adam update of every parameter, in place.
///
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
///   theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
///
/// Throws NonFiniteGradient (leaving net and state untouched) if any gradient
/// entry is NaN or infinite, and InvalidArgument for lr <= 0.
template <class T>
void adam_step(Mlp<T>& net, const Gradients<T>& grads, AdamState<T>& state, double lr);

}  // namespace otmap::nn
