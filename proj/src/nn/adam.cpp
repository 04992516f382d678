#include "otmap/nn/adam.hpp"

#include "otmap/error.hpp"

#include <cmath>

namespace otmap::nn {

template <class T>
AdamState<T> AdamState<T>::fresh(const Mlp<T>& net, AdamConfig config) {
  AdamState<T> s;
  s.config = config;
  for (const auto& layer : net.layers()) {
    s.m_weight.push_back(MatrixT<T>::Zero(layer.weight.rows(), layer.weight.cols()));
    s.v_weight.push_back(MatrixT<T>::Zero(layer.weight.rows(), layer.weight.cols()));
    s.m_bias.push_back(VectorT<T>::Zero(layer.bias.size()));
    s.v_bias.push_back(VectorT<T>::Zero(layer.bias.size()));
  }
  return s;
}

template <class T>
void adam_step(Mlp<T>& net, const Gradients<T>& grads, AdamState<T>& state, double lr) {
  if (!(lr > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning rate must be positive");
  auto& layers = net.layers();
  if (grads.weight.size() != layers.size() || grads.bias.size() != layers.size() ||
      state.m_weight.size() != layers.size()) {
    throw Error(ErrorCode::SizeMismatch, "gradient/state layer count does not match the network");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (grads.weight[l].rows() != layers[l].weight.rows() || grads.weight[l].cols() != layers[l].weight.cols() ||
        grads.bias[l].size() != layers[l].bias.size()) {
      throw Error(ErrorCode::SizeMismatch, "gradient shape mismatch at layer " + std::to_string(l));
    }
  }
  if (!grads.all_finite()) {
    throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient at Adam step " + std::to_string(state.t + 1));
  }

  state.t += 1;
  const double b1 = state.config.beta1;
  const double b2 = state.config.beta2;
  const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(b1, static_cast<double>(state.t))));
  const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(b2, static_cast<double>(state.t))));
  const T tb1 = static_cast<T>(b1), tb2 = static_cast<T>(b2);
  const T step = static_cast<T>(lr);
  const T eps = static_cast<T>(state.config.eps);

  auto apply = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m = tb1 * m + (T(1) - tb1) * g;
    v = tb2 * v + (T(1) - tb2) * g.cwiseProduct(g);
    theta.array() -= step * (m.array() * c1) / ((v.array() * c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    apply(layers[l].weight, grads.weight[l], state.m_weight[l], state.v_weight[l]);
    apply(layers[l].bias, grads.bias[l], state.m_bias[l], state.v_bias[l]);
  }
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(Mlp<float>&, const Gradients<float>&, AdamState<float>&, double);
template void adam_step<double>(Mlp<double>&, const Gradients<double>&, AdamState<double>&, double);

}  // namespace otmap::nn
