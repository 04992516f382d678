#include "otmap/nn/mlp.hpp"

#include "otmap/error.hpp"

#include <cmath>
#include <random>

namespace otmap::nn {
namespace {

template <class T>
void apply_activation(const Activation& act, MatrixT<T>& z) {
  switch (act.kind) {
    case ActivationKind::Identity:
      return;
    case ActivationKind::LeakyReLU: {
      const T slope = static_cast<T>(act.slope);
      z = z.unaryExpr([slope](T x) { return x > T(0) ? x : slope * x; });
      return;
    }
    case ActivationKind::Sigmoid:
      z = z.unaryExpr([](T x) { return T(1) / (T(1) + std::exp(-x)); });
      return;
  }
}

// In-place multiply of `grad` by the activation derivative. `pre` is the
// pre-activation and `post` the activation output of the same layer.
template <class T>
void apply_derivative(const Activation& act, const MatrixT<T>& pre, const MatrixT<T>& post, MatrixT<T>& grad) {
  switch (act.kind) {
    case ActivationKind::Identity:
      return;
    case ActivationKind::LeakyReLU: {
      const T slope = static_cast<T>(act.slope);
      grad = grad.binaryExpr(pre, [slope](T g, T x) { return x > T(0) ? g : slope * g; });
      return;
    }
    case ActivationKind::Sigmoid:
      grad = grad.binaryExpr(post, [](T g, T s) { return g * s * (T(1) - s); });
      return;
  }
}

template <class T>
void require_input_width(const Mlp<T>& net, Index cols) {
  if (cols != net.input_dim()) {
    throw Error(ErrorCode::SizeMismatch, "batch has " + std::to_string(cols) + " columns, network expects " +
                                             std::to_string(net.input_dim()));
  }
}

}  // namespace

std::string to_string(const Activation& act) {
  switch (act.kind) {
    case ActivationKind::LeakyReLU: return "leaky_relu";
    case ActivationKind::Identity: return "identity";
    case ActivationKind::Sigmoid: return "sigmoid";
  }
  return "unknown";
}

double activate(const Activation& act, double x) {
  MatrixT<double> m(1, 1);
  m(0, 0) = x;
  apply_activation(act, m);
  return m(0, 0);
}

std::vector<LayerSpec> mlp_specs(Index in_dim, Index width, int depth, Index out_dim, Activation hidden,
                                 Activation output) {
  std::vector<LayerSpec> specs;
  Index prev = in_dim;
  for (int i = 0; i < depth; ++i) {
    specs.push_back({prev, width, hidden});
    prev = width;
  }
  specs.push_back({prev, out_dim, output});
  return specs;
}

void validate_specs(const std::vector<LayerSpec>& specs) {
  if (specs.empty()) throw Error(ErrorCode::SpecError, "network needs at least one layer");
  for (std::size_t l = 0; l < specs.size(); ++l) {
    const auto& s = specs[l];
    if (s.in_dim < 1 || s.out_dim < 1) {
      throw Error(ErrorCode::SpecError, "layer " + std::to_string(l) + " has a non-positive dimension");
    }
    if (s.activation.kind == ActivationKind::LeakyReLU && !(s.activation.slope > 0.0 && s.activation.slope < 1.0)) {
      throw Error(ErrorCode::SpecError, "layer " + std::to_string(l) + ": LeakyReLU slope must lie in (0, 1)");
    }
    if (l > 0 && specs[l - 1].out_dim != s.in_dim) {
      throw Error(ErrorCode::SpecError, "layer " + std::to_string(l - 1) + " outputs " +
                                            std::to_string(specs[l - 1].out_dim) + " but layer " + std::to_string(l) +
                                            " expects " + std::to_string(s.in_dim));
    }
  }
}

template <class T>
bool Gradients<T>::all_finite() const {
  for (const auto& w : weight) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : bias) {
    if (!b.allFinite()) return false;
  }
  return true;
}

template <class T>
Mlp<T>::Mlp(std::vector<LayerSpec> specs) {
  validate_specs(specs);
  layers_.reserve(specs.size());
  for (const auto& s : specs) {
    layers_.push_back({MatrixT<T>::Zero(s.out_dim, s.in_dim), VectorT<T>::Zero(s.out_dim), s});
  }
}

template <class T>
std::vector<LayerSpec> Mlp<T>::specs() const {
  std::vector<LayerSpec> out;
  for (const auto& layer : layers_) out.push_back(layer.spec);
  return out;
}

template <class T>
Index Mlp<T>::param_count() const noexcept {
  Index n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

template <class T>
bool Mlp<T>::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

template <class T>
typename Mlp<T>::Batch Mlp<T>::forward(const Batch& batch) const {
  require_input_width(*this, batch.cols());
  Batch act = batch;
  for (const auto& layer : layers_) {
    Batch z;
    z.noalias() = act * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    apply_activation(layer.spec.activation, z);
    act = std::move(z);
  }
  return act;
}

template <class T>
ForwardTrace<T> Mlp<T>::forward_trace(const Batch& batch) const {
  require_input_width(*this, batch.cols());
  const std::size_t depth = layers_.size();
  ForwardTrace<T> trace;
  trace.activations.resize(depth + 1);
  trace.pre.resize(depth);
  trace.activations[0] = batch;
  for (std::size_t l = 0; l < depth; ++l) {
    trace.pre[l].noalias() = trace.activations[l] * layers_[l].weight.transpose();
    trace.pre[l].rowwise() += layers_[l].bias.transpose();
    trace.activations[l + 1] = trace.pre[l];
    apply_activation(layers_[l].spec.activation, trace.activations[l + 1]);
  }
  return trace;
}

template <class T>
Gradients<T> Mlp<T>::backward(const Batch& batch, const Batch& output_grad) const {
  return backward(forward_trace(batch), output_grad);
}

template <class T>
Gradients<T> Mlp<T>::backward(const ForwardTrace<T>& trace, const Batch& output_grad) const {
  const std::size_t depth = layers_.size();
  if (trace.pre.size() != depth || trace.activations.size() != depth + 1) {
    throw Error(ErrorCode::SizeMismatch, "forward trace does not belong to this network");
  }
  const Index k = trace.activations[0].rows();
  if (output_grad.rows() != k || output_grad.cols() != output_dim()) {
    throw Error(ErrorCode::SizeMismatch,
                "output gradient must be " + std::to_string(k) + "x" + std::to_string(output_dim()));
  }
  Gradients<T> grads;
  grads.weight.resize(depth);
  grads.bias.resize(depth);
  Batch g = output_grad;
  for (std::size_t l = depth; l-- > 0;) {
    apply_derivative(layers_[l].spec.activation, trace.pre[l], trace.activations[l + 1], g);
    grads.weight[l].noalias() = g.transpose() * trace.activations[l];
    grads.bias[l] = g.colwise().sum().transpose();
    Batch next;
    next.noalias() = g * layers_[l].weight;
    g = std::move(next);
  }
  grads.input = std::move(g);
  return grads;
}

template <class T>
Gradients<T> Mlp<T>::zero_gradients() const {
  Gradients<T> grads;
  for (const auto& layer : layers_) {
    grads.weight.push_back(MatrixT<T>::Zero(layer.weight.rows(), layer.weight.cols()));
    grads.bias.push_back(VectorT<T>::Zero(layer.bias.size()));
  }
  return grads;
}

template <class T>
Mlp<T> init_mlp(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
  Mlp<T> net(specs);
  std::mt19937_64 rng(seed);
  for (auto& layer : net.layers()) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.spec.in_dim));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = static_cast<T>(dist(rng));
    }
  }
  return net;
}

template <class T>
MatrixT<T> to_batch(const PointSet& points) {
  return points.data().template cast<T>();
}

template <class T>
PointSet to_points(const MatrixT<T>& batch) {
  Matrix out = batch.template cast<double>();
  return PointSet(std::move(out));
}

template <class T>
PointSet forward(const Mlp<T>& net, const PointSet& batch) {
  return to_points<T>(net.forward(to_batch<T>(batch)));
}

template struct ForwardTrace<float>;
template struct ForwardTrace<double>;
template struct Gradients<float>;
template struct Gradients<double>;
template class Mlp<float>;
template class Mlp<double>;
template Mlp<float> init_mlp<float>(const std::vector<LayerSpec>&, std::uint64_t);
template Mlp<double> init_mlp<double>(const std::vector<LayerSpec>&, std::uint64_t);
template MatrixT<float> to_batch<float>(const PointSet&);
template MatrixT<double> to_batch<double>(const PointSet&);
template PointSet to_points<float>(const MatrixT<float>&);
template PointSet to_points<double>(const MatrixT<double>&);
template PointSet forward<float>(const Mlp<float>&, const PointSet&);
template PointSet forward<double>(const Mlp<double>&, const PointSet&);

}  // namespace otmap::nn
