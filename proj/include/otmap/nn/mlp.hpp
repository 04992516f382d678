#pragma once

#include "otmap/point_set.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace otmap::nn {

enum class ActivationKind { LeakyReLU, Identity, Sigmoid };

struct Activation {
  ActivationKind kind = ActivationKind::Identity;
  double slope = 0.01;  // LeakyReLU only

  static Activation leaky_relu(double slope = 0.01) { return {ActivationKind::LeakyReLU, slope}; }
  static Activation identity() { return {ActivationKind::Identity, 0.0}; }
  static Activation sigmoid() { return {ActivationKind::Sigmoid, 0.0}; }

  friend bool operator==(const Activation&, const Activation&) = default;
};

std::string to_string(const Activation& act);

struct LayerSpec {
  Index in_dim = 0;
  Index out_dim = 0;
  Activation activation;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// `depth` hidden layers of `width` with LeakyReLU, then a linear output layer.
std::vector<LayerSpec> mlp_specs(Index in_dim, Index width, int depth, Index out_dim,
                                 Activation hidden = Activation::leaky_relu(),
                                 Activation output = Activation::identity());

/// Throws SpecError unless dims are positive, LeakyReLU slopes lie in (0, 1),
/// and each layer's out_dim equals the next layer's in_dim.
void validate_specs(const std::vector<LayerSpec>& specs);

template <class T>
using MatrixT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using VectorT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
struct DenseLayer {
  MatrixT<T> weight;  // out x in
  VectorT<T> bias;    // out
  LayerSpec spec;
};

/// Per-layer parameter gradients, plus the gradient with respect to the input batch.
template <class T>
struct Gradients {
  std::vector<MatrixT<T>> weight;
  std::vector<VectorT<T>> bias;
  MatrixT<T> input;  // k x in_dim

  bool all_finite() const;
};

/// Intermediates of one forward pass: activations[l] feeds layer l (the last
/// entry is the network output), pre[l] is layer l's affine output.
template <class T>
struct ForwardTrace {
  std::vector<MatrixT<T>> activations;
  std::vector<MatrixT<T>> pre;

  const MatrixT<T>& output() const { return activations.back(); }
};

/// Dense feed-forward network. Batches are k x d with one sample per row.
template <class T>
class Mlp {
 public:
  using Scalar = T;
  using Batch = MatrixT<T>;

  /// Zero-initialized parameters with the given layout.
  explicit Mlp(std::vector<LayerSpec> specs);

  const std::vector<DenseLayer<T>>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer<T>>& layers() noexcept { return layers_; }
  std::vector<LayerSpec> specs() const;

  Index input_dim() const noexcept { return layers_.front().spec.in_dim; }
  Index output_dim() const noexcept { return layers_.back().spec.out_dim; }
  Index param_count() const noexcept;

  Batch forward(const Batch& batch) const;
  ForwardTrace<T> forward_trace(const Batch& batch) const;

  /// Analytic gradients of sum(output_grad .* forward(batch)).
  Gradients<T> backward(const Batch& batch, const Batch& output_grad) const;
  Gradients<T> backward(const ForwardTrace<T>& trace, const Batch& output_grad) const;

  /// Zero-filled gradients with the network's parameter shapes.
  Gradients<T> zero_gradients() const;

  /// Copy of the network in another scalar type.
  template <class U>
  Mlp<U> cast() const {
    Mlp<U> out(specs());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      out.layers()[l].weight = layers_[l].weight.template cast<U>();
      out.layers()[l].bias = layers_[l].bias.template cast<U>();
    }
    return out;
  }

  bool all_finite() const;

 private:
  std::vector<DenseLayer<T>> layers_;
};

/// Uniform fan-in initialization in +-sqrt(6 / fan_in), zero biases.
/// Deterministic per seed; the float and double variants draw the same values.
template <class T>
Mlp<T> init_mlp(const std::vector<LayerSpec>& specs, std::uint64_t seed);

/// Element-wise activation, exposed for tests.
double activate(const Activation& act, double x);

/// PointSet <-> network batch conversions.
template <class T>
MatrixT<T> to_batch(const PointSet& points);
template <class T>
PointSet to_points(const MatrixT<T>& batch);

/// forward() on a PointSet; throws SizeMismatch when d differs from the input width.
template <class T>
PointSet forward(const Mlp<T>& net, const PointSet& batch);

extern template class Mlp<float>;
extern template class Mlp<double>;

}  // namespace otmap::nn
