#include "otmap/error.hpp"
#include "otmap/nn/adam.hpp"
#include "otmap/nn/checkpoint.hpp"
#include "otmap/nn/mlp.hpp"
#include "support/net_params.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

using namespace otmap;
using namespace otmap::nn;
namespace fs = std::filesystem;

using otmap::testing::flatten;
using otmap::testing::unflatten;

namespace {

std::vector<otmap::testing::NaiveLayer> to_naive(const Mlp<double>& net) {
  std::vector<otmap::testing::NaiveLayer> out;
  for (const auto& layer : net.layers()) {
    otmap::testing::NaiveLayer n;
    n.w.assign(layer.weight.rows(), std::vector<double>(layer.weight.cols()));
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) n.w[r][c] = layer.weight(r, c);
    }
    n.b.assign(layer.bias.data(), layer.bias.data() + layer.bias.size());
    n.act = layer.spec.activation.kind == ActivationKind::Identity    ? 0
            : layer.spec.activation.kind == ActivationKind::LeakyReLU ? 1
                                                                      : 2;
    n.slope = layer.spec.activation.slope;
    out.push_back(std::move(n));
  }
  return out;
}

Activation pick_activation(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return Activation::leaky_relu(0.01);
    case 1: return Activation::identity();
    default: return Activation::sigmoid();
  }
}

// Random small network with random biases so every parameter matters.
Mlp<double> random_net(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> width(1, 5);
  const int depth = 1 + static_cast<int>(rng() % 3);
  std::vector<LayerSpec> specs;
  Index prev = width(rng);
  for (int l = 0; l < depth; ++l) {
    const Index next = width(rng);
    specs.push_back({prev, next, pick_activation(rng)});
    prev = next;
  }
  auto net = init_mlp<double>(specs, rng());
  std::normal_distribution<double> n(0.0, 0.5);
  for (auto& layer : net.layers()) {
    for (Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = n(rng);
  }
  return net;
}

template <class T>
bool bit_equal(const MatrixT<T>& a, const MatrixT<T>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(T) * static_cast<std::size_t>(a.size())) == 0;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an otmap::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("mapping network parameter count") {
  const Mlp<float> net(mlp_specs(2, 512, 4, 2));
  CHECK(net.param_count() == 790530);
  CHECK(net.layers().size() == 5);
  CHECK(net.layers().back().spec.activation == Activation::identity());
}

TEST_CASE("activations") {
  CHECK(activate(Activation::leaky_relu(0.01), 2.0) == 2.0);
  CHECK(activate(Activation::leaky_relu(0.01), -2.0) == doctest::Approx(-0.02));
  CHECK(activate(Activation::identity(), -3.5) == -3.5);
  CHECK(activate(Activation::sigmoid(), 0.0) == 0.5);
}

TEST_CASE("spec validation") {
  CHECK(code_of([] { validate_specs({}); }) == ErrorCode::SpecError);
  CHECK(code_of([] { validate_specs({{2, 3, Activation::identity()}, {4, 1, Activation::identity()}}); }) ==
        ErrorCode::SpecError);
  CHECK(code_of([] { validate_specs({{0, 3, Activation::identity()}}); }) == ErrorCode::SpecError);
  CHECK(code_of([] { validate_specs({{2, 3, Activation::leaky_relu(1.5)}}); }) == ErrorCode::SpecError);
}

TEST_CASE("initialization is seeded and bounded") {
  const auto specs = mlp_specs(3, 16, 2, 2);
  const auto a = init_mlp<double>(specs, 42);
  const auto b = init_mlp<double>(specs, 42);
  const auto c = init_mlp<double>(specs, 43);
  const auto f = init_mlp<float>(specs, 42);
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    const auto& w = a.layers()[l].weight;
    CHECK(bit_equal<double>(w, b.layers()[l].weight));
    CHECK_FALSE(bit_equal<double>(w, c.layers()[l].weight));
    CHECK(bit_equal<float>(w.cast<float>(), f.layers()[l].weight));
    const double bound = std::sqrt(6.0 / static_cast<double>(a.layers()[l].spec.in_dim));
    CHECK(w.cwiseAbs().maxCoeff() <= bound);
    CHECK(a.layers()[l].bias.isZero(0.0));
  }
}

TEST_CASE("forward pass matches a naive loop implementation") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto net = random_net(rng);
    const auto naive = to_naive(net);
    MatrixT<double> x(4, net.input_dim());
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    const auto y = net.forward(x);
    REQUIRE(y.cols() == net.output_dim());
    for (Index r = 0; r < 4; ++r) {
      std::vector<double> in(static_cast<std::size_t>(x.cols()));
      for (Index c = 0; c < x.cols(); ++c) in[c] = x(r, c);
      const auto expected = otmap::testing::naive_forward(naive, in);
      for (Index c = 0; c < y.cols(); ++c) CHECK(y(r, c) == doctest::Approx(expected[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward rejects the wrong input width") {
  const Mlp<double> net(mlp_specs(2, 4, 1, 1));
  CHECK(code_of([&] { net.forward(MatrixT<double>::Zero(3, 5)); }) == ErrorCode::SizeMismatch);
  CHECK(code_of([&] { nn::forward(net, PointSet(Matrix::Zero(3, 3))); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("backprop matches central finite differences") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  int cases = 0;
  for (int rep = 0; rep < 60; ++rep) {
    auto net = random_net(rng);
    const Index k = 3;
    MatrixT<double> x(k, net.input_dim());
    MatrixT<double> g(k, net.output_dim());
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
    for (Index i = 0; i < g.size(); ++i) g.data()[i] = n(rng);

    const auto grads = net.backward(x, g);
    auto loss_params = [&](const Eigen::VectorXd& theta) {
      Mlp<double> probe = net;
      unflatten(probe, theta);
      return (probe.forward(x).array() * g.array()).sum();
    };
    const auto fd = otmap::testing::central_difference(loss_params, flatten(net));
    CHECK(otmap::testing::max_relative_error(flatten(grads), fd) < 1e-4);

    auto loss_input = [&](const Eigen::VectorXd& xin) {
      MatrixT<double> xm = Eigen::Map<const MatrixT<double>>(xin.data(), k, net.input_dim());
      return (net.forward(xm).array() * g.array()).sum();
    };
    const Eigen::VectorXd xflat = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    const auto fd_in = otmap::testing::central_difference(loss_input, xflat);
    const Eigen::VectorXd an_in = Eigen::Map<const Eigen::VectorXd>(grads.input.data(), grads.input.size());
    CHECK(otmap::testing::max_relative_error(an_in, fd_in) < 1e-4);
    ++cases;
  }
  CHECK(cases >= 50);
}

TEST_CASE("backward from a trace equals backward from the batch") {
  std::mt19937_64 rng(4);
  const auto net = init_mlp<float>(mlp_specs(2, 8, 2, 2), 9);
  MatrixT<float> x = MatrixT<float>::Random(5, 2);
  MatrixT<float> g = MatrixT<float>::Random(5, 2);
  const auto a = net.backward(x, g);
  const auto b = net.backward(net.forward_trace(x), g);
  for (std::size_t l = 0; l < a.weight.size(); ++l) CHECK(bit_equal<float>(a.weight[l], b.weight[l]));
  CHECK(code_of([&] { net.backward(x, MatrixT<float>::Zero(4, 2)); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("Adam first step has magnitude lr in the gradient sign") {
  Mlp<double> net(mlp_specs(2, 3, 1, 1));
  auto state = AdamState<double>::fresh(net);
  auto grads = net.zero_gradients();
  grads.weight[0](0, 0) = 0.5;
  grads.weight[0](1, 1) = -2.0;
  grads.bias[1](0) = 1e-3;
  adam_step(net, grads, state, 0.1);
  CHECK(state.t == 1);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(-0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
  CHECK(net.layers()[0].weight(1, 1) == doctest::Approx(0.1 * 2.0 / (2.0 + 1e-8)).epsilon(1e-12));
  CHECK(net.layers()[1].bias(0) == doctest::Approx(-0.1 * 1e-3 / (1e-3 + 1e-8)).epsilon(1e-12));
  CHECK(net.layers()[0].weight(0, 1) == 0.0);

  // Second step against a hand-rolled reference.
  grads.weight[0](0, 0) = -1.0;
  const double m = 0.9 * 0.05 + 0.1 * -1.0;
  const double v = 0.999 * 0.00025 + 0.001 * 1.0;
  const double expected =
      net.layers()[0].weight(0, 0) - 0.1 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
  adam_step(net, grads, state, 0.1);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("Adam refuses non-finite gradients without side effects") {
  auto net = init_mlp<float>(mlp_specs(2, 3, 1, 1), 1);
  const auto before = net;
  auto state = AdamState<float>::fresh(net);
  auto grads = net.zero_gradients();
  grads.bias[0](1) = std::numeric_limits<float>::quiet_NaN();
  CHECK(code_of([&] { adam_step(net, grads, state, 1e-3); }) == ErrorCode::NonFiniteGradient);
  CHECK(state.t == 0);
  CHECK(bit_equal<float>(net.layers()[0].weight, before.layers()[0].weight));
  CHECK(state.m_bias[0].isZero(0.0f));
  CHECK(code_of([&] { adam_step(net, net.zero_gradients(), state, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Adam descends a quadratic") {
  // Fit a single linear unit to y = 3x - 1.
  Mlp<double> net(std::vector<LayerSpec>{{1, 1, Activation::identity()}});
  auto state = AdamState<double>::fresh(net);
  MatrixT<double> x(4, 1), y(4, 1);
  x << -1, 0, 1, 2;
  y = (3.0 * x.array() - 1.0).matrix();
  for (int i = 0; i < 3000; ++i) {
    const MatrixT<double> out = net.forward(x);
    adam_step(net, net.backward(x, (2.0 / 4.0) * (out - y)), state, 0.01);
  }
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(net.layers()[0].bias(0) == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("checkpoint round-trip is bit exact") {
  const fs::path dir = fs::temp_directory_path() / "otmap_ckpt_test";
  fs::create_directories(dir);
  auto net = init_mlp<float>(mlp_specs(2, 16, 2, 2, Activation::leaky_relu(0.02), Activation::sigmoid()), 5);
  net.layers()[1].bias.setConstant(0.25f);
  auto adam = AdamState<float>::fresh(net);
  MatrixT<float> x = MatrixT<float>::Random(8, 2);
  adam_step(net, net.backward(x, MatrixT<float>::Ones(8, 2)), adam, 1e-3);

  Checkpoint ckpt{net, adam, "12345 678", {{"algo", "otgen"}, {"seed", 7}}};
  save_checkpoint(dir / "a.ckpt", ckpt);
  const auto back = load_checkpoint(dir / "a.ckpt");
  REQUIRE(back.net.specs() == net.specs());
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    CHECK(bit_equal<float>(back.net.layers()[l].weight, net.layers()[l].weight));
    CHECK(bit_equal<float>(back.net.layers()[l].bias, net.layers()[l].bias));
    CHECK(bit_equal<float>(back.adam->m_weight[l], adam.m_weight[l]));
    CHECK(bit_equal<float>(back.adam->v_bias[l], adam.v_bias[l]));
  }
  CHECK(back.adam->t == 1);
  CHECK(back.rng_state == "12345 678");
  CHECK(back.meta.at("algo") == "otgen");

  // Header fields at their documented offsets.
  std::ifstream in(dir / "a.ckpt", std::ios::binary);
  char head[24];
  in.read(head, 24);
  CHECK(std::string(head, 8) == "OTMAPCKP");
  std::uint32_t version, width;
  std::memcpy(&version, head + 8, 4);
  std::memcpy(&width, head + 12, 4);
  CHECK(version == 1);
  CHECK(width == 4);

  Checkpoint plain{net, std::nullopt, "", nlohmann::json::object()};
  save_checkpoint(dir / "b.ckpt", plain);
  CHECK_FALSE(load_checkpoint(dir / "b.ckpt").adam.has_value());
  fs::remove_all(dir);
}

TEST_CASE("checkpoint error paths") {
  const fs::path dir = fs::temp_directory_path() / "otmap_ckpt_err";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.ckpt", std::ios::binary) << "NOTACKPTxxxxxxxxxxxxxxxxxxxxxxxxx";
  }
  CHECK(code_of([&] { load_checkpoint(dir / "bad.ckpt"); }) == ErrorCode::BadMagic);

  const auto net = init_mlp<float>(mlp_specs(2, 8, 1, 2), 1);
  save_checkpoint(dir / "full.ckpt", Checkpoint{net, std::nullopt, "", nlohmann::json::object()});
  const auto size = fs::file_size(dir / "full.ckpt");
  fs::copy_file(dir / "full.ckpt", dir / "cut.ckpt");
  fs::resize_file(dir / "cut.ckpt", size - 4);
  CHECK(code_of([&] { load_checkpoint(dir / "cut.ckpt"); }) == ErrorCode::TruncatedFile);
  fs::resize_file(dir / "cut.ckpt", 12);
  CHECK(code_of([&] { load_checkpoint(dir / "cut.ckpt"); }) == ErrorCode::TruncatedFile);
  CHECK(code_of([&] { load_checkpoint(dir / "missing.ckpt"); }) == ErrorCode::IoError);
  fs::remove_all(dir);
}
