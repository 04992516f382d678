#include "otmap/data/synthetic.hpp"

#include "otmap/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace otmap::data {
namespace {

void validate(const SyntheticSpec& spec) {
  if (spec.n < 1) throw Error(ErrorCode::InvalidCount, "synthetic dataset needs n >= 1");
  if (!(spec.noise_sd >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_sd must be >= 0");
}

// Parameter values for `count` points over [lo, hi] (Grid) or [lo, hi) (Uniform).
std::vector<double> draw_params(Index count, double lo, double hi, bool closed, AngleSampling mode,
                                std::mt19937_64& rng) {
  std::vector<double> t(static_cast<std::size_t>(count));
  if (mode == AngleSampling::Grid) {
    const Index steps = closed ? count - 1 : count;
    for (Index i = 0; i < count; ++i) {
      t[i] = steps > 0 ? lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps) : lo;
    }
  } else {
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : t) v = dist(rng);
  }
  return t;
}

void add_noise(Matrix& points, double sd, std::mt19937_64& rng) {
  if (sd == 0.0) return;
  std::normal_distribution<double> dist(0.0, sd);
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) points(i, j) += dist(rng);
  }
}

}  // namespace

std::string_view to_string(SyntheticKind kind) noexcept {
  return kind == SyntheticKind::Moons ? "moons" : "circles";
}

std::optional<SyntheticKind> parse_kind(std::string_view name) noexcept {
  if (name == "moons") return SyntheticKind::Moons;
  if (name == "circles") return SyntheticKind::Circles;
  return std::nullopt;
}

PointSet make_moons(const SyntheticSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  const Index n_upper = spec.n - spec.n / 2;
  const Index n_lower = spec.n / 2;
  const auto t_upper = draw_params(n_upper, 0.0, std::numbers::pi, true, spec.angles, rng);
  const auto t_lower = draw_params(n_lower, 0.0, std::numbers::pi, true, spec.angles, rng);
  Matrix points(spec.n, 2);
  for (Index i = 0; i < n_upper; ++i) {
    points(i, 0) = std::cos(t_upper[i]);
    points(i, 1) = std::sin(t_upper[i]);
  }
  for (Index i = 0; i < n_lower; ++i) {
    points(n_upper + i, 0) = 1.0 - std::cos(t_lower[i]);
    points(n_upper + i, 1) = 0.5 - std::sin(t_lower[i]);
  }
  add_noise(points, spec.noise_sd, rng);
  return PointSet(std::move(points));
}

PointSet make_circles(const SyntheticSpec& spec) {
  validate(spec);
  if (!(spec.factor > 0.0 && spec.factor < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "circles factor must lie in (0, 1)");
  }
  std::mt19937_64 rng(spec.seed);
  const Index n_outer = spec.n - spec.n / 2;
  const Index n_inner = spec.n / 2;
  const double two_pi = 2.0 * std::numbers::pi;
  const auto a_outer = draw_params(n_outer, 0.0, two_pi, false, spec.angles, rng);
  const auto a_inner = draw_params(n_inner, 0.0, two_pi, false, spec.angles, rng);
  Matrix points(spec.n, 2);
  for (Index i = 0; i < n_outer; ++i) {
    points(i, 0) = std::cos(a_outer[i]);
    points(i, 1) = std::sin(a_outer[i]);
  }
  for (Index i = 0; i < n_inner; ++i) {
    points(n_outer + i, 0) = spec.factor * std::cos(a_inner[i]);
    points(n_outer + i, 1) = spec.factor * std::sin(a_inner[i]);
  }
  add_noise(points, spec.noise_sd, rng);
  return PointSet(std::move(points));
}

PointSet make_synthetic(const SyntheticSpec& spec) {
  return spec.kind == SyntheticKind::Moons ? make_moons(spec) : make_circles(spec);
}

std::vector<int> synthetic_labels(Index n) {
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (Index i = n - n / 2; i < n; ++i) labels[i] = 1;
  return labels;
}

}  // namespace otmap::data
