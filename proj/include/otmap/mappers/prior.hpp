#pragma once

#include "otmap/point_set.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace otmap::mappers {

/// Uniform noise on [low, high)^dim.
struct PriorSpec {
  double low = -1.0;
  double high = 1.0;
  Index dim = 2;
  std::uint64_t seed = 0;
};

void validate(const PriorSpec& spec);

/// Stateful prior sampler: the i-th call returns the same points for the same seed.
class PriorSampler {
 public:
  explicit PriorSampler(const PriorSpec& spec);

  PointSet sample(Index k);

  const PriorSpec& spec() const noexcept { return spec_; }
  std::string state() const;
  void restore(const std::string& state);

 private:
  PriorSpec spec_;
  std::mt19937_64 rng_;
};

/// k draws from a freshly seeded sampler. Throws InvalidCount for k < 1.
PointSet sample_prior(const PriorSpec& spec, Index k);

}  // namespace otmap::mappers
