#include "otmap/mappers/prior.hpp"

#include "otmap/error.hpp"

#include <sstream>

namespace otmap::mappers {

void validate(const PriorSpec& spec) {
  if (!(spec.low < spec.high)) throw Error(ErrorCode::InvalidArgument, "prior requires low < high");
  if (spec.dim < 1) throw Error(ErrorCode::InvalidArgument, "prior dimension must be >= 1");
}

PriorSampler::PriorSampler(const PriorSpec& spec) : spec_(spec), rng_(spec.seed) { validate(spec_); }

PointSet PriorSampler::sample(Index k) {
  if (k < 1) throw Error(ErrorCode::InvalidCount, "prior sample size must be >= 1, got " + std::to_string(k));
  std::uniform_real_distribution<double> dist(spec_.low, spec_.high);
  Matrix out(k, spec_.dim);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < spec_.dim; ++j) out(i, j) = dist(rng_);
  }
  return PointSet(std::move(out));
}

std::string PriorSampler::state() const {
  std::ostringstream os;
  os << rng_;
  return os.str();
}

void PriorSampler::restore(const std::string& state) {
  std::istringstream is(state);
  is >> rng_;
  if (!is) throw Error(ErrorCode::ParseError, "invalid prior sampler state");
}

PointSet sample_prior(const PriorSpec& spec, Index k) {
  PriorSampler sampler(spec);
  return sampler.sample(k);
}

}  // namespace otmap::mappers
