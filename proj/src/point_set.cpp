#include "otmap/point_set.hpp"

#include "otmap/error.hpp"

namespace otmap {

PointSet::PointSet(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw Error(ErrorCode::InvalidPointSet, "point set must have k >= 1 and d >= 1, got " + shape_string());
  }
  if (!data_.allFinite()) {
    throw Error(ErrorCode::InvalidPointSet, "point set " + shape_string() + " contains non-finite values");
  }
}

std::string PointSet::shape_string() const {
  return std::to_string(data_.rows()) + "x" + std::to_string(data_.cols());
}

void require_same_shape(const PointSet& a, const PointSet& b, const char* what) {
  if (a.size() != b.size() || a.dim() != b.dim()) {
    throw Error(ErrorCode::SizeMismatch,
                std::string(what) + ": shapes " + a.shape_string() + " and " + b.shape_string() + " differ");
  }
}

}  // namespace otmap
