#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace otmap {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A batch of k points in d dimensions, one point per row.
///
/// Construction validates the invariants: at least one point, at least one
/// dimension, and every coordinate finite.
class PointSet {
 public:
  explicit PointSet(Matrix data);

  Index size() const noexcept { return data_.rows(); }
  Index dim() const noexcept { return data_.cols(); }

  const Matrix& data() const noexcept { return data_; }
  auto row(Index i) const { return data_.row(i); }
  const double* row_ptr(Index i) const noexcept { return data_.data() + i * data_.cols(); }

  /// Rows selected by `indices`, in that order.
  template <class IndexRange>
  PointSet select(const IndexRange& indices) const {
    Matrix out(static_cast<Index>(std::size(indices)), dim());
    Index r = 0;
    for (auto i : indices) out.row(r++) = data_.row(static_cast<Index>(i));
    return PointSet(std::move(out));
  }

  std::string shape_string() const;

 private:
  Matrix data_;
};

/// Throws SizeMismatch unless both sets have the same k and d.
void require_same_shape(const PointSet& a, const PointSet& b, const char* what);

}  // namespace otmap
