#pragma once

#include "otmap/point_set.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace otmap::data {

using PixelMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n images flattened to rows of h*w*c values in [0, 1].
struct ImageBatch {
  PixelMatrix pixels;
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<std::uint8_t> labels;  // empty when no label file was given

  Index size() const noexcept { return pixels.rows(); }
  Index pixel_count() const noexcept { return pixels.cols(); }

  /// Rows [begin, end) with matching labels.
  ImageBatch slice(Index begin, Index end) const;
};

/// Reads an IDX unsigned-byte image file (magic 0x00000803, or 0x00000804
/// with a trailing channel dimension) and optionally the matching label file
/// (magic 0x00000801). Dimensions are big-endian u32. gzip-compressed files
/// are accepted transparently. Pixels are scaled by 1/255.
///
/// Errors: IoError (unreadable), BadMagic, TruncatedFile, CountMismatch.
ImageBatch load_idx(const std::filesystem::path& images,
                    const std::optional<std::filesystem::path>& labels = std::nullopt);

/// Writes an uncompressed IDX image file, rounding pixels * 255.
void write_idx_images(const std::filesystem::path& path, const ImageBatch& batch);
void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels);

}  // namespace otmap::data
