#pragma once

#include "otmap/data/idx.hpp"

#include <filesystem>

namespace otmap::io {

/// Writes the first rows*cols images of a single-channel batch as one binary
/// PGM (P5, maxval 255) grid; missing tiles stay black.
void write_pgm_grid(const std::filesystem::path& path, const data::ImageBatch& images, int rows, int cols);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;  // row-major
};

/// Parses a binary P5 file with maxval 255.
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace otmap::io
