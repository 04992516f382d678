#include "otmap/io/pgm.hpp"

#include "otmap/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace otmap::io {

void write_pgm_grid(const std::filesystem::path& path, const data::ImageBatch& images, int rows, int cols) {
  if (images.channels != 1) throw Error(ErrorCode::InvalidArgument, "PGM grids need single-channel images");
  if (rows < 1 || cols < 1) throw Error(ErrorCode::InvalidCount, "grid needs at least one tile");
  const int h = images.height;
  const int w = images.width;
  const int width = cols * w;
  const int height = rows * h;
  std::vector<unsigned char> canvas(static_cast<std::size_t>(width) * height, 0);
  const Index tiles = std::min<Index>(images.size(), static_cast<Index>(rows) * cols);
  for (Index t = 0; t < tiles; ++t) {
    const int tr = static_cast<int>(t / cols);
    const int tc = static_cast<int>(t % cols);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const float v = std::clamp(images.pixels(t, y * w + x), 0.0f, 1.0f);
        canvas[static_cast<std::size_t>(tr * h + y) * width + tc * w + x] =
            static_cast<unsigned char>(std::lround(v * 255.0f));
      }
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(canvas.data()), static_cast<std::streamsize>(canvas.size()));
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string magic;
  GrayImage img;
  int maxval = 0;
  in >> magic >> img.width >> img.height >> maxval;
  if (magic != "P5") throw Error(ErrorCode::BadMagic, path.string() + " is not a binary PGM");
  if (!in || img.width < 1 || img.height < 1 || maxval != 255) {
    throw Error(ErrorCode::ParseError, path.string() + ": bad PGM header");
  }
  in.get();
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  if (!in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()))) {
    throw Error(ErrorCode::TruncatedFile, path.string() + ": pixel data truncated");
  }
  return img;
}

}  // namespace otmap::io
