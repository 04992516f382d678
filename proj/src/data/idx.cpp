#include "otmap/data/idx.hpp"

#include "otmap/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <string>

namespace otmap::data {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kImageMagicChannels = 0x00000804;
constexpr std::uint32_t kLabelMagic = 0x00000801;

struct GzCloser {
  void operator()(gzFile_s* f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

class IdxReader {
 public:
  explicit IdxReader(const std::filesystem::path& path) : path_(path.string()), file_(gzopen(path_.c_str(), "rb")) {
    if (!std::filesystem::exists(path) || !file_) throw Error(ErrorCode::IoError, "cannot open " + path_);
  }

  void read(void* dst, std::size_t bytes, const char* what) {
    auto* out = static_cast<unsigned char*>(dst);
    std::size_t done = 0;
    while (done < bytes) {
      const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(bytes - done, 1u << 30));
      const int got = gzread(file_.get(), out + done, chunk);
      if (got < 0) throw Error(ErrorCode::IoError, "read error in " + path_);
      if (got == 0) break;
      done += static_cast<std::size_t>(got);
    }
    if (done != bytes) {
      throw Error(ErrorCode::TruncatedFile, path_ + ": expected " + std::to_string(bytes) + " bytes of " + what +
                                                ", got " + std::to_string(done));
    }
  }

  std::uint32_t read_be32(const char* what) {
    unsigned char b[4];
    read(b, 4, what);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  GzHandle file_;
};

void write_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                     static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

ImageBatch ImageBatch::slice(Index begin, Index end) const {
  if (begin < 0 || end > size() || begin >= end) {
    throw Error(ErrorCode::InvalidCount, "invalid image slice [" + std::to_string(begin) + ", " +
                                             std::to_string(end) + ") of " + std::to_string(size()));
  }
  ImageBatch out;
  out.pixels = pixels.middleRows(begin, end - begin);
  out.height = height;
  out.width = width;
  out.channels = channels;
  if (!labels.empty()) out.labels.assign(labels.begin() + begin, labels.begin() + end);
  return out;
}

ImageBatch load_idx(const std::filesystem::path& images, const std::optional<std::filesystem::path>& labels) {
  IdxReader in(images);
  const std::uint32_t magic = in.read_be32("magic");
  if (magic != kImageMagic && magic != kImageMagicChannels) {
    throw Error(ErrorCode::BadMagic, in.path() + ": image magic 0x" + [&] {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%08x", magic);
      return std::string(buf);
    }());
  }
  const std::uint32_t n = in.read_be32("image count");
  const std::uint32_t h = in.read_be32("row count");
  const std::uint32_t w = in.read_be32("column count");
  const std::uint32_t c = magic == kImageMagicChannels ? in.read_be32("channel count") : 1;
  if (n == 0 || h == 0 || w == 0 || c == 0) throw Error(ErrorCode::ParseError, in.path() + ": zero dimension");

  const std::size_t per_image = std::size_t{h} * w * c;
  std::vector<unsigned char> raw(per_image * n);
  in.read(raw.data(), raw.size(), "pixel data");

  ImageBatch batch;
  batch.height = static_cast<int>(h);
  batch.width = static_cast<int>(w);
  batch.channels = static_cast<int>(c);
  batch.pixels.resize(n, static_cast<Index>(per_image));
  float* dst = batch.pixels.data();
  for (std::size_t i = 0; i < raw.size(); ++i) dst[i] = static_cast<float>(raw[i]) / 255.0f;

  if (labels) {
    IdxReader lin(*labels);
    const std::uint32_t lmagic = lin.read_be32("magic");
    if (lmagic != kLabelMagic) throw Error(ErrorCode::BadMagic, lin.path() + ": not an IDX label file");
    const std::uint32_t ln = lin.read_be32("label count");
    if (ln != n) {
      throw Error(ErrorCode::CountMismatch,
                  std::to_string(n) + " images but " + std::to_string(ln) + " labels in " + lin.path());
    }
    batch.labels.resize(ln);
    lin.read(batch.labels.data(), ln, "labels");
  }
  return batch;
}

void write_idx_images(const std::filesystem::path& path, const ImageBatch& batch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const bool with_channels = batch.channels != 1;
  write_be32(out, with_channels ? kImageMagicChannels : kImageMagic);
  write_be32(out, static_cast<std::uint32_t>(batch.size()));
  write_be32(out, static_cast<std::uint32_t>(batch.height));
  write_be32(out, static_cast<std::uint32_t>(batch.width));
  if (with_channels) write_be32(out, static_cast<std::uint32_t>(batch.channels));
  std::vector<char> row(static_cast<std::size_t>(batch.pixel_count()));
  for (Index i = 0; i < batch.size(); ++i) {
    for (Index j = 0; j < batch.pixel_count(); ++j) {
      const float v = std::clamp(batch.pixels(i, j), 0.0f, 1.0f);
      row[j] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f)));
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_be32(out, kLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

}  // namespace otmap::data
