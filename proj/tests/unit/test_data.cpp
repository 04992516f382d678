#include "otmap/data/csv.hpp"
#include "otmap/data/idx.hpp"
#include "otmap/data/synthetic.hpp"
#include "otmap/error.hpp"
#include "otmap/ot/divergence.hpp"

#include <doctest.h>
#include <zlib.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <fstream>
#include <sstream>

using namespace otmap;
using namespace otmap::data;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = OTMAP_FIXTURE_DIR;

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an otmap::Error");
  return ErrorCode::IoError;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("noiseless moons lie on their arcs") {
  const SyntheticSpec spec{SyntheticKind::Moons, 4, 0.0, 0.5, 1, AngleSampling::Uniform};
  const auto pts = make_moons(spec);
  const auto labels = synthetic_labels(4);
  for (Index i = 0; i < 4; ++i) {
    const double x = pts.data()(i, 0), y = pts.data()(i, 1);
    if (labels[i] == 0) {
      CHECK(std::abs(x * x + y * y - 1.0) < 1e-9);
      CHECK(y >= -1e-12);
    } else {
      CHECK(std::abs((1.0 - x) * (1.0 - x) + (0.5 - y) * (0.5 - y) - 1.0) < 1e-9);
      CHECK(y <= 0.5 + 1e-12);
    }
  }
}

TEST_CASE("class split") {
  const auto labels = synthetic_labels(3);
  CHECK(std::count(labels.begin(), labels.end(), 0) == 2);
  CHECK(std::count(labels.begin(), labels.end(), 1) == 1);
  CHECK(make_moons({SyntheticKind::Moons, 1, 0.05, 0.5, 0, AngleSampling::Uniform}).size() == 1);
}

TEST_CASE("noiseless circles have the two radii") {
  const SyntheticSpec spec{SyntheticKind::Circles, 101, 0.0, 0.3, 2, AngleSampling::Uniform};
  const auto pts = make_circles(spec);
  const auto labels = synthetic_labels(101);
  for (Index i = 0; i < 101; ++i) {
    const double r = pts.data().row(i).norm();
    CHECK(std::abs(r - (labels[i] == 0 ? 1.0 : 0.3)) < 1e-12);
  }
  auto bad = spec;
  bad.factor = 1.0;
  CHECK(code_of([&] { make_circles(bad); }) == ErrorCode::InvalidArgument);
  bad.factor = 0.5;
  bad.noise_sd = -1.0;
  CHECK(code_of([&] { make_circles(bad); }) == ErrorCode::InvalidArgument);
  bad.noise_sd = 0.0;
  bad.n = 0;
  CHECK(code_of([&] { make_circles(bad); }) == ErrorCode::InvalidCount);
}

TEST_CASE("nearly coincident circles are a thousandth apart") {
  const SyntheticSpec spec{SyntheticKind::Circles, 2000, 0.0, 0.999, 3, AngleSampling::Grid};
  const auto pts = make_circles(spec);
  std::vector<Index> outer(1000), inner(1000);
  std::iota(outer.begin(), outer.end(), Index{0});
  std::iota(inner.begin(), inner.end(), Index{1000});
  const double div = ot::ot_divergence(pts.select(inner), pts.select(outer));
  CHECK(div == doctest::Approx(0.001).epsilon(1e-6));
}

TEST_CASE("generators are deterministic per seed") {
  SyntheticSpec spec;
  spec.n = 500;
  spec.seed = 10;
  const auto a = make_synthetic(spec);
  CHECK(make_synthetic(spec).data() == a.data());
  spec.seed = 11;
  CHECK(make_synthetic(spec).data() != a.data());
  spec.kind = SyntheticKind::Circles;
  CHECK(make_synthetic(spec).data() != a.data());
  CHECK(parse_kind(to_string(SyntheticKind::Circles)) == SyntheticKind::Circles);
  CHECK_FALSE(parse_kind("spirals").has_value());
}

TEST_CASE("IDX fixture decodes to bytes over 255") {
  const auto batch = load_idx(kFixtures / "tiny-images.idx3-ubyte", kFixtures / "tiny-labels.idx1-ubyte");
  CHECK(batch.size() == 4);
  CHECK(batch.height == 2);
  CHECK(batch.width == 3);
  CHECK(batch.channels == 1);
  const unsigned char bytes[24] = {0, 255, 128, 1, 2, 3, 10, 20, 30, 40, 50, 60,
                                   255, 254, 253, 0, 0, 0, 7, 77, 177, 200, 100, 50};
  for (int i = 0; i < 24; ++i) CHECK(batch.pixels.data()[i] == static_cast<float>(bytes[i]) / 255.0f);
  CHECK(batch.labels == std::vector<std::uint8_t>{3, 1, 4, 1});
  const auto tail = batch.slice(2, 4);
  CHECK(tail.size() == 2);
  CHECK(tail.labels == std::vector<std::uint8_t>{4, 1});
  CHECK(tail.pixels(0, 0) == 1.0f);
}

TEST_CASE("IDX error paths") {
  TempDir dir("otmap_idx_test");
  const auto full = slurp(kFixtures / "tiny-images.idx3-ubyte");
  {
    std::ofstream(dir.path / "cut", std::ios::binary) << full.substr(0, full.size() - 1);
    std::ofstream(dir.path / "short_header", std::ios::binary) << full.substr(0, 6);
    std::string wrong = full;
    wrong[3] = 0x01;
    std::ofstream(dir.path / "magic", std::ios::binary) << wrong;
    std::string labels = slurp(kFixtures / "tiny-labels.idx1-ubyte");
    labels[7] = 3;
    std::ofstream(dir.path / "labels3", std::ios::binary) << labels.substr(0, labels.size() - 1);
  }
  CHECK(code_of([&] { load_idx(dir.path / "cut"); }) == ErrorCode::TruncatedFile);
  CHECK(code_of([&] { load_idx(dir.path / "short_header"); }) == ErrorCode::TruncatedFile);
  CHECK(code_of([&] { load_idx(dir.path / "magic"); }) == ErrorCode::BadMagic);
  CHECK(code_of([&] { load_idx(kFixtures / "tiny-images.idx3-ubyte", dir.path / "labels3"); }) ==
        ErrorCode::CountMismatch);
  CHECK(code_of([&] { load_idx(dir.path / "absent"); }) == ErrorCode::IoError);
}

TEST_CASE("gzip IDX and write round trip") {
  TempDir dir("otmap_idx_gz");
  const auto raw = slurp(kFixtures / "tiny-images.idx3-ubyte");
  gzFile gz = gzopen((dir.path / "img.gz").string().c_str(), "wb");
  REQUIRE(gz != nullptr);
  gzwrite(gz, raw.data(), static_cast<unsigned>(raw.size()));
  gzclose(gz);
  const auto plain = load_idx(kFixtures / "tiny-images.idx3-ubyte");
  const auto unzipped = load_idx(dir.path / "img.gz");
  CHECK(unzipped.pixels == plain.pixels);

  write_idx_images(dir.path / "copy", plain);
  CHECK(slurp(dir.path / "copy") == raw);
  write_idx_labels(dir.path / "labels", {3, 1, 4, 1});
  CHECK(slurp(dir.path / "labels") == slurp(kFixtures / "tiny-labels.idx1-ubyte"));
}

TEST_CASE("point CSV matches the golden file") {
  Matrix m(3, 2);
  m << 0.1, -2.5, 1e-7, 3.0, -0.3333333333333333, 12345.678;
  const PointSet pts(m);
  const std::vector<int> labels{0, 1, 1};
  std::ostringstream os;
  write_points_csv(os, pts, &labels);
  CHECK(os.str() == slurp(kFixtures / "points_golden.csv"));

  Matrix m3(1, 3);
  m3 << 1.0, 2.0, 3.0;
  std::ostringstream os3;
  write_points_csv(os3, PointSet(m3));
  CHECK(os3.str().substr(0, 9) == "x0,x1,x2\n");
}

TEST_CASE("point CSV round trip and parse errors") {
  TempDir dir("otmap_csv_test");
  SyntheticSpec spec;
  spec.n = 50;
  const auto pts = make_synthetic(spec);
  const auto labels = synthetic_labels(50);
  write_points_csv(dir.path / "p.csv", pts, &labels);
  const auto back = read_points_csv(dir.path / "p.csv");
  CHECK(back.points.data() == pts.data());
  CHECK(back.labels == labels);

  { std::ofstream(dir.path / "bad.csv") << "x,y\n1,2\n3,oops\n"; }
  try {
    read_points_csv(dir.path / "bad.csv");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("bad.csv:3") != std::string::npos);
  }
  { std::ofstream(dir.path / "empty.csv") << ""; }
  CHECK(code_of([&] { read_points_csv(dir.path / "empty.csv"); }) == ErrorCode::ParseError);
  { std::ofstream(dir.path / "ragged.csv") << "x,y\n1,2,3\n"; }
  CHECK(code_of([&] { read_points_csv(dir.path / "ragged.csv"); }) == ErrorCode::ParseError);
}
