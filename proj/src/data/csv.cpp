#include "otmap/data/csv.hpp"

#include "otmap/error.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace otmap::data {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && ptr == end;
}

}  // namespace

void write_points_csv(std::ostream& out, const PointSet& points, const std::vector<int>* labels) {
  const Index d = points.dim();
  for (Index j = 0; j < d; ++j) {
    if (j) out << ',';
    if (d == 2) {
      out << (j == 0 ? "x" : "y");
    } else {
      out << 'x' << j;
    }
  }
  if (labels) out << ",label";
  out << '\n' << std::setprecision(17);
  for (Index i = 0; i < points.size(); ++i) {
    for (Index j = 0; j < d; ++j) {
      if (j) out << ',';
      out << points.data()(i, j);
    }
    if (labels) out << ',' << (*labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

void write_points_csv(const std::filesystem::path& path, const PointSet& points, const std::vector<int>* labels) {
  if (labels && static_cast<Index>(labels->size()) != points.size()) {
    throw Error(ErrorCode::SizeMismatch, "label count differs from point count");
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_points_csv(out, points, labels);
}

PointsCsv read_points_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + ": empty file");

  const auto header = split(line);
  int label_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "label") label_col = static_cast<int>(j);
  }
  const std::size_t width = header.size();
  const std::size_t dim = width - (label_col >= 0 ? 1 : 0);
  if (dim == 0) throw Error(ErrorCode::ParseError, path.string() + ":1: no coordinate columns");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != width) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(width) + " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < width; ++j) {
      double v;
      if (!parse_double(fields[j], v)) {
        throw Error(ErrorCode::ParseError,
                    path.string() + ":" + std::to_string(line_no) + ": bad number '" + fields[j] + "'");
      }
      if (static_cast<int>(j) == label_col) {
        labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
  }
  const Index n = static_cast<Index>(values.size() / dim);
  if (n == 0) throw Error(ErrorCode::ParseError, path.string() + ": no data rows");
  Matrix m = Eigen::Map<Matrix>(values.data(), n, static_cast<Index>(dim));
  try {
    return PointsCsv{PointSet(std::move(m)), std::move(labels)};
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace otmap::data
