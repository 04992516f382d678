#pragma once

#include "otmap/point_set.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

namespace otmap::data {

/// Point CSV: a header line, then one point per line. Columns are "x,y" for
/// d = 2 and "x0,...,x{d-1}" otherwise, optionally followed by "label".
/// Values are printed with 17 significant digits so they round-trip exactly.
void write_points_csv(std::ostream& out, const PointSet& points, const std::vector<int>* labels = nullptr);
void write_points_csv(const std::filesystem::path& path, const PointSet& points,
                      const std::vector<int>* labels = nullptr);

struct PointsCsv {
  PointSet points;
  std::vector<int> labels;  // empty without a label column
};

/// Reads a point CSV. A "label" column, if named in the header, is split off.
/// Throws IoError, or ParseError naming the offending line.
PointsCsv read_points_csv(const std::filesystem::path& path);

}  // namespace otmap::data
