#pragma once

#include "otmap/mappers/trainer.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace otmap::cli {

/// Builds the report JSON written by every command:
///
///   {"command", "config" (resolved TOML text), "seed", "seeds" {...},
///    "results" {...}, "artifacts" {name: path}, "timing" {"wall_seconds"},
///    "versions" {...}}
///
/// Only "timing" may differ between two runs of the same config.
class Report {
 public:
  Report(std::string command, std::string config, std::uint64_t seed);

  nlohmann::json& results() { return doc_["results"]; }
  nlohmann::json& seeds() { return doc_["seeds"]; }
  void artifact(const std::string& name, const std::filesystem::path& path);

  /// Stamps the wall clock and writes `path` atomically.
  const nlohmann::json& write(const std::filesystem::path& path);

 private:
  nlohmann::json doc_;
  std::chrono::steady_clock::time_point start_;
};

/// Writes `text` to a sibling temp file, then renames it over `path`, so a
/// failed command leaves no partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Loss CSV: header "step,loss,divergence_estimate"; one row per step;
/// divergence_estimate is empty except at steps present in `estimates`.
std::string loss_csv(const std::vector<double>& losses, const std::map<int, double>& estimates = {});

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// FeedbackTrace JSON: an array of objects
///   {"step": int, "loss": number, "noise": [[x, y], ...],
///    "predictions": [[...], ...], "targets": [[...], ...],
///    "sigma": [int, ...], "total_cost": number}
nlohmann::json traces_to_json(const std::vector<mappers::FeedbackTrace>& traces);

/// Parses the array above; throws ParseError naming the trace index and field.
std::vector<mappers::FeedbackTrace> traces_from_json(const nlohmann::json& j);

/// Eval table CSV header and one row: method,dataset,divergence,eval_n,seed.
inline constexpr const char* kEvalCsvHeader = "method,dataset,divergence,eval_n,seed";
struct EvalRow {
  std::string method;
  std::string dataset;
  double divergence;
  Index eval_n;
  std::uint64_t seed;
};
std::string eval_csv(const std::vector<EvalRow>& rows);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace otmap::cli
