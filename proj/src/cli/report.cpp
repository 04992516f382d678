#include "otmap/cli/report.hpp"

#include "otmap/error.hpp"

#include <Eigen/Core>

#include <charconv>
#include <fstream>
#include <sstream>

namespace otmap::cli {
namespace {

nlohmann::json rows_json(const PointSet& s) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < s.size(); ++i) {
    out.push_back(std::vector<double>(s.data().row(i).begin(), s.data().row(i).end()));
  }
  return out;
}

PointSet rows_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, where + ": expected a non-empty array of points");
  const auto d = j.at(0).size();
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(d));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != d) {
      throw Error(ErrorCode::ParseError, where + ": point " + std::to_string(i) + " has the wrong dimension");
    }
    for (std::size_t c = 0; c < d; ++c) m(static_cast<Index>(i), static_cast<Index>(c)) = row[c].get<double>();
  }
  return PointSet(std::move(m));
}

}  // namespace

Report::Report(std::string command, std::string config, std::uint64_t seed) : start_(std::chrono::steady_clock::now()) {
  doc_["command"] = std::move(command);
  doc_["config"] = std::move(config);
  doc_["seed"] = seed;
  doc_["seeds"] = nlohmann::json::object();
  doc_["results"] = nlohmann::json::object();
  doc_["artifacts"] = nlohmann::json::object();
  doc_["versions"] = {{"otmap", OTMAP_VERSION},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"compiler", __VERSION__}};
}

void Report::artifact(const std::string& name, const std::filesystem::path& path) {
  doc_["artifacts"][name] = path.string();
}

const nlohmann::json& Report::write(const std::filesystem::path& path) {
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
  doc_["timing"] = {{"wall_seconds", elapsed.count()}};
  write_file_atomic(path, doc_.dump(2) + "\n");
  return doc_;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string loss_csv(const std::vector<double>& losses, const std::map<int, double>& estimates) {
  std::string out = "step,loss,divergence_estimate\n";
  for (std::size_t s = 0; s < losses.size(); ++s) {
    out += std::to_string(s) + ',' + format_double(losses[s]) + ',';
    if (auto it = estimates.find(static_cast<int>(s)); it != estimates.end()) out += format_double(it->second);
    out += '\n';
  }
  return out;
}

nlohmann::json traces_to_json(const std::vector<mappers::FeedbackTrace>& traces) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : traces) {
    out.push_back({{"step", t.step},
                   {"loss", t.loss},
                   {"noise", rows_json(t.noise)},
                   {"predictions", rows_json(t.predictions)},
                   {"targets", rows_json(t.targets)},
                   {"sigma", t.sigma.perm},
                   {"total_cost", t.sigma.total_cost}});
  }
  return out;
}

std::vector<mappers::FeedbackTrace> traces_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "feedback trace file must hold a JSON array");
  std::vector<mappers::FeedbackTrace> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "trace " + std::to_string(i);
    const auto& t = j[i];
    try {
      for (const char* key : {"step", "loss", "noise", "predictions", "targets", "sigma"}) {
        if (!t.contains(key)) throw Error(ErrorCode::ParseError, where + ": missing '" + key + "'");
      }
      mappers::FeedbackTrace tr{t.at("step").get<int>(),
                                rows_from_json(t.at("noise"), where + ".noise"),
                                rows_from_json(t.at("predictions"), where + ".predictions"),
                                rows_from_json(t.at("targets"), where + ".targets"),
                                {t.at("sigma").get<std::vector<Index>>(), t.value("total_cost", 0.0)},
                                t.at("loss").get<double>()};
      const Index k = tr.predictions.size();
      if (tr.noise.size() != k || tr.targets.size() != k || static_cast<Index>(tr.sigma.perm.size()) != k ||
          !ot::is_permutation(tr.sigma.perm)) {
        throw Error(ErrorCode::ParseError, where + ": sets and sigma must share k and sigma must be a permutation");
      }
      out.push_back(std::move(tr));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) throw;
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
  }
  return out;
}

std::string eval_csv(const std::vector<EvalRow>& rows) {
  std::string out = std::string(kEvalCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += r.method + ',' + r.dataset + ',' + format_double(r.divergence) + ',' + std::to_string(r.eval_n) + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (ss.str().empty()) throw Error(ErrorCode::ParseError, path.string() + ": empty file");
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace otmap::cli
