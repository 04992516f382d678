#include "otmap/nn/checkpoint.hpp"

#include "otmap/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace otmap::nn {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'O', 'T', 'M', 'A', 'P', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

template <class Int>
void write_int(std::ostream& out, Int v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class Int>
Int read_int(std::istream& in, const std::string& what) {
  Int v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error(ErrorCode::TruncatedFile, what);
  return v;
}

template <class Mat>
void write_rowmajor(std::ostream& out, const Mat& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const float v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
}

template <class Mat>
void read_rowmajor(std::istream& in, Mat& m, const std::string& path) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      float v;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw Error(ErrorCode::TruncatedFile, "checkpoint " + path + " ends inside a parameter block");
      }
      m(r, c) = v;
    }
  }
}

nlohmann::json activation_json(const Activation& act) {
  nlohmann::json j = {{"kind", to_string(act)}};
  if (act.kind == ActivationKind::LeakyReLU) j["slope"] = act.slope;
  return j;
}

Activation activation_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaky_relu") return Activation::leaky_relu(j.at("slope").get<double>());
  if (kind == "identity") return Activation::identity();
  if (kind == "sigmoid") return Activation::sigmoid();
  throw Error(ErrorCode::ParseError, "unknown activation '" + kind + "'");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  nlohmann::json header;
  header["layers"] = nlohmann::json::array();
  for (const auto& s : ckpt.net.specs()) {
    header["layers"].push_back({{"in", s.in_dim}, {"out", s.out_dim}, {"activation", activation_json(s.activation)}});
  }
  if (ckpt.adam) {
    header["adam"] = {{"t", ckpt.adam->t},
                      {"beta1", ckpt.adam->config.beta1},
                      {"beta2", ckpt.adam->config.beta2},
                      {"eps", ckpt.adam->config.eps}};
  }
  header["rng_state"] = ckpt.rng_state;
  header["meta"] = ckpt.meta;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof kMagic);
  write_int<std::uint32_t>(out, kVersion);
  write_int<std::uint32_t>(out, sizeof(float));
  write_int<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& layer : ckpt.net.layers()) {
    write_rowmajor(out, layer.weight);
    write_rowmajor(out, layer.bias);
  }
  if (ckpt.adam) {
    for (std::size_t l = 0; l < ckpt.net.layers().size(); ++l) {
      write_rowmajor(out, ckpt.adam->m_weight[l]);
      write_rowmajor(out, ckpt.adam->v_weight[l]);
      write_rowmajor(out, ckpt.adam->m_bias[l]);
      write_rowmajor(out, ckpt.adam->v_bias[l]);
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open checkpoint " + path.string());
  const std::string where = "checkpoint " + path.string();
  char magic[8];
  if (!in.read(magic, sizeof magic)) throw Error(ErrorCode::TruncatedFile, where + " is shorter than its header");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error(ErrorCode::BadMagic, where + " has a bad magic");
  const auto version = read_int<std::uint32_t>(in, where);
  if (version != kVersion) {
    throw Error(ErrorCode::ParseError, where + " has unsupported version " + std::to_string(version));
  }
  const auto width = read_int<std::uint32_t>(in, where);
  if (width != sizeof(float)) throw Error(ErrorCode::ParseError, where + " stores unsupported scalar width");
  const auto header_len = read_int<std::uint64_t>(in, where);
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
    throw Error(ErrorCode::TruncatedFile, where + " ends inside the JSON header");
  }

  nlohmann::json header;
  std::vector<LayerSpec> specs;
  try {
    header = nlohmann::json::parse(text);
    for (const auto& l : header.at("layers")) {
      specs.push_back({l.at("in").get<Index>(), l.at("out").get<Index>(), activation_from_json(l.at("activation"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, where + ": " + e.what());
  }

  Checkpoint ckpt{Mlp<float>(specs), std::nullopt, header.value("rng_state", std::string{}),
                  header.value("meta", nlohmann::json::object())};
  for (auto& layer : ckpt.net.layers()) {
    read_rowmajor(in, layer.weight, path.string());
    read_rowmajor(in, layer.bias, path.string());
  }
  if (header.contains("adam")) {
    const auto& a = header["adam"];
    AdamConfig cfg{a.at("beta1").get<double>(), a.at("beta2").get<double>(), a.at("eps").get<double>()};
    auto state = AdamState<float>::fresh(ckpt.net, cfg);
    state.t = a.at("t").get<std::int64_t>();
    for (std::size_t l = 0; l < ckpt.net.layers().size(); ++l) {
      read_rowmajor(in, state.m_weight[l], path.string());
      read_rowmajor(in, state.v_weight[l], path.string());
      read_rowmajor(in, state.m_bias[l], path.string());
      read_rowmajor(in, state.v_bias[l], path.string());
    }
    ckpt.adam = std::move(state);
  }
  return ckpt;
}

}  // namespace otmap::nn
