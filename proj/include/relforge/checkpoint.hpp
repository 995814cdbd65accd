#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relforge/errors.hpp"
#include "relforge/tensor.hpp"

namespace relforge {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

inline constexpr const char* kCheckpointMagic = "RFCK1";
inline constexpr int kCheckpointFormatVersion = 1;

// Text header (magic line + one JSON line with component tag, hyperparameters
// and tensor shapes) followed by the flat little-endian double arrays in
// declared parameter order.
inline void save_checkpoint(const std::string& path, const std::string& component_tag,
                            const nlohmann::json& hyper,
                            const std::vector<ParamRef>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw model_error("cannot write checkpoint: " + path);
  nlohmann::json header;
  header["component"] = component_tag;
  header["format_version"] = kCheckpointFormatVersion;
  header["hyper"] = hyper;
  auto& tensors = header["tensors"] = nlohmann::json::array();
  for (const auto& p : params) {
    if (!p.tensor->all_finite())
      throw model_error("refusing to save non-finite tensor: " + p.name);
    tensors.push_back({{"name", p.name}, {"shape", p.tensor->shape}});
  }
  out << kCheckpointMagic << "\n" << header.dump() << "\n";
  for (const auto& p : params) {
    const auto& v = p.tensor->v;
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!out) throw model_error("I/O failure writing checkpoint: " + path);
}

// Loads into the given parameter list; shapes and the component tag are
// validated against the header. Returns the hyperparameter block.
inline nlohmann::json load_checkpoint(const std::string& path,
                                      const std::string& component_tag,
                                      const std::vector<ParamRef>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw model_error("cannot open checkpoint: " + path);
  std::string magic, header_line;
  if (!std::getline(in, magic) || magic != kCheckpointMagic)
    throw model_error("not a checkpoint file: " + path);
  if (!std::getline(in, header_line))
    throw model_error("truncated checkpoint header: " + path);
  nlohmann::json header = nlohmann::json::parse(header_line, nullptr, false);
  if (header.is_discarded()) throw model_error("corrupt checkpoint header: " + path);
  if (header.value("component", "") != component_tag)
    throw model_error("checkpoint " + path + " has component \"" +
                      header.value("component", "") + "\", expected \"" +
                      component_tag + "\"");
  if (header.value("format_version", -1) != kCheckpointFormatVersion)
    throw model_error("unsupported checkpoint format version in " + path);
  const auto& tensors = header.at("tensors");
  if (tensors.size() != params.size())
    throw model_error("checkpoint " + path + ": tensor count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto shape = tensors[i].at("shape").get<std::vector<std::size_t>>();
    if (tensors[i].at("name").get<std::string>() != params[i].name ||
        shape != params[i].tensor->shape)
      throw model_error("checkpoint " + path + ": shape mismatch for tensor \"" +
                        params[i].name + "\"");
  }
  for (const auto& p : params) {
    auto& v = p.tensor->v;
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(v.size() * sizeof(double)))
      throw model_error("truncated checkpoint data: " + path);
  }
  return header.at("hyper");
}

}  // namespace relforge
