#include "pulsebench/nnet/checkpoint.hpp"

#include "../binary_io.hpp"
#include "pulsebench/error.hpp"
#include "pulsebench/formats.hpp"

#include <json.hpp>

namespace pulsebench::nnet {

using detail::ByteReader;
using detail::ByteWriter;

std::string encode_checkpoint(const Regressor& regressor) {
  const Model& model = regressor.model;
  ByteWriter w;
  w.magic("RNET");
  w.put<std::uint32_t>(kFormatVersion);
  const Shape in = model.input_shape();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(in.channels));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(in.height));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(in.width));
  w.put<double>(regressor.fs_ref);
  w.put<double>(regressor.target_offset);
  w.put<double>(regressor.target_scale);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.layers().size()));
  for (const Layer& layer : model.layers()) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.spec.kind));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.spec.in_channels));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.spec.out_channels));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.spec.kernel));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.weights.size()));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(layer.bias.size()));
    for (double v : layer.weights) w.put<float>(static_cast<float>(v));
    for (double v : layer.bias) w.put<float>(static_cast<float>(v));
  }
  return w.take();
}

Regressor decode_checkpoint(std::string_view bytes) {
  ByteReader r(bytes, "RNET");
  r.expect_header("RNET", kFormatVersion);
  Shape in;
  in.channels = static_cast<int>(r.get<std::uint32_t>());
  in.height = static_cast<int>(r.get<std::uint32_t>());
  in.width = static_cast<int>(r.get<std::uint32_t>());
  const double fs_ref = r.get<double>();
  const double offset = r.get<double>();
  const double scale = r.get<double>();
  const auto count = r.get<std::uint32_t>();
  std::vector<LayerSpec> specs;
  std::vector<std::vector<float>> weights, biases;
  for (std::uint32_t l = 0; l < count; ++l) {
    LayerSpec spec;
    const auto kind = r.get<std::uint32_t>();
    if (kind > static_cast<std::uint32_t>(LayerKind::linear)) throw FormatError("RNET: unknown layer kind");
    spec.kind = static_cast<LayerKind>(kind);
    spec.in_channels = static_cast<int>(r.get<std::uint32_t>());
    spec.out_channels = static_cast<int>(r.get<std::uint32_t>());
    spec.kernel = static_cast<int>(r.get<std::uint32_t>());
    const auto nw = r.get<std::uint32_t>();
    const auto nb = r.get<std::uint32_t>();
    std::vector<float> w(nw), b(nb);
    for (auto& v : w) v = r.get<float>();
    for (auto& v : b) v = r.get<float>();
    specs.push_back(spec);
    weights.push_back(std::move(w));
    biases.push_back(std::move(b));
  }
  r.expect_end();

  Regressor reg;
  try {
    reg.model = Model(specs, in);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("RNET: inconsistent layer specs: ") + e.what());
  }
  for (std::size_t l = 0; l < specs.size(); ++l) {
    Layer& layer = reg.model.layers()[l];
    if (layer.weights.size() != weights[l].size() || layer.bias.size() != biases[l].size()) {
      throw FormatError("RNET: parameter count does not match layer spec");
    }
    std::copy(weights[l].begin(), weights[l].end(), layer.weights.begin());
    std::copy(biases[l].begin(), biases[l].end(), layer.bias.begin());
  }
  reg.fs_ref = fs_ref;
  reg.target_offset = offset;
  reg.target_scale = scale;
  return reg;
}

std::string checkpoint_metadata_json(const Regressor& regressor, const CheckpointMeta& meta) {
  nlohmann::ordered_json j;
  j["format"] = "RNET";
  j["version"] = kFormatVersion;
  j["seed"] = meta.seed;
  j["fs_ref"] = regressor.fs_ref;
  j["target_offset"] = regressor.target_offset;
  j["target_scale"] = regressor.target_scale;
  const Shape in = regressor.model.input_shape();
  j["input"] = {in.channels, in.height, in.width};
  j["architecture"] = nlohmann::ordered_json::array();
  for (const Layer& layer : regressor.model.layers()) j["architecture"].push_back(layer.spec.describe());
  j["parameter_count"] = regressor.model.parameter_count();
  j["stages"] = meta.stages;
  return j.dump(2) + "\n";
}

void save_checkpoint(const std::filesystem::path& path, const Regressor& regressor, const CheckpointMeta& meta) {
  atomic_write(path, encode_checkpoint(regressor));
  std::filesystem::path json_path = path;
  json_path += ".json";
  atomic_write(json_path, checkpoint_metadata_json(regressor, meta));
}

Regressor load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("missing checkpoint " + path.string());
  return decode_checkpoint(read_file(path));
}

}  // namespace pulsebench::nnet
