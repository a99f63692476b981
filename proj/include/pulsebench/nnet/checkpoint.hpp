#pragma once

#include "pulsebench/nnet/train.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pulsebench::nnet {

// RNET: magic, u32 version, u32 input C, n, T, f64 fs_ref, f64 target_offset,
// f64 target_scale, u32 layer count, then per layer u32 kind, in, out,
// kernel, weight count, bias count followed by f32 weights and biases.
std::string encode_checkpoint(const Regressor& regressor);
Regressor decode_checkpoint(std::string_view bytes);

struct CheckpointMeta {
  std::uint64_t seed{0};
  std::vector<std::string> stages;  // e.g. "synthetic:40", "real:20"
};

std::string checkpoint_metadata_json(const Regressor& regressor, const CheckpointMeta& meta);

// Writes `path` and `path` + ".json" atomically.
void save_checkpoint(const std::filesystem::path& path, const Regressor& regressor, const CheckpointMeta& meta);
Regressor load_checkpoint(const std::filesystem::path& path);

}  // namespace pulsebench::nnet
