#pragma once

#include "pulsebench/signal.hpp"
#include "pulsebench/stmap.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace pulsebench {

enum class PipelineColor { yuv, rgb, raw_gray };

struct TrainSettings {
  double lr{0.001};
  int epochs{50};
  int batch{8};
  double p_mask{0.5};
  int mask_min{10};
  int mask_max{30};
  int synthetic_count{64};
  int synthetic_epochs{0};  // 0: epochs
  int real_epochs{0};       // 0: epochs
};

struct PipelineConfig {
  int window_frames{kDefaultClipWindow};
  int stride_frames{kDefaultClipStride};
  Grid grid{};
  BandConfig band{};
  PipelineColor color{PipelineColor::yuv};
  std::string method{"chrom"};
  std::uint64_t seed{0};
  std::map<std::string, std::string> paths;
  TrainSettings train{};

  // Throws ConfigError when a field violates its owning module's constraints.
  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

// Subset of TOML: [table] headers, key = value with strings, numbers,
// booleans and flat arrays, # comments.
nlohmann::json parse_toml(std::string_view text);

// Reads .json or .toml (by extension).
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Seed precedence: explicit value, then PULSEBENCH_SEED, then `fallback`.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed, std::uint64_t fallback = 0);

}  // namespace pulsebench
