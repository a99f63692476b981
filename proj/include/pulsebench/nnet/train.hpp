#pragma once

#include "pulsebench/nnet/model.hpp"
#include "pulsebench/nnet/optim.hpp"
#include "pulsebench/signal.hpp"
#include "pulsebench/stmap.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace pulsebench::nnet {

constexpr double kReferenceFps = 30.0;

// HR expressed at the reference frame rate: hr * fs_ref / fs.
double normalize_target(double hr_bpm, double fs, double fs_ref = kReferenceFps);
double denormalize_target(double y, double fs, double fs_ref = kReferenceFps);

// Mean absolute difference. Throws InputError on empty or unequal inputs.
double l1_loss(std::span<const double> pred, std::span<const double> target);

struct LabeledMap {
  SpatialTemporalMap map;
  double hr_bpm{0.0};
};

struct RegressorConfig {
  std::vector<LayerSpec> architecture;  // empty: compact_cnn(C)
  double lr{0.001};
  int epochs{50};
  int batch{8};
  std::uint64_t seed{0};
  double fs_ref{kReferenceFps};
  // The network regresses (y - target_offset) / target_scale where y is the
  // frame-rate-normalized HR.
  double target_offset{90.0};
  double target_scale{30.0};
  MaskConfig augment{};  // applied online to every training sample
};

// A network plus the constants that map its output back to bpm.
struct Regressor {
  Model model;
  double fs_ref{kReferenceFps};
  double target_offset{90.0};
  double target_scale{30.0};

  // Network output for one map (standardized units).
  double forward_raw(const SpatialTemporalMap& map) const;
  // Frame-rate-normalized HR.
  double forward(const SpatialTemporalMap& map) const;
  double predict_bpm(const SpatialTemporalMap& map) const;
  double raw_target(double hr_bpm, double fs) const;
};

// Untrained regressor with seeded He initialization.
Regressor make_regressor(const RegressorConfig& config, Shape input);

enum class StageData { synthetic, real };

struct TrainStage {
  StageData data{StageData::synthetic};
  int epochs{0};              // 0: RegressorConfig::epochs
  std::vector<int> freeze;    // layer indices left untouched
  double stop_train_mae{0.0}; // > 0: end the stage once clean train MAE (bpm) falls below
};

struct TrainStagePlan {
  std::vector<TrainStage> stages;
  // Throws ConfigError for an empty plan or a freeze index outside the model.
  void validate(const Model& model) const;
};

struct TrainData {
  const std::vector<LabeledMap>* synthetic{nullptr};
  const std::vector<LabeledMap>* real{nullptr};
  const std::vector<LabeledMap>* validation{nullptr};
};

struct EpochLog {
  int stage{0};
  int epoch{0};
  double train_loss_bpm{0.0};  // mean L1 over the epoch's (augmented) samples
  double train_mae_bpm{-1.0};  // clean pass over the training set; -1 when not computed
  double val_mae_bpm{-1.0};    // -1 without a validation set
};

struct TrainResult {
  Regressor regressor;
  std::vector<EpochLog> log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Runs the plan's stages in order starting from `initial` (or a fresh
// seeded initialization). Deterministic for a fixed config seed.
TrainResult train(const TrainStagePlan& plan, const TrainData& data, const RegressorConfig& config,
                  const Regressor* initial = nullptr, const EpochCallback& on_epoch = {});

// Mean absolute error in bpm over a labeled set.
double evaluate_mae(const Regressor& regressor, const std::vector<LabeledMap>& data);

struct VideoPrediction {
  std::vector<double> clip_bpm;
  double video_bpm{0.0};
};

// Per-clip HR and their arithmetic mean. Throws InputError on an empty list.
VideoPrediction predict_video(const std::vector<SpatialTemporalMap>& clips, const Regressor& regressor);

}  // namespace pulsebench::nnet
