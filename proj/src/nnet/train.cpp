#include "pulsebench/nnet/train.hpp"

#include "pulsebench/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pulsebench::nnet {

double normalize_target(double hr_bpm, double fs, double fs_ref) {
  if (!(fs > 0.0 && fs_ref > 0.0)) throw ConfigError("normalize_target: frame rates must be positive");
  return hr_bpm * fs_ref / fs;
}

double denormalize_target(double y, double fs, double fs_ref) {
  if (!(fs > 0.0 && fs_ref > 0.0)) throw ConfigError("denormalize_target: frame rates must be positive");
  return y * fs / fs_ref;
}

double l1_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.empty() || pred.size() != target.size()) throw InputError("l1_loss: need equal non-empty inputs");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred[i] - target[i]);
  return acc / static_cast<double>(pred.size());
}

double Regressor::forward_raw(const SpatialTemporalMap& map) const {
  return model.forward_sample(map_to_tensor(map));
}

double Regressor::forward(const SpatialTemporalMap& map) const {
  return target_offset + target_scale * forward_raw(map);
}

double Regressor::predict_bpm(const SpatialTemporalMap& map) const {
  return denormalize_target(forward(map), map.frame_rate_hz, fs_ref);
}

double Regressor::raw_target(double hr_bpm, double fs) const {
  return (normalize_target(hr_bpm, fs, fs_ref) - target_offset) / target_scale;
}

Regressor make_regressor(const RegressorConfig& config, Shape input) {
  if (!(config.target_scale > 0.0)) throw ConfigError("target_scale must be positive");
  auto specs = config.architecture.empty() ? compact_cnn(input.channels) : config.architecture;
  Regressor r{Model(std::move(specs), input), config.fs_ref, config.target_offset, config.target_scale};
  r.model.init(config.seed);
  return r;
}

void TrainStagePlan::validate(const Model& model) const {
  if (stages.empty()) throw ConfigError("training plan has no stages");
  for (const TrainStage& s : stages) {
    if (s.epochs < 0) throw ConfigError("stage epochs must be >= 0");
    for (int l : s.freeze) {
      if (l < 0 || l >= static_cast<int>(model.layers().size())) {
        throw ConfigError("freeze index " + std::to_string(l) + " outside the model");
      }
    }
  }
}

double evaluate_mae(const Regressor& regressor, const std::vector<LabeledMap>& data) {
  if (data.empty()) throw ConfigError("evaluate_mae: empty data set");
  double acc = 0.0;
  for (const LabeledMap& item : data) acc += std::abs(regressor.predict_bpm(item.map) - item.hr_bpm);
  return acc / static_cast<double>(data.size());
}

TrainResult train(const TrainStagePlan& plan, const TrainData& data, const RegressorConfig& config,
                  const Regressor* initial, const EpochCallback& on_epoch) {
  if (config.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (config.batch < 1) throw ConfigError("batch must be >= 1");
  if (!(config.lr > 0.0)) throw ConfigError("learning rate must be positive");

  const std::vector<LabeledMap>* first = nullptr;
  for (const TrainStage& s : plan.stages) {
    const auto* set = s.data == StageData::synthetic ? data.synthetic : data.real;
    if (set == nullptr || set->empty()) throw ConfigError("training stage has an empty data provider");
    if (!first) first = set;
  }
  if (!first) throw ConfigError("training plan has no stages");

  TrainResult result;
  if (initial) {
    result.regressor = *initial;
  } else {
    const SpatialTemporalMap& m = first->front().map;
    result.regressor = make_regressor(config, Shape{1, m.channels, m.blocks, m.frames});
  }
  Regressor& reg = result.regressor;
  plan.validate(reg.model);

  std::mt19937_64 order_rng(config.seed ^ 0x5eedULL);
  std::mt19937_64 augment_rng(config.seed ^ 0xa0a0ULL);
  Gradients grads = reg.model.make_gradients();
  ForwardTrace trace;

  for (std::size_t si = 0; si < plan.stages.size(); ++si) {
    const TrainStage& stage = plan.stages[si];
    const auto& set = stage.data == StageData::synthetic ? *data.synthetic : *data.real;
    for (const LabeledMap& item : set) reg.model.check_input(map_to_tensor(item.map).shape);
    const int epochs = stage.epochs > 0 ? stage.epochs : config.epochs;
    Adam adam(reg.model, AdamConfig{config.lr});
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), order_rng);
      double loss_bpm = 0.0;
      for (std::size_t start = 0; start < order.size(); start += config.batch) {
        const std::size_t end = std::min(order.size(), start + config.batch);
        const double inv_batch = 1.0 / static_cast<double>(end - start);
        grads.zero();
        for (std::size_t k = start; k < end; ++k) {
          const LabeledMap& item = set[order[k]];
          const SpatialTemporalMap sample = config.augment.p_mask > 0.0
                                                ? mask_augment(item.map, augment_rng, config.augment)
                                                : item.map;
          const double z = reg.model.forward_sample(map_to_tensor(sample), &trace);
          const double target = reg.raw_target(item.hr_bpm, sample.frame_rate_hz);
          const double diff = z - target;
          const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
          reg.model.backward(trace, sign * inv_batch, grads);
          loss_bpm += std::abs(denormalize_target(reg.target_offset + reg.target_scale * z,
                                                  sample.frame_rate_hz, reg.fs_ref) -
                               item.hr_bpm);
        }
        adam.step(reg.model, grads, stage.freeze);
      }

      EpochLog log;
      log.stage = static_cast<int>(si);
      log.epoch = epoch;
      log.train_loss_bpm = loss_bpm / static_cast<double>(set.size());
      if (stage.stop_train_mae > 0.0) log.train_mae_bpm = evaluate_mae(reg, set);
      if (data.validation && !data.validation->empty()) log.val_mae_bpm = evaluate_mae(reg, *data.validation);
      result.log.push_back(log);
      if (on_epoch) on_epoch(log);
      if (stage.stop_train_mae > 0.0 && log.train_mae_bpm < stage.stop_train_mae) break;
    }
  }
  return result;
}

VideoPrediction predict_video(const std::vector<SpatialTemporalMap>& clips, const Regressor& regressor) {
  if (clips.empty()) throw InputError("predict_video: no clips");
  VideoPrediction p;
  for (const SpatialTemporalMap& m : clips) p.clip_bpm.push_back(regressor.predict_bpm(m));
  p.video_bpm = std::accumulate(p.clip_bpm.begin(), p.clip_bpm.end(), 0.0) /
                static_cast<double>(p.clip_bpm.size());
  return p;
}

}  // namespace pulsebench::nnet
