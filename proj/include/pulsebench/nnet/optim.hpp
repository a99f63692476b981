#pragma once

#include "pulsebench/nnet/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pulsebench::nnet {

struct AdamConfig {
  double lr{0.001};
  double beta1{0.9};
  double beta2{0.999};
  double eps{1e-8};
};

// First/second moment estimates for one parameter block.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t{0};
};

// One bias-corrected Adam update; state is sized on first use. Throws
// ConfigError if params, grads and state disagree in size.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config = {});

// Adam over every parameter block of a model. Layers listed in `frozen`
// keep their values and moment state.
class Adam {
 public:
  Adam(const Model& model, AdamConfig config);
  void step(Model& model, const Gradients& grads, const std::vector<int>& frozen = {});
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<AdamState> weight_state_;
  std::vector<AdamState> bias_state_;
};

}  // namespace pulsebench::nnet
