#include "pulsebench/nnet/optim.hpp"

#include "pulsebench/error.hpp"

#include <algorithm>
#include <cmath>

namespace pulsebench::nnet {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size()) throw ConfigError("adam_step: parameter/gradient size mismatch");
  if (state.m.empty() && state.v.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ConfigError("adam_step: state size mismatch");
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
  }
}

Adam::Adam(const Model& model, AdamConfig config) : config_(config) {
  if (!(config_.lr > 0.0)) throw ConfigError("Adam: learning rate must be positive");
  weight_state_.resize(model.layers().size());
  bias_state_.resize(model.layers().size());
}

void Adam::step(Model& model, const Gradients& grads, const std::vector<int>& frozen) {
  auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (!layers[l].spec.has_params()) continue;
    if (std::find(frozen.begin(), frozen.end(), static_cast<int>(l)) != frozen.end()) continue;
    adam_step(layers[l].weights, grads.weights[l], weight_state_[l], config_);
    adam_step(layers[l].bias, grads.bias[l], bias_state_[l], config_);
  }
}

}  // namespace pulsebench::nnet
