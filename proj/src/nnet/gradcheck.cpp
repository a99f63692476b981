#include "pulsebench/nnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pulsebench::nnet {

GradCheckResult gradient_check(const Model& model, const Tensor4& input, double target, double delta,
                               std::uint64_t sample_seed) {
  constexpr std::size_t kFullCheckLimit = 10000;
  GradCheckResult result;

  ForwardTrace base;
  const double out = model.forward_sample(input, &base);
  Gradients analytic = model.make_gradients();
  const double sign = out > target ? 1.0 : -1.0;
  model.backward(base, sign, analytic);

  Model probe = model;
  ForwardTrace trace;
  std::mt19937_64 rng(sample_seed);

  const auto check = [&](std::vector<double>& values, double ga, std::size_t idx) {
    const double saved = values[idx];
    values[idx] = saved + delta;
    const double up = probe.forward_sample(input, &trace);
    const bool up_same = trace.pattern == base.pattern;
    values[idx] = saved - delta;
    const double down = probe.forward_sample(input, &trace);
    const bool down_same = trace.pattern == base.pattern;
    values[idx] = saved;
    const bool crosses_target = (up > target) != (out > target) || (down > target) != (out > target);
    if (!up_same || !down_same || crosses_target) {
      ++result.skipped_kinks;
      return;
    }
    const double gn = (std::abs(up - target) - std::abs(down - target)) / (2.0 * delta);
    const double denom = std::max({std::abs(ga), std::abs(gn), 1e-8});
    result.max_rel_error = std::max(result.max_rel_error, std::abs(ga - gn) / denom);
    ++result.checked;
  };

  const auto visit = [&](std::vector<double>& values, const std::vector<double>& grads, std::size_t layer_size) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (layer_size > kFullCheckLimit) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(std::max<std::size_t>(1, values.size() / 100));
    }
    for (std::size_t i : idx) check(values, grads[i], i);
  };

  for (std::size_t l = 0; l < probe.layers().size(); ++l) {
    Layer& layer = probe.layers()[l];
    const std::size_t layer_size = layer.weights.size() + layer.bias.size();
    visit(layer.weights, analytic.weights[l], layer_size);
    visit(layer.bias, analytic.bias[l], layer_size);
  }
  return result;
}

}  // namespace pulsebench::nnet
