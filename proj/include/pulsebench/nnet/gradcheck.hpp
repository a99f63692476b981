#pragma once

#include "pulsebench/nnet/model.hpp"

#include <cstddef>
#include <cstdint>

namespace pulsebench::nnet {

struct GradCheckResult {
  double max_rel_error{0.0};
  std::size_t checked{0};
  // Parameters skipped because a +-delta perturbation moved the network to a
  // different linear piece (a ReLU or pooling winner flipped) or moved the
  // output across the L1 kink at the target.
  std::size_t skipped_kinks{0};
};

// Compares backprop gradients of |f(x) - target| with central differences.
// Every parameter of layers up to 1e4 parameters is checked; larger layers
// are sampled at 1% with a seeded generator. Relative error is
// |ga - gn| / max(|ga|, |gn|, 1e-8).
GradCheckResult gradient_check(const Model& model, const Tensor4& input, double target,
                               double delta = 1e-4, std::uint64_t sample_seed = 0);

}  // namespace pulsebench::nnet
