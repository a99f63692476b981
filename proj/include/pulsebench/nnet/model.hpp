#pragma once

#include "pulsebench/nnet/tensor.hpp"
#include "pulsebench/stmap.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pulsebench::nnet {

enum class LayerKind : std::uint32_t {
  conv = 0,             // square kernel, stride 1, zero "same" padding
  relu = 1,
  maxpool2 = 2,         // 2x2, stride 2, floor
  global_avg_pool = 3,
  linear = 4,           // on the flattened sample
};

struct LayerSpec {
  LayerKind kind{LayerKind::relu};
  int in_channels{0};   // conv: input channels; linear: input features
  int out_channels{0};  // conv: filters; linear: output features
  int kernel{3};        // conv only, odd

  bool has_params() const { return kind == LayerKind::conv || kind == LayerKind::linear; }
  std::string describe() const;
};

// conv3x3(C->16)/ReLU/maxpool2 -> conv3x3(16->32)/ReLU/maxpool2 -> GAP -> FC(32->1)
std::vector<LayerSpec> compact_cnn(int input_channels);

struct Layer {
  LayerSpec spec;
  std::vector<double> weights;
  std::vector<double> bias;
};

// Gradient buffers laid out like the model parameters.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;
  void zero();
};

// Intermediate activations of one sample, kept for backprop.
struct ForwardTrace {
  std::vector<Tensor4> activations;          // activations[0] is the input
  std::vector<std::vector<int>> pool_index;  // argmax per maxpool output
  // Hash of ReLU on/off states and pooling winners; equal hashes mean the
  // network is on the same linear piece.
  std::uint64_t pattern{0};
};

// Feed-forward network mapping a C x n x T image to one scalar.
class Model {
 public:
  Model() = default;
  // Throws ConfigError if the layer chain is inconsistent or does not end in
  // one scalar for the given input.
  Model(std::vector<LayerSpec> specs, Shape input);

  // He-normal weights, zero bias.
  void init(std::uint64_t seed);

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  Shape input_shape() const { return input_; }
  std::size_t parameter_count() const;
  Gradients make_gradients() const;

  // Samples are processed independently. Throws MismatchError if the input
  // shape differs from the model's (batch excepted).
  std::vector<double> forward(const Tensor4& batch) const;
  double forward_sample(const Tensor4& sample, ForwardTrace* trace = nullptr) const;
  // Accumulates d(output)/d(params) * grad_output into grads.
  void backward(const ForwardTrace& trace, double grad_output, Gradients& grads) const;

  void check_input(const Shape& shape) const;

 private:
  std::vector<Layer> layers_;
  Shape input_{};
};

// C-channel n x T image of a map: element (c, block, t).
Tensor4 map_to_tensor(const SpatialTemporalMap& map);

}  // namespace pulsebench::nnet
