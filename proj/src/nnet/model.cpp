#include "pulsebench/nnet/model.hpp"

#include "pulsebench/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace pulsebench::nnet {

namespace {

void mix(std::uint64_t& h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

Shape output_shape(const LayerSpec& spec, const Shape& in) {
  switch (spec.kind) {
    case LayerKind::conv:
      if (spec.in_channels != in.channels) {
        throw ConfigError("conv layer expects " + std::to_string(spec.in_channels) +
                          " input channels, got " + std::to_string(in.channels));
      }
      if (spec.kernel < 1 || spec.kernel % 2 == 0) throw ConfigError("conv kernel must be odd");
      if (spec.out_channels < 1) throw ConfigError("conv needs at least one filter");
      return {in.batch, spec.out_channels, in.height, in.width};
    case LayerKind::relu:
      return in;
    case LayerKind::maxpool2:
      if (in.height < 2 || in.width < 2) throw ConfigError("maxpool2 input smaller than 2x2");
      return {in.batch, in.channels, in.height / 2, in.width / 2};
    case LayerKind::global_avg_pool:
      return {in.batch, in.channels, 1, 1};
    case LayerKind::linear:
      if (static_cast<std::size_t>(spec.in_channels) != in.sample_count()) {
        throw ConfigError("linear layer expects " + std::to_string(spec.in_channels) +
                          " features, got " + std::to_string(in.sample_count()));
      }
      if (spec.out_channels < 1) throw ConfigError("linear needs at least one output");
      return {in.batch, spec.out_channels, 1, 1};
  }
  throw ConfigError("unknown layer kind");
}

// The conv kernels dominate training time; they get an AVX2/FMA clone picked
// at load time. Results are deterministic on a given machine but may differ
// in the last bits between machines with and without AVX2.
#if defined(__x86_64__) && defined(__GNUC__) && !defined(__clang__)
#define PB_HOT_KERNEL __attribute__((target_clones("arch=haswell", "default")))
#else
#define PB_HOT_KERNEL
#endif

// Four-way unrolled dot product; fixed summation order.
inline double dot(const double* a, const double* b, int n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// 3x3 kernels are by far the common case and get row-at-a-time loops with
// the three horizontal taps fused, so each output row stays in L1.
PB_HOT_KERNEL void conv3_forward(const Layer& layer, const Shape& in_shape, const double* in, double* out) {
  const int C = in_shape.channels, H = in_shape.height, W = in_shape.width;
  const int O = layer.spec.out_channels;
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  for (int o = 0; o < O; ++o) {
    for (int y = 0; y < H; ++y) {
      double* orow = out + o * plane + static_cast<std::size_t>(y) * W;
      std::fill(orow, orow + W, layer.bias[o]);
      for (int i = 0; i < C; ++i) {
        for (int ky = 0; ky < 3; ++ky) {
          const int yy = y + ky - 1;
          if (yy < 0 || yy >= H) continue;
          const double* irow = in + i * plane + static_cast<std::size_t>(yy) * W;
          const double* w = &layer.weights[((static_cast<std::size_t>(o) * C + i) * 3 + ky) * 3];
          const double w0 = w[0], w1 = w[1], w2 = w[2];
          orow[0] += w1 * irow[0] + w2 * irow[1];
          for (int x = 1; x < W - 1; ++x) orow[x] += w0 * irow[x - 1] + w1 * irow[x] + w2 * irow[x + 1];
          orow[W - 1] += w0 * irow[W - 2] + w1 * irow[W - 1];
        }
      }
    }
  }
}

PB_HOT_KERNEL void conv3_backward(const Layer& layer, const Shape& in_shape, const double* in,
                                  const double* grad_out, double* grad_in, std::vector<double>& grad_w,
                                  std::vector<double>& grad_b) {
  const int C = in_shape.channels, H = in_shape.height, W = in_shape.width;
  const int O = layer.spec.out_channels;
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  for (int o = 0; o < O; ++o) {
    const double* g_plane = grad_out + o * plane;
    double bias_acc = 0.0;
    for (std::size_t k = 0; k < plane; ++k) bias_acc += g_plane[k];
    grad_b[o] += bias_acc;
    for (int i = 0; i < C; ++i) {
      const double* in_plane = in + i * plane;
      double* gin_plane = grad_in ? grad_in + i * plane : nullptr;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
        const std::size_t widx = ((static_cast<std::size_t>(o) * C + i) * 3 + ky) * 3;
        const double w0 = layer.weights[widx], w1 = layer.weights[widx + 1], w2 = layer.weights[widx + 2];
        double a0 = 0.0, a1 = 0.0, a2 = 0.0;
        for (int y = y0; y < y1; ++y) {
          const double* grow = g_plane + static_cast<std::size_t>(y) * W;
          const double* irow = in_plane + static_cast<std::size_t>(y + dy) * W;
          a0 += dot(grow + 1, irow, W - 1);
          a1 += dot(grow, irow, W);
          a2 += dot(grow, irow + 1, W - 1);
          if (gin_plane) {
            double* girow = gin_plane + static_cast<std::size_t>(y + dy) * W;
            girow[0] += w0 * grow[1] + w1 * grow[0];
            for (int x = 1; x < W - 1; ++x) girow[x] += w0 * grow[x + 1] + w1 * grow[x] + w2 * grow[x - 1];
            girow[W - 1] += w1 * grow[W - 1] + w2 * grow[W - 2];
          }
        }
        grad_w[widx] += a0;
        grad_w[widx + 1] += a1;
        grad_w[widx + 2] += a2;
      }
    }
  }
}

PB_HOT_KERNEL void conv_forward(const Layer& layer, const Shape& in_shape, const double* in, double* out) {
  const int C = in_shape.channels, H = in_shape.height, W = in_shape.width;
  const int O = layer.spec.out_channels, K = layer.spec.kernel, pad = K / 2;
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  for (int o = 0; o < O; ++o) std::fill(out + o * plane, out + (o + 1) * plane, layer.bias[o]);
  for (int o = 0; o < O; ++o) {
    double* out_plane = out + o * plane;
    for (int i = 0; i < C; ++i) {
      const double* in_plane = in + i * plane;
      for (int ky = 0; ky < K; ++ky) {
        const int dy = ky - pad;
        const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
        for (int kx = 0; kx < K; ++kx) {
          const int dx = kx - pad;
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          const double w = layer.weights[((static_cast<std::size_t>(o) * C + i) * K + ky) * K + kx];
          for (int y = y0; y < y1; ++y) {
            double* orow = out_plane + static_cast<std::size_t>(y) * W;
            const double* irow = in_plane + static_cast<std::size_t>(y + dy) * W + dx;
            for (int x = x0; x < x1; ++x) orow[x] += w * irow[x];
          }
        }
      }
    }
  }
}

PB_HOT_KERNEL void conv_backward(const Layer& layer, const Shape& in_shape, const double* in, const double* grad_out,
                   double* grad_in, std::vector<double>& grad_w, std::vector<double>& grad_b) {
  const int C = in_shape.channels, H = in_shape.height, W = in_shape.width;
  const int O = layer.spec.out_channels, K = layer.spec.kernel, pad = K / 2;
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  for (int o = 0; o < O; ++o) {
    const double* g_plane = grad_out + o * plane;
    double bias_acc = 0.0;
    for (std::size_t k = 0; k < plane; ++k) bias_acc += g_plane[k];
    grad_b[o] += bias_acc;
    for (int i = 0; i < C; ++i) {
      const double* in_plane = in + i * plane;
      double* gin_plane = grad_in ? grad_in + i * plane : nullptr;
      for (int ky = 0; ky < K; ++ky) {
        const int dy = ky - pad;
        const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
        for (int kx = 0; kx < K; ++kx) {
          const int dx = kx - pad;
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          const std::size_t widx = ((static_cast<std::size_t>(o) * C + i) * K + ky) * K + kx;
          const double w = layer.weights[widx];
          double acc = 0.0;
          for (int y = y0; y < y1; ++y) {
            const double* grow = g_plane + static_cast<std::size_t>(y) * W;
            const double* irow = in_plane + static_cast<std::size_t>(y + dy) * W + dx;
            acc += dot(grow + x0, irow + x0, x1 - x0);
            if (gin_plane) {
              double* girow = gin_plane + static_cast<std::size_t>(y + dy) * W + dx;
              for (int x = x0; x < x1; ++x) girow[x] += w * grow[x];
            }
          }
          grad_w[widx] += acc;
        }
      }
    }
  }
}

}  // namespace

bool Tensor4::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

std::string LayerSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case LayerKind::conv: os << "conv" << kernel << "x" << kernel << "(" << in_channels << "->" << out_channels << ")"; break;
    case LayerKind::relu: os << "relu"; break;
    case LayerKind::maxpool2: os << "maxpool2"; break;
    case LayerKind::global_avg_pool: os << "gap"; break;
    case LayerKind::linear: os << "fc(" << in_channels << "->" << out_channels << ")"; break;
  }
  return os.str();
}

std::vector<LayerSpec> compact_cnn(int input_channels) {
  return {
      {LayerKind::conv, input_channels, 16, 3},
      {LayerKind::relu},
      {LayerKind::maxpool2},
      {LayerKind::conv, 16, 32, 3},
      {LayerKind::relu},
      {LayerKind::maxpool2},
      {LayerKind::global_avg_pool},
      {LayerKind::linear, 32, 1},
  };
}

void Gradients::zero() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
}

Model::Model(std::vector<LayerSpec> specs, Shape input) : input_(input) {
  if (specs.empty()) throw ConfigError("model needs at least one layer");
  input_.batch = 1;
  Shape shape = input_;
  for (const LayerSpec& spec : specs) {
    shape = output_shape(spec, shape);
    Layer layer{spec, {}, {}};
    if (spec.kind == LayerKind::conv) {
      layer.weights.assign(static_cast<std::size_t>(spec.out_channels) * spec.in_channels * spec.kernel * spec.kernel, 0.0);
      layer.bias.assign(spec.out_channels, 0.0);
    } else if (spec.kind == LayerKind::linear) {
      layer.weights.assign(static_cast<std::size_t>(spec.out_channels) * spec.in_channels, 0.0);
      layer.bias.assign(spec.out_channels, 0.0);
    }
    layers_.push_back(std::move(layer));
  }
  if (shape.sample_count() != 1) throw ConfigError("model must end in a single scalar output");
}

void Model::init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (Layer& layer : layers_) {
    if (!layer.spec.has_params()) continue;
    const int fan_in = layer.spec.kind == LayerKind::conv
                           ? layer.spec.in_channels * layer.spec.kernel * layer.spec.kernel
                           : layer.spec.in_channels;
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    for (double& w : layer.weights) w = dist(rng);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

Gradients Model::make_gradients() const {
  Gradients g;
  for (const Layer& layer : layers_) {
    g.weights.emplace_back(layer.weights.size(), 0.0);
    g.bias.emplace_back(layer.bias.size(), 0.0);
  }
  return g;
}

void Model::check_input(const Shape& shape) const {
  if (shape.channels != input_.channels || shape.height != input_.height || shape.width != input_.width) {
    std::ostringstream os;
    os << "model expects input " << input_.channels << "x" << input_.height << "x" << input_.width
       << ", got " << shape.channels << "x" << shape.height << "x" << shape.width;
    throw MismatchError(os.str());
  }
}

std::vector<double> Model::forward(const Tensor4& batch) const {
  check_input(batch.shape);
  std::vector<double> out(batch.shape.batch);
  Shape one = batch.shape;
  one.batch = 1;
  Tensor4 sample(one);
  for (int n = 0; n < batch.shape.batch; ++n) {
    std::copy(batch.sample(n), batch.sample(n) + one.count(), sample.data.begin());
    out[n] = forward_sample(sample);
  }
  return out;
}

double Model::forward_sample(const Tensor4& sample, ForwardTrace* trace) const {
  check_input(sample.shape);
  if (sample.shape.batch != 1) throw MismatchError("forward_sample expects a batch of one");
  Tensor4 cur = sample;
  if (trace) {
    trace->activations.clear();
    trace->pool_index.clear();
    trace->pattern = 0;
    trace->activations.push_back(cur);
  }
  for (const Layer& layer : layers_) {
    const Shape in = cur.shape;
    Tensor4 next(output_shape(layer.spec, in));
    std::vector<int> argmax;
    switch (layer.spec.kind) {
      case LayerKind::conv:
        if (layer.spec.kernel == 3 && in.width >= 2) {
          conv3_forward(layer, in, cur.data.data(), next.data.data());
        } else {
          conv_forward(layer, in, cur.data.data(), next.data.data());
        }
        break;
      case LayerKind::relu:
        for (std::size_t i = 0; i < cur.data.size(); ++i) {
          const bool on = cur.data[i] > 0.0;
          next.data[i] = on ? cur.data[i] : 0.0;
          if (trace) mix(trace->pattern, on ? i * 2 + 1 : 0);
        }
        break;
      case LayerKind::maxpool2: {
        const Shape os = next.shape;
        argmax.resize(next.data.size());
        for (int c = 0; c < os.channels; ++c) {
          for (int y = 0; y < os.height; ++y) {
            for (int x = 0; x < os.width; ++x) {
              int best = -1;
              double best_v = 0.0;
              for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                  const int idx = (c * in.height + 2 * y + dy) * in.width + 2 * x + dx;
                  if (best < 0 || cur.data[idx] > best_v) {
                    best = idx;
                    best_v = cur.data[idx];
                  }
                }
              }
              const int o = (c * os.height + y) * os.width + x;
              next.data[o] = best_v;
              argmax[o] = best;
            }
          }
        }
        if (trace) {
          for (int idx : argmax) mix(trace->pattern, static_cast<std::uint64_t>(idx));
        }
        break;
      }
      case LayerKind::global_avg_pool: {
        const std::size_t plane = static_cast<std::size_t>(in.height) * in.width;
        for (int c = 0; c < in.channels; ++c) {
          double s = 0.0;
          for (std::size_t k = 0; k < plane; ++k) s += cur.data[c * plane + k];
          next.data[c] = s / static_cast<double>(plane);
        }
        break;
      }
      case LayerKind::linear: {
        const int n_in = layer.spec.in_channels;
        for (int j = 0; j < layer.spec.out_channels; ++j) {
          next.data[j] = layer.bias[j] + dot(&layer.weights[static_cast<std::size_t>(j) * n_in], cur.data.data(), n_in);
        }
        break;
      }
    }
    if (trace) {
      trace->pool_index.push_back(std::move(argmax));
      trace->activations.push_back(next);
    }
    cur = std::move(next);
  }
  return cur.data[0];
}

void Model::backward(const ForwardTrace& trace, double grad_output, Gradients& grads) const {
  if (trace.activations.size() != layers_.size() + 1) throw ConfigError("backward: trace does not match model");
  std::vector<double> grad{grad_output};
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const Layer& layer = layers_[l];
    const Tensor4& in = trace.activations[l];
    const bool need_input_grad = l > 0;
    std::vector<double> grad_in(in.data.size(), 0.0);
    switch (layer.spec.kind) {
      case LayerKind::conv:
        if (layer.spec.kernel == 3 && in.shape.width >= 2) {
          conv3_backward(layer, in.shape, in.data.data(), grad.data(), need_input_grad ? grad_in.data() : nullptr,
                         grads.weights[l], grads.bias[l]);
        } else {
          conv_backward(layer, in.shape, in.data.data(), grad.data(), need_input_grad ? grad_in.data() : nullptr,
                        grads.weights[l], grads.bias[l]);
        }
        break;
      case LayerKind::relu:
        for (std::size_t i = 0; i < grad_in.size(); ++i) grad_in[i] = in.data[i] > 0.0 ? grad[i] : 0.0;
        break;
      case LayerKind::maxpool2: {
        const auto& argmax = trace.pool_index[l];
        for (std::size_t o = 0; o < argmax.size(); ++o) grad_in[argmax[o]] += grad[o];
        break;
      }
      case LayerKind::global_avg_pool: {
        const std::size_t plane = static_cast<std::size_t>(in.shape.height) * in.shape.width;
        for (int c = 0; c < in.shape.channels; ++c) {
          const double g = grad[c] / static_cast<double>(plane);
          std::fill(grad_in.begin() + c * plane, grad_in.begin() + (c + 1) * plane, g);
        }
        break;
      }
      case LayerKind::linear: {
        const int n_in = layer.spec.in_channels;
        for (int j = 0; j < layer.spec.out_channels; ++j) {
          const double g = grad[j];
          grads.bias[l][j] += g;
          double* gw = &grads.weights[l][static_cast<std::size_t>(j) * n_in];
          const double* w = &layer.weights[static_cast<std::size_t>(j) * n_in];
          for (int i = 0; i < n_in; ++i) {
            gw[i] += g * in.data[i];
            grad_in[i] += g * w[i];
          }
        }
        break;
      }
    }
    grad = std::move(grad_in);
  }
}

Tensor4 map_to_tensor(const SpatialTemporalMap& map) {
  Tensor4 t(Shape{1, map.channels, map.blocks, map.frames});
  for (int c = 0; c < map.channels; ++c) {
    for (int b = 0; b < map.blocks; ++b) {
      for (int f = 0; f < map.frames; ++f) t.at(0, c, b, f) = map.at(b, f, c);
    }
  }
  return t;
}

}  // namespace pulsebench::nnet
