#pragma once

#include <cstddef>
#include <vector>

namespace pulsebench::nnet {

struct Shape {
  int batch{1};
  int channels{1};
  int height{1};
  int width{1};

  std::size_t count() const {
    return static_cast<std::size_t>(batch) * channels * height * width;
  }
  std::size_t sample_count() const { return static_cast<std::size_t>(channels) * height * width; }
  bool operator==(const Shape&) const = default;
};

// Dense NCHW tensor.
struct Tensor4 {
  Shape shape{};
  std::vector<double> data;

  Tensor4() = default;
  explicit Tensor4(Shape s, double fill = 0.0) : shape(s), data(s.count(), fill) {}

  double* sample(int n) { return data.data() + static_cast<std::size_t>(n) * shape.sample_count(); }
  const double* sample(int n) const {
    return data.data() + static_cast<std::size_t>(n) * shape.sample_count();
  }
  double& at(int n, int c, int y, int x) {
    return data[((static_cast<std::size_t>(n) * shape.channels + c) * shape.height + y) * shape.width + x];
  }
  double at(int n, int c, int y, int x) const {
    return data[((static_cast<std::size_t>(n) * shape.channels + c) * shape.height + y) * shape.width + x];
  }
  bool all_finite() const;
};

}  // namespace pulsebench::nnet
