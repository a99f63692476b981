#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pulsebench {

enum class ColorSpace { rgb, gray };

// Interleaved 8-bit raster, row-major, channel-last.
struct Image {
  int width{0};
  int height{0};
  int channels{0};
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w) * h * c, fill) {}

  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

struct FrameSequence {
  std::vector<Image> frames;
  double frame_rate_hz{30.0};
  ColorSpace color_space{ColorSpace::rgb};

  std::size_t size() const { return frames.size(); }
  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
  int channels() const { return color_space == ColorSpace::gray ? 1 : 3; }

  // Throws InputError if frames disagree in size/channels, the channel count
  // does not match the color space, or the frame rate is not positive.
  void validate() const;
};

}  // namespace pulsebench
