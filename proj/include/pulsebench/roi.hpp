#pragma once

#include "pulsebench/frames.hpp"
#include "pulsebench/landmarks.hpp"

#include <array>
#include <vector>

namespace pulsebench {

// Face region of interest in the eye-aligned frame.
//
// The box spans `width` px along the eye line and `1.5 * face_height` px
// perpendicular to it. `origin` is the image-space position of the top-left
// corner; box-local (u, v) maps to origin + u * x_axis() + v * y_axis().
struct RoiBox {
  double width{0.0};        // cheek border to cheek border
  double face_height{0.0};  // eye-center midpoint to chin
  Point2 origin{};
  double rotation_deg{0.0};

  double box_height() const { return 1.5 * face_height; }
  Point2 x_axis() const;
  Point2 y_axis() const;
  Point2 to_image(double u, double v) const;
  // Inverse of to_image.
  Point2 to_box(Point2 p) const;
  bool contains(Point2 p) const;
};

// Throws InputError if the eye centers coincide or the aligned face has
// non-positive width or height.
RoiBox compute_roi(const LandmarkFrame& points);

struct Yuv {
  double y{0.0};
  double u{0.0};
  double v{0.0};
};

// Y = 0.299R + 0.587G + 0.114B
// U = -0.169R - 0.331G + 0.5B + 128
// V = 0.5R - 0.419G - 0.081B + 128
// No clamping. The chroma rows sum to zero, so they are evaluated on channel
// differences; gray input then gives U = V = 128 without rounding residue.
constexpr Yuv rgb_to_yuv(double r, double g, double b) {
  return {0.299 * r + 0.587 * g + 0.114 * b,
          -0.169 * (r - b) - 0.331 * (g - b) + 128.0,
          0.5 * (r - g) - 0.081 * (b - g) + 128.0};
}

// Fixed chroma box in YUV space.
struct SkinRule {
  double y_min{40.0}, y_max{250.0};
  double u_min{90.0}, u_max{135.0};
  double v_min{135.0}, v_max{180.0};

  bool accepts(const Yuv& p) const {
    return p.y >= y_min && p.y <= y_max && p.u >= u_min && p.u <= u_max && p.v >= v_min &&
           p.v <= v_max;
  }
};

// Row-major W x H boolean mask of image pixels whose centers fall inside the
// ROI and pass the skin rule. Gray frames pass every pixel inside the ROI.
std::vector<bool> skin_mask(const Image& frame, const RoiBox& roi, const SkinRule& rule = {});

// Bilinear sample of all channels at a real-valued image position. Returns
// false when the position lies outside the pixel-center hull.
bool sample_bilinear(const Image& frame, double x, double y, std::array<double, 3>& out);

}  // namespace pulsebench
