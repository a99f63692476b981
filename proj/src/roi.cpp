#include "pulsebench/roi.hpp"

#include "pulsebench/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pulsebench {

Point2 RoiBox::x_axis() const {
  const double a = rotation_deg * std::numbers::pi / 180.0;
  return {std::cos(a), std::sin(a)};
}

Point2 RoiBox::y_axis() const {
  const double a = rotation_deg * std::numbers::pi / 180.0;
  return {-std::sin(a), std::cos(a)};
}

Point2 RoiBox::to_image(double u, double v) const {
  const Point2 ex = x_axis();
  const Point2 ey = y_axis();
  return {origin.x + u * ex.x + v * ey.x, origin.y + u * ex.y + v * ey.y};
}

Point2 RoiBox::to_box(Point2 p) const {
  const Point2 ex = x_axis();
  const Point2 ey = y_axis();
  const double dx = p.x - origin.x;
  const double dy = p.y - origin.y;
  return {dx * ex.x + dy * ex.y, dx * ey.x + dy * ey.y};
}

bool RoiBox::contains(Point2 p) const {
  const Point2 b = to_box(p);
  return b.x >= 0.0 && b.x < width && b.y >= 0.0 && b.y < box_height();
}

RoiBox compute_roi(const LandmarkFrame& points) {
  const Point2 le = points[landmark::left_eye_center];
  const Point2 re = points[landmark::right_eye_center];
  const double ex = re.x - le.x;
  const double ey = re.y - le.y;
  const double eye_dist = std::hypot(ex, ey);
  if (!(eye_dist > 1e-9)) throw InputError("compute_roi: eye centers coincide");

  // Unit vectors of the aligned frame. A mirrored markup (eye order swapped)
  // would put the chin above the eyes; the axes are then turned by 180 deg.
  Point2 ax{ex / eye_dist, ey / eye_dist};
  Point2 ay{-ax.y, ax.x};
  const Point2 mid{0.5 * (le.x + re.x), 0.5 * (le.y + re.y)};
  const Point2 chin = points[landmark::chin];
  if ((chin.x - mid.x) * ay.x + (chin.y - mid.y) * ay.y < 0.0) {
    ax = {-ax.x, -ax.y};
    ay = {-ay.x, -ay.y};
  }
  const auto along = [&](Point2 p) { return p.x * ax.x + p.y * ax.y; };
  const auto across = [&](Point2 p) { return p.x * ay.x + p.y * ay.y; };

  const double u_left = along(points[landmark::left_cheek]);
  const double u_right = along(points[landmark::right_cheek]);
  const double width = std::abs(u_right - u_left);
  const double v_mid = across(mid);
  const double face_height = across(chin) - v_mid;
  if (!(width > 0.0) || !(face_height > 0.0)) {
    throw InputError("compute_roi: degenerate face geometry");
  }

  const double u0 = std::min(u_left, u_right);
  const double v0 = v_mid - 0.5 * face_height;
  RoiBox box;
  box.width = width;
  box.face_height = face_height;
  box.rotation_deg = std::atan2(ax.y, ax.x) * 180.0 / std::numbers::pi;
  box.origin = {u0 * ax.x + v0 * ay.x, u0 * ax.y + v0 * ay.y};
  return box;
}

std::vector<bool> skin_mask(const Image& frame, const RoiBox& roi, const SkinRule& rule) {
  std::vector<bool> mask(static_cast<std::size_t>(frame.width) * frame.height, false);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      if (!roi.contains({x + 0.5, y + 0.5})) continue;
      bool skin = true;
      if (frame.channels == 3) {
        skin = rule.accepts(rgb_to_yuv(frame.at(x, y, 0), frame.at(x, y, 1), frame.at(x, y, 2)));
      }
      mask[static_cast<std::size_t>(y) * frame.width + x] = skin;
    }
  }
  return mask;
}

bool sample_bilinear(const Image& frame, double x, double y, std::array<double, 3>& out) {
  // Pixel (i, j) has its center at (i + 0.5, j + 0.5).
  const double fx = x - 0.5;
  const double fy = y - 0.5;
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= frame.width - 1 && fy <= frame.height - 1)) return false;
  const int x0 = std::min(static_cast<int>(fx), frame.width - 1);
  const int y0 = std::min(static_cast<int>(fy), frame.height - 1);
  const int x1 = std::min(x0 + 1, frame.width - 1);
  const int y1 = std::min(y0 + 1, frame.height - 1);
  const double tx = fx - x0;
  const double ty = fy - y0;
  for (int c = 0; c < frame.channels; ++c) {
    const double top = (1.0 - tx) * frame.at(x0, y0, c) + tx * frame.at(x1, y0, c);
    const double bottom = (1.0 - tx) * frame.at(x0, y1, c) + tx * frame.at(x1, y1, c);
    out[c] = (1.0 - ty) * top + ty * bottom;
  }
  return true;
}

}  // namespace pulsebench
