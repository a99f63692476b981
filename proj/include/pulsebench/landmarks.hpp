#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace pulsebench {

struct Point2 {
  double x{0.0};
  double y{0.0};
};

constexpr std::size_t kLandmarkCount = 81;
using LandmarkFrame = std::array<Point2, kLandmarkCount>;

// Index layout of the 81-point markup.
//
//   0..16   jaw contour, image-left to image-right; 8 is the chin
//   17..26  eyebrows
//   27..35  nose
//   36..47  eye contours (36..41 left, 42..47 right)
//   48..67  mouth
//   68, 69  left and right eye centers
//   70..80  forehead arc
namespace landmark {
constexpr std::size_t left_cheek = 0;
constexpr std::size_t right_cheek = 16;
constexpr std::size_t chin = 8;
constexpr std::size_t left_eye_center = 68;
constexpr std::size_t right_eye_center = 69;
}  // namespace landmark

struct LandmarkTrack {
  std::vector<LandmarkFrame> points;
  std::vector<bool> valid;

  std::size_t size() const { return points.size(); }
  std::size_t valid_count() const;
};

constexpr int kDefaultLandmarkSmoothing = 5;

// Centered moving average per coordinate over valid frames. Invalid frames
// are first filled by linear interpolation between the nearest valid
// neighbours (held constant past the ends); validity is passed through so
// callers still know which frames had no detection.
LandmarkTrack smooth_landmarks(const LandmarkTrack& track, int window_frames = kDefaultLandmarkSmoothing);

// Applies a similarity transform about `pivot`: rotate by angle_deg then translate.
LandmarkFrame transform_landmarks(const LandmarkFrame& frame, Point2 pivot, double angle_deg,
                                  Point2 translation = {});

}  // namespace pulsebench
