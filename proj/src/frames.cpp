#include "pulsebench/frames.hpp"
#include "pulsebench/landmarks.hpp"

#include "pulsebench/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pulsebench {

void FrameSequence::validate() const {
  if (!(std::isfinite(frame_rate_hz) && frame_rate_hz > 0.0)) {
    throw InputError("FrameSequence: frame rate must be positive");
  }
  if (frames.empty()) return;
  const int c = channels();
  const Image& first = frames.front();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Image& f = frames[i];
    if (f.width != first.width || f.height != first.height || f.channels != c ||
        f.data.size() != static_cast<std::size_t>(f.width) * f.height * f.channels) {
      throw InputError("FrameSequence: frame " + std::to_string(i) +
                       " has inconsistent dimensions or channel count");
    }
  }
}

std::size_t LandmarkTrack::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

LandmarkTrack smooth_landmarks(const LandmarkTrack& track, int window_frames) {
  if (window_frames < 1 || window_frames % 2 == 0) {
    throw ConfigError("smooth_landmarks: window must be odd and >= 1");
  }
  if (track.valid.size() != track.points.size()) {
    throw InputError("smooth_landmarks: validity flags do not match point count");
  }
  const long n = static_cast<long>(track.size());
  std::vector<long> valid_idx;
  for (long i = 0; i < n; ++i) {
    if (track.valid[i]) valid_idx.push_back(i);
  }
  if (valid_idx.empty()) throw InputError("smooth_landmarks: no valid frames");

  // Gap filling.
  std::vector<LandmarkFrame> filled(track.points);
  std::size_t next = 0;
  for (long i = 0; i < n; ++i) {
    if (track.valid[i]) continue;
    while (next < valid_idx.size() && valid_idx[next] < i) ++next;
    if (next == 0) {
      filled[i] = track.points[valid_idx.front()];
    } else if (next == valid_idx.size()) {
      filled[i] = track.points[valid_idx.back()];
    } else {
      const long a = valid_idx[next - 1];
      const long b = valid_idx[next];
      const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
      for (std::size_t k = 0; k < kLandmarkCount; ++k) {
        filled[i][k].x = (1.0 - t) * track.points[a][k].x + t * track.points[b][k].x;
        filled[i][k].y = (1.0 - t) * track.points[a][k].y + t * track.points[b][k].y;
      }
    }
  }

  LandmarkTrack out;
  out.valid = track.valid;
  out.points.resize(n);
  const long half = window_frames / 2;
  for (long i = 0; i < n; ++i) {
    const long a = std::max(0L, i - half);
    const long b = std::min(n - 1, i + half);
    const double count = static_cast<double>(b - a + 1);
    for (std::size_t k = 0; k < kLandmarkCount; ++k) {
      double sx = 0.0;
      double sy = 0.0;
      for (long j = a; j <= b; ++j) {
        sx += filled[j][k].x;
        sy += filled[j][k].y;
      }
      out.points[i][k] = {sx / count, sy / count};
    }
  }
  return out;
}

LandmarkFrame transform_landmarks(const LandmarkFrame& frame, Point2 pivot, double angle_deg,
                                  Point2 translation) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  LandmarkFrame out;
  for (std::size_t k = 0; k < kLandmarkCount; ++k) {
    const double dx = frame[k].x - pivot.x;
    const double dy = frame[k].y - pivot.y;
    out[k] = {pivot.x + c * dx - s * dy + translation.x, pivot.y + s * dx + c * dy + translation.y};
  }
  return out;
}

}  // namespace pulsebench
