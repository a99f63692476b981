#include "pulsebench/stmap.hpp"

#include "pulsebench/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pulsebench {

std::vector<double> SpatialTemporalMap::row(int block, int c) const {
  std::vector<double> r(frames);
  for (int t = 0; t < frames; ++t) r[t] = at(block, t, c);
  return r;
}

std::size_t SpatialTemporalMap::masked_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

void SpatialTemporalMap::zero_column(int t) {
  for (int b = 0; b < blocks; ++b) {
    for (int c = 0; c < channels; ++c) at(b, t, c) = 0.0;
  }
  mask[t] = true;
}

void validate_track(const LandmarkTrack& track, const FrameSequence& seq) {
  if (track.size() != seq.size() || track.valid.size() != seq.size()) {
    throw InputError("landmark track has " + std::to_string(track.size()) + " frames, video has " +
                     std::to_string(seq.size()));
  }
  const double w = seq.width();
  const double h = seq.height();
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (!track.valid[i]) continue;
    for (const Point2& p : track.points[i]) {
      if (!(p.x >= 0.0 && p.x < w && p.y >= 0.0 && p.y < h)) {
        throw InputError("landmark outside the image in frame " + std::to_string(i));
      }
    }
  }
}

bool frame_block_means(const Image& frame, const RoiBox& roi, const Grid& grid,
                       const SkinRule& skin, MapColor color, std::vector<double>& out) {
  const int in_c = frame.channels;
  const int n = grid.blocks();
  const int nu = std::max(1, static_cast<int>(std::ceil(roi.width)));
  const int nv = std::max(1, static_cast<int>(std::ceil(roi.box_height())));
  const double su = roi.width / nu;
  const double sv = roi.box_height() / nv;
  const Point2 ex = roi.x_axis();
  const Point2 ey = roi.y_axis();

  std::vector<double> sums(static_cast<std::size_t>(n) * in_c, 0.0);
  std::vector<long> counts(n, 0);
  std::array<double, 3> px{};
  for (int j = 0; j < nv; ++j) {
    const double v = (j + 0.5) * sv;
    const int brow = std::min(grid.rows - 1, j * grid.rows / nv);
    for (int i = 0; i < nu; ++i) {
      const double u = (i + 0.5) * su;
      const double x = roi.origin.x + u * ex.x + v * ey.x;
      const double y = roi.origin.y + u * ex.y + v * ey.y;
      if (!sample_bilinear(frame, x, y, px)) continue;
      if (in_c == 3 && !skin.accepts(rgb_to_yuv(px[0], px[1], px[2]))) continue;
      const int b = brow * grid.cols + std::min(grid.cols - 1, i * grid.cols / nu);
      for (int c = 0; c < in_c; ++c) sums[static_cast<std::size_t>(b) * in_c + c] += px[c];
      ++counts[b];
    }
  }

  long total = 0;
  std::array<double, 3> roi_sum{};
  for (int b = 0; b < n; ++b) {
    total += counts[b];
    for (int c = 0; c < in_c; ++c) roi_sum[c] += sums[static_cast<std::size_t>(b) * in_c + c];
  }
  if (total == 0) return false;

  const int out_c = in_c;
  out.assign(static_cast<std::size_t>(n) * out_c, 0.0);
  for (int b = 0; b < n; ++b) {
    std::array<double, 3> mean{};
    for (int c = 0; c < in_c; ++c) {
      mean[c] = counts[b] > 0 ? sums[static_cast<std::size_t>(b) * in_c + c] / counts[b]
                              : roi_sum[c] / total;
    }
    double* dst = &out[static_cast<std::size_t>(b) * out_c];
    if (in_c == 3 && color == MapColor::yuv) {
      const Yuv yuv = rgb_to_yuv(mean[0], mean[1], mean[2]);
      dst[0] = yuv.y;
      dst[1] = yuv.u;
      dst[2] = yuv.v;
    } else {
      for (int c = 0; c < in_c; ++c) dst[c] = mean[c];
    }
  }
  return true;
}

SpatialTemporalMap build_stmap(const FrameSequence& seq, const LandmarkTrack& track,
                               const StmapOptions& options) {
  seq.validate();
  validate_track(track, seq);
  if (options.grid.rows < 1 || options.grid.cols < 1) {
    throw ConfigError("build_stmap: grid must have at least one row and column");
  }
  if (track.valid_count() == 0) throw InputError("build_stmap: no valid landmark frames");

  const int t_len = static_cast<int>(seq.size());
  const int n = options.grid.blocks();
  const int c_len = seq.channels();
  SpatialTemporalMap map(n, t_len, c_len, seq.frame_rate_hz);

  std::vector<double> column;
  for (int t = 0; t < t_len; ++t) {
    bool ok = track.valid[t];
    if (ok) {
      try {
        const RoiBox roi = compute_roi(track.points[t]);
        ok = frame_block_means(seq.frames[t], roi, options.grid, options.skin, options.color,
                               column);
      } catch (const InputError&) {
        ok = false;
      }
    }
    if (!ok) {
      map.zero_column(t);
      continue;
    }
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < c_len; ++c) map.at(b, t, c) = column[static_cast<std::size_t>(b) * c_len + c];
    }
  }
  if (map.masked_count() == static_cast<std::size_t>(t_len)) {
    throw InputError("build_stmap: no frame produced a usable face region");
  }
  if (options.normalize) normalize_map(map);
  return map;
}

void normalize_map(SpatialTemporalMap& map) {
  for (int c = 0; c < map.channels; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < map.blocks; ++b) {
      for (int t = 0; t < map.frames; ++t) {
        if (map.mask[t]) continue;
        lo = std::min(lo, map.at(b, t, c));
        hi = std::max(hi, map.at(b, t, c));
      }
    }
    if (!(hi >= lo)) continue;  // every column masked
    const double range = hi - lo;
    for (int b = 0; b < map.blocks; ++b) {
      for (int t = 0; t < map.frames; ++t) {
        if (map.mask[t]) continue;
        double& v = map.at(b, t, c);
        v = range > 0.0 ? (v - lo) / range : 0.5;
      }
    }
  }
}

SpatialTemporalMap slice_columns(const SpatialTemporalMap& map, int start, int end) {
  if (start < 0 || end > map.frames || start >= end) {
    throw ConfigError("slice_columns: invalid column range");
  }
  SpatialTemporalMap out(map.blocks, end - start, map.channels, map.frame_rate_hz);
  for (int b = 0; b < map.blocks; ++b) {
    for (int t = start; t < end; ++t) {
      for (int c = 0; c < map.channels; ++c) out.at(b, t - start, c) = map.at(b, t, c);
    }
  }
  for (int t = start; t < end; ++t) out.mask[t - start] = map.mask[t];
  return out;
}

std::vector<Clip> sliding_clips(int seq_len, int window, int stride) {
  if (window < 1 || stride < 1) throw ConfigError("sliding_clips: window and stride must be >= 1");
  if (window > seq_len) {
    throw InputError("sequence too short: " + std::to_string(seq_len) + " frames, window " +
                     std::to_string(window));
  }
  std::vector<Clip> clips;
  for (int start = 0; start + window <= seq_len; start += stride) {
    clips.push_back({start, start + window});
  }
  return clips;
}

namespace {

void check_mask_config(const SpatialTemporalMap& map, const MaskConfig& config) {
  if (!(config.p_mask >= 0.0 && config.p_mask <= 1.0)) {
    throw ConfigError("mask_augment: p_mask must be in [0, 1]");
  }
  if (config.min_len < 1 || config.min_len > config.max_len) {
    throw ConfigError("mask_augment: require 1 <= min_len <= max_len");
  }
  if (config.max_len >= map.frames) {
    throw ConfigError("mask_augment: max mask length must be shorter than the map");
  }
}

}  // namespace

SpatialTemporalMap mask_augment(const SpatialTemporalMap& map, std::mt19937_64& rng,
                                const MaskConfig& config) {
  check_mask_config(map, config);
  SpatialTemporalMap out = map;
  std::bernoulli_distribution apply(config.p_mask);
  if (!apply(rng)) return out;
  std::uniform_int_distribution<int> length(config.min_len, config.max_len);
  const int len = length(rng);
  std::uniform_int_distribution<int> start(0, map.frames - len);
  const int s = start(rng);
  for (int t = s; t < s + len; ++t) out.zero_column(t);
  return out;
}

SpatialTemporalMap mask_augment(const SpatialTemporalMap& map, std::uint64_t seed,
                                const MaskConfig& config) {
  std::mt19937_64 rng(seed);
  return mask_augment(map, rng, config);
}

SpatialTemporalMap mask_fraction(const SpatialTemporalMap& map, double fraction,
                                 std::mt19937_64& rng, int min_len, int max_len) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ConfigError("mask_fraction: fraction in [0, 1)");
  SpatialTemporalMap out = map;
  const auto target = static_cast<std::size_t>(std::ceil(fraction * map.frames));
  std::uniform_int_distribution<int> length(min_len, std::min(max_len, map.frames));
  while (out.masked_count() < target) {
    const int len = length(rng);
    std::uniform_int_distribution<int> start(0, map.frames - len);
    const int s = start(rng);
    for (int t = s; t < s + len; ++t) out.zero_column(t);
  }
  return out;
}

std::vector<ClipMap> clip_maps(const FrameSequence& seq, const LandmarkTrack& track,
                               const StmapOptions& options, int window, int stride, int smoothing) {
  const std::vector<Clip> clips = sliding_clips(static_cast<int>(seq.size()), window, stride);
  StmapOptions raw = options;
  raw.normalize = false;
  const SpatialTemporalMap full = build_stmap(seq, smooth_landmarks(track, smoothing), raw);
  std::vector<ClipMap> out;
  out.reserve(clips.size());
  for (const Clip& c : clips) {
    SpatialTemporalMap m = slice_columns(full, c.start, c.end);
    if (options.normalize) normalize_map(m);
    out.push_back({c, std::move(m)});
  }
  return out;
}

}  // namespace pulsebench
