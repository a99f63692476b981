#pragma once

#include "pulsebench/frames.hpp"
#include "pulsebench/landmarks.hpp"
#include "pulsebench/roi.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace pulsebench {

// n x T x C array of per-block means. values are stored block-major:
// index (block, t, channel) -> (block * T + t) * C + channel.
struct SpatialTemporalMap {
  int blocks{0};
  int frames{0};
  int channels{0};
  double frame_rate_hz{30.0};
  std::vector<double> values;
  std::vector<bool> mask;  // true = column zeroed (augmentation or detector failure)

  SpatialTemporalMap() = default;
  SpatialTemporalMap(int n, int t, int c, double fps)
      : blocks(n), frames(t), channels(c), frame_rate_hz(fps),
        values(static_cast<std::size_t>(n) * t * c, 0.0), mask(t, false) {}

  double& at(int block, int t, int c) {
    return values[(static_cast<std::size_t>(block) * frames + t) * channels + c];
  }
  double at(int block, int t, int c) const {
    return values[(static_cast<std::size_t>(block) * frames + t) * channels + c];
  }
  std::vector<double> row(int block, int c) const;
  std::size_t masked_count() const;
  void zero_column(int t);
};

struct Grid {
  int rows{5};
  int cols{5};
  int blocks() const { return rows * cols; }
};

enum class MapColor {
  yuv,  // RGB input transformed to YUV
  rgb,  // raw RGB block means
};

struct StmapOptions {
  Grid grid{};
  MapColor color{MapColor::yuv};
  SkinRule skin{};
  bool normalize{true};
};

// Throws InputError if the track length differs from the sequence or a valid
// frame has a landmark outside the image.
void validate_track(const LandmarkTrack& track, const FrameSequence& seq);

// Block means for one frame. Returns false when the frame has no skin pixels
// in the ROI. `out` receives blocks * C values in (block, channel) order.
// Blocks without skin take the whole-ROI mean.
bool frame_block_means(const Image& frame, const RoiBox& roi, const Grid& grid,
                       const SkinRule& skin, MapColor color, std::vector<double>& out);

// Spatial-temporal map of a face video. Frames flagged invalid in the track,
// frames with degenerate ROI geometry, and frames with an empty skin mask
// become zero columns with mask[t] = true. Gray input yields C = 1 and no
// color transform.
SpatialTemporalMap build_stmap(const FrameSequence& seq, const LandmarkTrack& track,
                               const StmapOptions& options = {});

// Per-channel min-max scaling of unmasked entries to [0, 1]. A channel with
// min == max is set to 0.5. Masked columns stay exactly zero.
void normalize_map(SpatialTemporalMap& map);

// Columns [start, end) as a new map.
SpatialTemporalMap slice_columns(const SpatialTemporalMap& map, int start, int end);

struct Clip {
  int start{0};
  int end{0};
};

constexpr int kDefaultClipWindow = 300;
constexpr int kDefaultClipStride = 150;

// Clips [k * stride, k * stride + window) that fit in the sequence. Throws
// InputError("sequence too short") when window > seq_len.
std::vector<Clip> sliding_clips(int seq_len, int window = kDefaultClipWindow,
                                int stride = kDefaultClipStride);

struct ClipMap {
  Clip clip;
  SpatialTemporalMap map;
};

// Smoothed landmarks, one map over the whole sequence, then one map per
// sliding clip. Each clip is normalized on its own columns when
// options.normalize is set.
std::vector<ClipMap> clip_maps(const FrameSequence& seq, const LandmarkTrack& track,
                               const StmapOptions& options = {}, int window = kDefaultClipWindow,
                               int stride = kDefaultClipStride,
                               int smoothing = kDefaultLandmarkSmoothing);

struct MaskConfig {
  double p_mask{0.5};
  int min_len{10};
  int max_len{30};
};

// With probability p_mask zeroes one contiguous run of L ~ U{min_len..max_len}
// columns starting at s ~ U{0..T-L}. Throws ConfigError if max_len >= T.
SpatialTemporalMap mask_augment(const SpatialTemporalMap& map, std::mt19937_64& rng,
                                const MaskConfig& config = {});
SpatialTemporalMap mask_augment(const SpatialTemporalMap& map, std::uint64_t seed,
                                const MaskConfig& config = {});

// Zeroes runs of min_len..max_len columns until at least `fraction` of the
// columns are masked. Used to build occluded test maps.
SpatialTemporalMap mask_fraction(const SpatialTemporalMap& map, double fraction,
                                 std::mt19937_64& rng, int min_len = 10, int max_len = 30);

}  // namespace pulsebench
