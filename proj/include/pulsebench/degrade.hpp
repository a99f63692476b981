#pragma once

#include "pulsebench/classic.hpp"
#include "pulsebench/frames.hpp"
#include "pulsebench/landmarks.hpp"
#include "pulsebench/synth.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace pulsebench {

// Codec and resolution proxies for studying how lossy storage affects the
// pulse signal.
struct DegradeOp {
  enum class Kind { identity, resize, quantize, frame_drop };
  Kind kind{Kind::identity};
  double scale{1.0};     // resize, in (0, 1]
  int quality{100};      // quantize, 1..100
  double drop_p{0.0};    // frame_drop
  std::uint64_t seed{0}; // frame_drop

  static DegradeOp identity() { return {}; }
  static DegradeOp resize(double scale) { return {Kind::resize, scale}; }
  static DegradeOp quantize(int quality) { return {Kind::quantize, 1.0, quality}; }
  static DegradeOp frame_drop(double p, std::uint64_t seed) {
    return {Kind::frame_drop, 1.0, 100, p, seed};
  }

  void validate() const;
  std::string label() const;
};

// Parses "identity", "resize:0.6667", "resize:2/3", "quantize:10", "drop:0.1[:seed]".
DegradeOp parse_degrade_op(const std::string& text);

// Area-average downscale; output size is round(W * scale) x round(H * scale).
Image resize_area(const Image& image, double scale);

// JPEG-style intra-frame coding proxy: every channel is split into 8x8
// blocks, DCT-transformed, quantized with the quality-scaled luminance table,
// reconstructed and rounded to 8 bits.
Image quantize_dct(const Image& image, int quality);

// 8x8 JPEG luminance table scaled for quality 1..100.
std::array<int, 64> quality_table(int quality);

// Frame count and frame rate are preserved.
FrameSequence degrade(const FrameSequence& seq, const DegradeOp& op);

// Scales landmark coordinates to match a resized sequence.
LandmarkTrack scale_landmarks(const LandmarkTrack& track, double sx, double sy);

struct VideoHr {
  std::vector<HrEstimate> clips;
  double mean_bpm{0.0};
};

// Per-clip estimates over sliding windows and their mean. Traces shorter
// than one window are estimated as a single clip.
VideoHr estimate_video(const RgbTrace& trace, ClassicMethod method, const BandConfig& band,
                       int window = kDefaultClipWindow, int stride = kDefaultClipStride);

struct StudyRow {
  std::string label;
  double rmse_bpm{0.0};
  double delta_vs_source{0.0};
  std::vector<double> estimates;
};

// First row is "Source" (undegraded); one row per op follows.
std::vector<StudyRow> compression_study(const std::vector<SynthConfig>& suite,
                                        const std::vector<DegradeOp>& ops, ClassicMethod method,
                                        const BandConfig& band = {});

// Ten 20 s videos with moderate noise, motion and illumination drift.
std::vector<SynthConfig> default_study_suite(std::uint64_t seed = 2019, int count = 10);

std::string study_csv(const std::vector<StudyRow>& rows);

}  // namespace pulsebench
