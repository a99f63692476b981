#pragma once

#include "pulsebench/frames.hpp"
#include "pulsebench/landmarks.hpp"
#include "pulsebench/signal.hpp"
#include "pulsebench/stmap.hpp"

#include <string_view>
#include <vector>

namespace pulsebench {

// Per-frame skin-pixel means of the face ROI.
struct RgbTrace {
  std::vector<double> r, g, b;
  double sample_rate_hz{30.0};

  std::size_t size() const { return g.size(); }
  // Throws InputError on unequal lengths, non-finite values or a bad rate.
  void validate() const;
  RgbTrace slice(std::size_t start, std::size_t end) const;
};

// Whole-ROI mean per frame: the 1x1-grid RGB map before normalization.
// Frames without a usable ROI hold the previous usable frame's value (the
// first usable value before it). Gray input is replicated into r, g and b.
RgbTrace extract_rgb_trace(const FrameSequence& seq, const LandmarkTrack& track,
                           const SkinRule& skin = {});

constexpr double kDefaultPosWindowSec = 1.6;

// Shared front end: mean-normalize, detrend, band-pass.
PulseTrace pulse_front_end(const std::vector<double>& x, double sample_rate_hz, const BandConfig& band);

// Green-channel pulse.
PulseTrace green_pulse(const RgbTrace& trace, const BandConfig& band);
HrEstimate green_hr(const RgbTrace& trace, const BandConfig& band);

// Chrominance pulse: Xc = 3Rn - 2Gn, Yc = 1.5Rn + Gn - 1.5Bn, S = Xf - alpha Yf.
// Throws InputError for non-positive channel means or a flat result.
PulseTrace chrom_pulse(const RgbTrace& trace, const BandConfig& band);
HrEstimate chrom_hr(const RgbTrace& trace, const BandConfig& band);

// Plane-orthogonal-to-skin pulse with overlap-add over windows of
// round(window_sec * fs) frames.
PulseTrace pos_pulse(const RgbTrace& trace, const BandConfig& band,
                     double window_sec = kDefaultPosWindowSec);
HrEstimate pos_hr(const RgbTrace& trace, const BandConfig& band,
                  double window_sec = kDefaultPosWindowSec);

enum class ClassicMethod { green, chrom, pos };

// Throws ConfigError for an unknown name.
ClassicMethod parse_classic_method(std::string_view name);
std::string_view to_string(ClassicMethod method);

HrEstimate estimate_classic(const RgbTrace& trace, ClassicMethod method, const BandConfig& band);

}  // namespace pulsebench
