#pragma once

#include "pulsebench/frames.hpp"
#include "pulsebench/landmarks.hpp"
#include "pulsebench/signal.hpp"
#include "pulsebench/stmap.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace pulsebench {

// Parameters of one synthetic face video. Ranges follow the spread seen in
// real recordings: 47-146 bpm and mean face intensity 60-212.
struct SynthConfig {
  double hr_bpm{72.0};
  double duration_sec{20.0};
  double fps{30.0};
  // Per-channel R, G, B pulse strength: the standardized blood-volume pulse
  // signature of skin. The pulse must enter 3R - 2G and 1.5R + G - 1.5B with
  // opposite signs or CHROM's alpha tuning cancels it.
  std::array<double, 3> pulse_strength{0.33, 0.77, 0.53};
  double pulse_amplitude{0.02};                         // AC/DC ratio of the unit-RMS pulse
  double base_intensity{128.0};                         // mean gray level of the skin
  double motion_amp_px{0.0};
  double drift_freq_hz{0.2};
  double drift_rel_amp{0.0};
  double step_time_sec{-1.0};  // illumination step; disabled when negative
  double step_rel{0.0};
  double noise_sigma{0.0};
  std::uint64_t seed{0};
  ColorSpace color{ColorSpace::rgb};
  int width{160};
  int height{140};
  BandConfig generator_band{47.0, 146.0};

  int frame_count() const;
  // Throws ConfigError when hr is outside generator_band, fps is not above
  // twice the pulse frequency, or sizes are non-positive.
  void validate() const;
};

// Unit-RMS pulse sin(2 pi f t) + 0.3 sin(4 pi f t + phi), phi drawn from the seed.
PulseTrace gen_bvp(const SynthConfig& cfg);
double bvp_harmonic_phase(std::uint64_t seed);

struct SynthVideo {
  FrameSequence video;
  LandmarkTrack landmarks;
  PulseTrace bvp;
};

// Skin-tone ellipse on a gray background with dark eyes; 81 landmarks at
// template positions follow the same rigid motion as the pixels.
SynthVideo gen_video(const SynthConfig& cfg);

// Template landmarks for a face centered in a width x height frame.
LandmarkFrame face_template(int width, int height);

// Skin color whose luma equals `intensity`.
std::array<double, 3> skin_tone(double intensity);

struct SynthMap {
  SpatialTemporalMap map;
  double hr_bpm{0.0};
};

// Spatial-temporal map synthesized directly, skipping rendering: every block
// carries base + gain_b * pulse + noise in YUV (or gray), then the standard
// per-channel normalization.
SynthMap gen_synth_map(const SynthConfig& cfg, const Grid& grid = {});

// Parameter ranges for drawing random configs.
struct SynthRanges {
  double hr_lo{47.0}, hr_hi{146.0};
  double intensity_lo{60.0}, intensity_hi{212.0};
};

// Copy of `base` with hr, base intensity, harmonic phase seed and noise seed
// drawn from rng.
SynthConfig draw_config(const SynthConfig& base, const SynthRanges& ranges, std::mt19937_64& rng);

std::vector<SynthMap> synth_map_dataset(int count, std::uint64_t seed, const SynthConfig& base,
                                        const SynthRanges& ranges = {}, const Grid& grid = {});

}  // namespace pulsebench
