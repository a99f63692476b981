#include "pulsebench/synth.hpp"

#include "pulsebench/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pulsebench {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHarmonicRatio = 0.3;

// Independent, reproducible generator per (seed, stream).
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

enum Stream : std::uint32_t { phase_stream = 1, motion_stream = 2, noise_stream = 3, gain_stream = 4 };

double bvp_value(double t, double f, double phi) {
  static const double rms = std::sqrt(0.5 * (1.0 + kHarmonicRatio * kHarmonicRatio));
  return (std::sin(kTwoPi * f * t) + kHarmonicRatio * std::sin(2.0 * kTwoPi * f * t + phi)) / rms;
}

double illumination(const SynthConfig& cfg, double t) {
  double gain = 1.0 + cfg.drift_rel_amp * std::sin(kTwoPi * cfg.drift_freq_hz * t);
  if (cfg.step_time_sec >= 0.0 && t >= cfg.step_time_sec) gain *= 1.0 + cfg.step_rel;
  return gain;
}

struct FaceGeometry {
  double cx, cy, ax, ay;
  double eye_y, eye_dx, eye_rx, eye_ry;
};

FaceGeometry face_geometry(int width, int height) {
  FaceGeometry g{};
  g.cx = 0.5 * width;
  g.cy = 0.53 * height;
  g.ax = 0.29 * width;
  g.ay = 0.41 * height;
  g.eye_y = g.cy - 0.25 * g.ay;
  g.eye_dx = 0.4 * g.ax;
  g.eye_rx = 0.18 * g.ax;
  g.eye_ry = 0.07 * g.ay;
  return g;
}

// Fraction of a pixel inside the ellipse, from an approximate signed distance.
double ellipse_coverage(double x, double y, double rx, double ry) {
  const double r = std::sqrt((x * x) / (rx * rx) + (y * y) / (ry * ry));
  const double d = (r - 1.0) * std::min(rx, ry);
  return std::clamp(0.5 - d, 0.0, 1.0);
}

struct Motion {
  double fx, fy, fr, px, py, pr;
};

// 8x8 Bayer thresholds centered on zero. The face is a flat color whose
// pulse swing is only a few gray levels, so plain rounding would quantize
// every skin pixel identically and distort the pulse; a static ordered
// dither lets the ROI average recover sub-level changes.
double dither(int x, int y) {
  static constexpr std::array<int, 64> bayer{
      0,  32, 8,  40, 2,  34, 10, 42, 48, 16, 56, 24, 50, 18, 58, 26,
      12, 44, 4,  36, 14, 46, 6,  38, 60, 28, 52, 20, 62, 30, 54, 22,
      3,  35, 11, 43, 1,  33, 9,  41, 51, 19, 59, 27, 49, 17, 57, 25,
      15, 47, 7,  39, 13, 45, 5,  37, 63, 31, 55, 23, 61, 29, 53, 21};
  return (bayer[(y & 7) * 8 + (x & 7)] + 0.5) / 64.0 - 0.5;
}

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

int SynthConfig::frame_count() const {
  return static_cast<int>(std::lround(duration_sec * fps));
}

void SynthConfig::validate() const {
  generator_band.validate();
  if (!(hr_bpm >= generator_band.lo_bpm && hr_bpm <= generator_band.hi_bpm)) {
    throw ConfigError("SynthConfig: hr outside the generator band");
  }
  if (!(fps > 2.0 * hr_bpm / 60.0)) throw ConfigError("SynthConfig: fps too low for the pulse");
  if (!(duration_sec > 0.0) || frame_count() < 2) throw ConfigError("SynthConfig: duration too short");
  if (width < 16 || height < 16) throw ConfigError("SynthConfig: frame too small");
  if (!(noise_sigma >= 0.0) || !(motion_amp_px >= 0.0) || !(base_intensity > 0.0)) {
    throw ConfigError("SynthConfig: negative noise, motion or intensity");
  }
}

double bvp_harmonic_phase(std::uint64_t seed) {
  auto rng = stream_rng(seed, phase_stream);
  return std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
}

PulseTrace gen_bvp(const SynthConfig& cfg) {
  cfg.validate();
  const int n = cfg.frame_count();
  const double f = cfg.hr_bpm / 60.0;
  const double phi = bvp_harmonic_phase(cfg.seed);
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) p[i] = bvp_value(i / cfg.fps, f, phi);
  return PulseTrace(std::move(p), cfg.fps);
}

std::array<double, 3> skin_tone(double intensity) {
  constexpr std::array<double, 3> tone{200.0, 150.0, 120.0};
  const double luma = 0.299 * tone[0] + 0.587 * tone[1] + 0.114 * tone[2];
  return {tone[0] * intensity / luma, tone[1] * intensity / luma, tone[2] * intensity / luma};
}

LandmarkFrame face_template(int width, int height) {
  const FaceGeometry g = face_geometry(width, height);
  LandmarkFrame p{};
  const auto on_ellipse = [](double cx, double cy, double rx, double ry, double theta) {
    return Point2{cx + rx * std::cos(theta), cy + ry * std::sin(theta)};
  };
  // jaw
  for (int k = 0; k <= 16; ++k) {
    p[k] = on_ellipse(g.cx, g.cy, g.ax, g.ay, std::numbers::pi - k * std::numbers::pi / 16.0);
  }
  // brows
  const double brow_y = g.eye_y - 0.18 * g.ay;
  for (int k = 0; k < 5; ++k) {
    const double s = 0.15 + 0.125 * k;
    p[17 + k] = {g.cx - (0.65 - 0.125 * k) * g.ax, brow_y - 0.03 * g.ay * std::sin(s * 3.0)};
    p[22 + k] = {g.cx + (0.15 + 0.125 * k) * g.ax, brow_y - 0.03 * g.ay * std::sin(s * 3.0)};
  }
  // nose
  for (int k = 0; k < 4; ++k) p[27 + k] = {g.cx, g.eye_y + k * (0.45 * g.ay / 3.0) * 0.6};
  for (int k = 0; k < 5; ++k) p[31 + k] = {g.cx + (k - 2) * 0.075 * g.ax, g.cy + 0.25 * g.ay};
  // eye contours
  for (int k = 0; k < 6; ++k) {
    const double theta = std::numbers::pi - k * kTwoPi / 6.0;
    p[36 + k] = on_ellipse(g.cx - g.eye_dx, g.eye_y, g.eye_rx, g.eye_ry, theta);
    p[42 + k] = on_ellipse(g.cx + g.eye_dx, g.eye_y, g.eye_rx, g.eye_ry, theta);
  }
  // mouth
  const double mouth_y = g.cy + 0.55 * g.ay;
  for (int k = 0; k < 12; ++k) {
    p[48 + k] = on_ellipse(g.cx, mouth_y, 0.35 * g.ax, 0.1 * g.ay, std::numbers::pi - k * kTwoPi / 12.0);
  }
  for (int k = 0; k < 8; ++k) {
    p[60 + k] = on_ellipse(g.cx, mouth_y, 0.2 * g.ax, 0.04 * g.ay, std::numbers::pi - k * kTwoPi / 8.0);
  }
  p[landmark::left_eye_center] = {g.cx - g.eye_dx, g.eye_y};
  p[landmark::right_eye_center] = {g.cx + g.eye_dx, g.eye_y};
  // forehead
  for (int k = 0; k < 11; ++k) {
    const double theta = std::numbers::pi * (200.0 + 14.0 * k) / 180.0;
    p[70 + k] = on_ellipse(g.cx, g.cy, 0.85 * g.ax, 0.85 * g.ay, theta);
  }
  return p;
}

SynthVideo gen_video(const SynthConfig& cfg) {
  const PulseTrace bvp = gen_bvp(cfg);
  const int n = cfg.frame_count();
  const int w = cfg.width;
  const int h = cfg.height;
  const FaceGeometry g = face_geometry(w, h);
  const LandmarkFrame tmpl = face_template(w, h);
  const bool gray = cfg.color == ColorSpace::gray;
  const int channels = gray ? 1 : 3;

  Motion motion{};
  {
    auto rng = stream_rng(cfg.seed, motion_stream);
    std::uniform_real_distribution<double> freq(0.1, 0.4);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    motion = {freq(rng), freq(rng), freq(rng), phase(rng), phase(rng), phase(rng)};
  }
  auto noise_rng = stream_rng(cfg.seed, noise_stream);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 1.0);

  const std::array<double, 3> tone = skin_tone(cfg.base_intensity);
  const double background = 0.45 * cfg.base_intensity;
  constexpr double eye_level = 25.0;

  SynthVideo out{FrameSequence{}, LandmarkTrack{}, bvp};
  out.video.frame_rate_hz = cfg.fps;
  out.video.color_space = cfg.color;
  out.video.frames.reserve(n);
  out.landmarks.points.reserve(n);
  out.landmarks.valid.assign(n, true);

  for (int i = 0; i < n; ++i) {
    const double t = i / cfg.fps;
    const double a = cfg.motion_amp_px;
    const double dx = a * std::sin(kTwoPi * motion.fx * t + motion.px);
    const double dy = a * std::sin(kTwoPi * motion.fy * t + motion.py);
    const double rot = (a / g.ax) * std::sin(kTwoPi * motion.fr * t + motion.pr);
    const double cr = std::cos(rot);
    const double sr = std::sin(rot);

    out.landmarks.points.push_back(
        transform_landmarks(tmpl, {g.cx, g.cy}, rot * 180.0 / std::numbers::pi, {dx, dy}));

    const double light = illumination(cfg, t);
    const double pulse = cfg.pulse_amplitude * bvp.samples()[i];
    std::array<double, 3> skin{};
    for (int c = 0; c < 3; ++c) skin[c] = tone[c] * (1.0 + cfg.pulse_strength[c] * pulse) * light;
    const double bg = background * light;
    const double eye = eye_level * light;

    Image frame(w, h, channels);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        // pixel center in face coordinates (inverse rigid motion)
        const double px = x + 0.5 - g.cx - dx;
        const double py = y + 0.5 - g.cy - dy;
        const double fx = cr * px + sr * py;
        const double fy = -sr * px + cr * py;
        const double face = ellipse_coverage(fx, fy, g.ax, g.ay);
        double eyes = 0.0;
        if (face > 0.0) {
          eyes = std::max(ellipse_coverage(fx + g.eye_dx, fy - (g.eye_y - g.cy), g.eye_rx, g.eye_ry),
                          ellipse_coverage(fx - g.eye_dx, fy - (g.eye_y - g.cy), g.eye_rx, g.eye_ry));
        }
        std::array<double, 3> rgb{};
        for (int c = 0; c < 3; ++c) {
          const double inside = (1.0 - eyes) * skin[c] + eyes * eye;
          rgb[c] = (1.0 - face) * bg + face * inside;
        }
        if (gray) {
          double v = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
          if (cfg.noise_sigma > 0.0) v += noise(noise_rng);
          frame.at(x, y, 0) = to_u8(v + dither(x, y));
        } else {
          for (int c = 0; c < 3; ++c) {
            double v = rgb[c];
            if (cfg.noise_sigma > 0.0) v += noise(noise_rng);
            frame.at(x, y, c) = to_u8(v + dither(x, y));
          }
        }
      }
    }
    out.video.frames.push_back(std::move(frame));
  }
  return out;
}

SynthMap gen_synth_map(const SynthConfig& cfg, const Grid& grid) {
  const PulseTrace bvp = gen_bvp(cfg);
  const int t_len = cfg.frame_count();
  const int n = grid.blocks();
  const bool gray = cfg.color == ColorSpace::gray;
  const int channels = gray ? 1 : 3;

  // Per-channel DC level and pulse amplitude in map units.
  const std::array<double, 3> tone = skin_tone(cfg.base_intensity);
  std::array<double, 3> dc_rgb = tone;
  std::array<double, 3> ac_rgb{};
  for (int c = 0; c < 3; ++c) ac_rgb[c] = tone[c] * cfg.pulse_strength[c] * cfg.pulse_amplitude;
  std::array<double, 3> dc{}, ac{};
  if (gray) {
    dc[0] = 0.299 * dc_rgb[0] + 0.587 * dc_rgb[1] + 0.114 * dc_rgb[2];
    ac[0] = 0.299 * ac_rgb[0] + 0.587 * ac_rgb[1] + 0.114 * ac_rgb[2];
  } else {
    const Yuv d = rgb_to_yuv(dc_rgb[0], dc_rgb[1], dc_rgb[2]);
    const Yuv offset = rgb_to_yuv(0.0, 0.0, 0.0);
    const Yuv a = rgb_to_yuv(ac_rgb[0], ac_rgb[1], ac_rgb[2]);
    dc = {d.y, d.u, d.v};
    ac = {a.y - offset.y, a.u - offset.u, a.v - offset.v};
  }

  auto gain_rng = stream_rng(cfg.seed, gain_stream);
  std::uniform_real_distribution<double> gain_dist(0.5, 1.5);
  std::vector<double> gains(n);
  for (double& gb : gains) gb = gain_dist(gain_rng);

  auto noise_rng = stream_rng(cfg.seed, noise_stream);
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 1.0);

  SpatialTemporalMap map(n, t_len, channels, cfg.fps);
  for (int b = 0; b < n; ++b) {
    for (int t = 0; t < t_len; ++t) {
      const double light = illumination(cfg, t / cfg.fps);
      for (int c = 0; c < channels; ++c) {
        double v = (dc[c] + gains[b] * ac[c] * bvp.samples()[t]) * light;
        if (cfg.noise_sigma > 0.0) v += noise(noise_rng);
        map.at(b, t, c) = v;
      }
    }
  }
  normalize_map(map);
  return {std::move(map), cfg.hr_bpm};
}

SynthConfig draw_config(const SynthConfig& base, const SynthRanges& ranges, std::mt19937_64& rng) {
  SynthConfig cfg = base;
  cfg.hr_bpm = std::uniform_real_distribution<double>(ranges.hr_lo, ranges.hr_hi)(rng);
  cfg.base_intensity =
      std::uniform_real_distribution<double>(ranges.intensity_lo, ranges.intensity_hi)(rng);
  cfg.seed = rng();
  return cfg;
}

std::vector<SynthMap> synth_map_dataset(int count, std::uint64_t seed, const SynthConfig& base,
                                        const SynthRanges& ranges, const Grid& grid) {
  std::mt19937_64 rng(seed);
  std::vector<SynthMap> maps;
  maps.reserve(count);
  for (int i = 0; i < count; ++i) maps.push_back(gen_synth_map(draw_config(base, ranges, rng), grid));
  return maps;
}

}  // namespace pulsebench
