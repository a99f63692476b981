#include "pulsebench/degrade.hpp"

#include "pulsebench/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace pulsebench {

namespace {

constexpr std::array<int, 64> kLuminanceTable{
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

// Orthonormal 8-point DCT-II basis: basis[k][n].
const std::array<std::array<double, 8>, 8>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, 8>, 8> m{};
    for (int k = 0; k < 8; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n) {
        m[k][n] = scale * std::cos(std::numbers::pi * (2 * n + 1) * k / 16.0);
      }
    }
    return m;
  }();
  return basis;
}

void dct8x8(const double in[64], double out[64]) {
  const auto& m = dct_basis();
  double tmp[64];
  for (int y = 0; y < 8; ++y) {
    for (int k = 0; k < 8; ++k) {
      double acc = 0.0;
      for (int x = 0; x < 8; ++x) acc += m[k][x] * in[y * 8 + x];
      tmp[y * 8 + k] = acc;
    }
  }
  for (int k = 0; k < 8; ++k) {
    for (int l = 0; l < 8; ++l) {
      double acc = 0.0;
      for (int y = 0; y < 8; ++y) acc += m[l][y] * tmp[y * 8 + k];
      out[l * 8 + k] = acc;
    }
  }
}

void idct8x8(const double in[64], double out[64]) {
  const auto& m = dct_basis();
  double tmp[64];
  for (int l = 0; l < 8; ++l) {
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 8; ++k) acc += m[k][x] * in[l * 8 + k];
      tmp[l * 8 + x] = acc;
    }
  }
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int l = 0; l < 8; ++l) acc += m[l][y] * tmp[l * 8 + x];
      out[y * 8 + x] = acc;
    }
  }
}

double parse_number(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    }
    return std::stod(s);
  } catch (const std::exception&) {
    throw ConfigError("bad number '" + s + "' in degrade op");
  }
}

}  // namespace

void DegradeOp::validate() const {
  switch (kind) {
    case Kind::identity: return;
    case Kind::resize:
      if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError("resize scale must be in (0, 1]");
      return;
    case Kind::quantize:
      if (quality < 1 || quality > 100) throw ConfigError("quality must be in [1, 100]");
      return;
    case Kind::frame_drop:
      if (!(drop_p >= 0.0 && drop_p <= 1.0)) throw ConfigError("drop probability must be in [0, 1]");
      return;
  }
}

std::string DegradeOp::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::identity: os << "identity"; break;
    case Kind::resize: os << "resize:" << scale; break;
    case Kind::quantize: os << "quantize:" << quality; break;
    case Kind::frame_drop: os << "drop:" << drop_p; break;
  }
  return os.str();
}

DegradeOp parse_degrade_op(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty degrade op");
  DegradeOp op;
  const std::string& kind = parts[0];
  if (kind == "identity" && parts.size() == 1) {
    op = DegradeOp::identity();
  } else if (kind == "resize" && parts.size() == 2) {
    op = DegradeOp::resize(parse_number(parts[1]));
  } else if ((kind == "quantize" || kind == "mjpg") && parts.size() == 2) {
    op = DegradeOp::quantize(static_cast<int>(std::lround(parse_number(parts[1]))));
  } else if (kind == "drop" && (parts.size() == 2 || parts.size() == 3)) {
    const auto seed = parts.size() == 3 ? static_cast<std::uint64_t>(parse_number(parts[2])) : 0;
    op = DegradeOp::frame_drop(parse_number(parts[1]), seed);
  } else {
    throw ConfigError("unknown degrade op '" + text + "'");
  }
  op.validate();
  return op;
}

Image resize_area(const Image& image, double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError("resize_area: scale must be in (0, 1]");
  const int ow = std::max(1, static_cast<int>(std::lround(image.width * scale)));
  const int oh = std::max(1, static_cast<int>(std::lround(image.height * scale)));
  const double sx = static_cast<double>(image.width) / ow;
  const double sy = static_cast<double>(image.height) / oh;
  Image out(ow, oh, image.channels);

  // Overlap weights of each output column/row with source columns/rows.
  struct Span {
    int first;
    std::vector<double> weights;
  };
  const auto spans = [](int out_len, double step) {
    std::vector<Span> result(out_len);
    for (int i = 0; i < out_len; ++i) {
      const double a = i * step;
      const double b = (i + 1) * step;
      Span s{static_cast<int>(std::floor(a)), {}};
      for (int k = s.first; k < b - 1e-12; ++k) {
        s.weights.push_back(std::min<double>(b, k + 1) - std::max<double>(a, k));
      }
      result[i] = std::move(s);
    }
    return result;
  };
  const auto xs = spans(ow, sx);
  const auto ys = spans(oh, sy);
  const double area = sx * sy;
  for (int j = 0; j < oh; ++j) {
    for (int i = 0; i < ow; ++i) {
      for (int c = 0; c < image.channels; ++c) {
        double acc = 0.0;
        for (std::size_t dy = 0; dy < ys[j].weights.size(); ++dy) {
          const int y = std::min(image.height - 1, ys[j].first + static_cast<int>(dy));
          for (std::size_t dx = 0; dx < xs[i].weights.size(); ++dx) {
            const int x = std::min(image.width - 1, xs[i].first + static_cast<int>(dx));
            acc += ys[j].weights[dy] * xs[i].weights[dx] * image.at(x, y, c);
          }
        }
        out.at(i, j, c) = static_cast<std::uint8_t>(std::clamp(std::lround(acc / area), 0L, 255L));
      }
    }
  }
  return out;
}

std::array<int, 64> quality_table(int quality) {
  if (quality < 1 || quality > 100) throw ConfigError("quality must be in [1, 100]");
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> table{};
  for (int i = 0; i < 64; ++i) table[i] = std::clamp((kLuminanceTable[i] * scale + 50) / 100, 1, 255);
  return table;
}

Image quantize_dct(const Image& image, int quality) {
  const auto table = quality_table(quality);
  Image out(image.width, image.height, image.channels);
  double block[64];
  double coeff[64];
  for (int c = 0; c < image.channels; ++c) {
    for (int by = 0; by < image.height; by += 8) {
      for (int bx = 0; bx < image.width; bx += 8) {
        // Partial blocks are padded by edge replication.
        for (int y = 0; y < 8; ++y) {
          const int sy = std::min(by + y, image.height - 1);
          for (int x = 0; x < 8; ++x) {
            const int sx = std::min(bx + x, image.width - 1);
            block[y * 8 + x] = image.at(sx, sy, c) - 128.0;
          }
        }
        dct8x8(block, coeff);
        for (int i = 0; i < 64; ++i) coeff[i] = std::round(coeff[i] / table[i]) * table[i];
        idct8x8(coeff, block);
        for (int y = 0; y < 8 && by + y < image.height; ++y) {
          for (int x = 0; x < 8 && bx + x < image.width; ++x) {
            out.at(bx + x, by + y, c) =
                static_cast<std::uint8_t>(std::clamp(std::lround(block[y * 8 + x] + 128.0), 0L, 255L));
          }
        }
      }
    }
  }
  return out;
}

FrameSequence degrade(const FrameSequence& seq, const DegradeOp& op) {
  op.validate();
  FrameSequence out;
  out.frame_rate_hz = seq.frame_rate_hz;
  out.color_space = seq.color_space;
  out.frames.reserve(seq.size());
  switch (op.kind) {
    case DegradeOp::Kind::identity:
      out.frames = seq.frames;
      break;
    case DegradeOp::Kind::resize:
      for (const Image& f : seq.frames) out.frames.push_back(resize_area(f, op.scale));
      break;
    case DegradeOp::Kind::quantize:
      for (const Image& f : seq.frames) out.frames.push_back(quantize_dct(f, op.quality));
      break;
    case DegradeOp::Kind::frame_drop: {
      std::mt19937_64 rng(op.seed);
      std::bernoulli_distribution drop(op.drop_p);
      for (std::size_t i = 0; i < seq.size(); ++i) {
        const bool dropped = drop(rng);
        out.frames.push_back(i > 0 && dropped ? out.frames.back() : seq.frames[i]);
      }
      break;
    }
  }
  return out;
}

LandmarkTrack scale_landmarks(const LandmarkTrack& track, double sx, double sy) {
  LandmarkTrack out = track;
  for (auto& frame : out.points) {
    for (Point2& p : frame) {
      p.x *= sx;
      p.y *= sy;
    }
  }
  return out;
}

VideoHr estimate_video(const RgbTrace& trace, ClassicMethod method, const BandConfig& band,
                       int window, int stride) {
  VideoHr result;
  const int n = static_cast<int>(trace.size());
  const std::vector<Clip> clips =
      n >= window ? sliding_clips(n, window, stride) : std::vector<Clip>{{0, n}};
  double sum = 0.0;
  for (std::size_t k = 0; k < clips.size(); ++k) {
    HrEstimate e = estimate_classic(trace.slice(clips[k].start, clips[k].end), method, band);
    e.clip_index = static_cast<int>(k);
    e.window_start_frame = clips[k].start;
    sum += e.bpm;
    result.clips.push_back(e);
  }
  result.mean_bpm = sum / static_cast<double>(clips.size());
  return result;
}

namespace {

double rmse(const std::vector<double>& est, const std::vector<double>& truth) {
  double acc = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) acc += (est[i] - truth[i]) * (est[i] - truth[i]);
  return std::sqrt(acc / static_cast<double>(est.size()));
}

}  // namespace

std::vector<StudyRow> compression_study(const std::vector<SynthConfig>& suite,
                                        const std::vector<DegradeOp>& ops, ClassicMethod method,
                                        const BandConfig& band) {
  if (suite.empty()) throw ConfigError("compression_study: empty suite");
  for (const DegradeOp& op : ops) op.validate();

  std::vector<StudyRow> rows(ops.size() + 1);
  rows[0].label = "Source";
  for (std::size_t k = 0; k < ops.size(); ++k) rows[k + 1].label = ops[k].label();
  std::vector<double> truth;

  for (const SynthConfig& cfg : suite) {
    const SynthVideo sv = gen_video(cfg);
    truth.push_back(cfg.hr_bpm);
    rows[0].estimates.push_back(
        estimate_video(extract_rgb_trace(sv.video, sv.landmarks), method, band).mean_bpm);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const FrameSequence degraded = degrade(sv.video, ops[k]);
      const double sx = static_cast<double>(degraded.width()) / sv.video.width();
      const double sy = static_cast<double>(degraded.height()) / sv.video.height();
      const LandmarkTrack track =
          sx == 1.0 && sy == 1.0 ? sv.landmarks : scale_landmarks(sv.landmarks, sx, sy);
      rows[k + 1].estimates.push_back(
          estimate_video(extract_rgb_trace(degraded, track), method, band).mean_bpm);
    }
  }
  for (StudyRow& row : rows) row.rmse_bpm = rmse(row.estimates, truth);
  for (StudyRow& row : rows) row.delta_vs_source = row.rmse_bpm - rows[0].rmse_bpm;
  return rows;
}

std::vector<SynthConfig> default_study_suite(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  SynthConfig base;
  base.duration_sec = 20.0;
  base.noise_sigma = 2.0;
  base.motion_amp_px = 1.5;
  base.drift_freq_hz = 0.15;
  base.drift_rel_amp = 0.05;
  SynthRanges ranges;
  ranges.hr_lo = 55.0;
  ranges.hr_hi = 140.0;
  ranges.intensity_lo = 90.0;
  ranges.intensity_hi = 190.0;
  std::vector<SynthConfig> suite;
  for (int i = 0; i < count; ++i) suite.push_back(draw_config(base, ranges, rng));
  return suite;
}

std::string study_csv(const std::vector<StudyRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "op,rmse_bpm,delta_vs_source_bpm\n";
  for (const StudyRow& row : rows) os << row.label << ',' << row.rmse_bpm << ',' << row.delta_vs_source << '\n';
  return os.str();
}

}  // namespace pulsebench
