#include "pulsebench/classic.hpp"

#include "pulsebench/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace pulsebench {

namespace {

// Standard deviations below this are treated as zero; inputs are
// mean-normalized so signals are O(1e-2).
constexpr double kFlatStd = 1e-12;

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double std_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

std::vector<double> mean_normalized(const std::vector<double>& x, const char* channel) {
  const double m = mean_of(x);
  if (!(m > 0.0)) {
    throw InputError(std::string("channel ") + channel + " has non-positive mean");
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / m;
  return out;
}

PulseTrace filter_pulse(std::vector<double> x, double fs, const BandConfig& band) {
  return bandpass(detrend(PulseTrace(std::move(x), fs)), band);
}

}  // namespace

void RgbTrace::validate() const {
  if (r.size() != g.size() || b.size() != g.size()) {
    throw InputError("RgbTrace: channel lengths differ");
  }
  if (!(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0)) {
    throw InputError("RgbTrace: sample rate must be positive");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(g[i]) || !std::isfinite(b[i])) {
      throw InputError("RgbTrace: non-finite value at frame " + std::to_string(i));
    }
  }
}

RgbTrace RgbTrace::slice(std::size_t start, std::size_t end) const {
  if (start >= end || end > size()) throw ConfigError("RgbTrace::slice: invalid range");
  RgbTrace out;
  out.sample_rate_hz = sample_rate_hz;
  out.r.assign(r.begin() + start, r.begin() + end);
  out.g.assign(g.begin() + start, g.begin() + end);
  out.b.assign(b.begin() + start, b.begin() + end);
  return out;
}

RgbTrace extract_rgb_trace(const FrameSequence& seq, const LandmarkTrack& track, const SkinRule& skin) {
  StmapOptions options;
  options.grid = {1, 1};
  options.color = MapColor::rgb;
  options.skin = skin;
  options.normalize = false;
  const SpatialTemporalMap map = build_stmap(seq, track, options);

  RgbTrace trace;
  trace.sample_rate_hz = map.frame_rate_hz;
  const int c_len = map.channels;
  int first_usable = 0;
  while (map.mask[first_usable]) ++first_usable;
  int source = first_usable;
  for (int t = 0; t < map.frames; ++t) {
    if (!map.mask[t]) source = t;
    trace.r.push_back(map.at(0, source, 0));
    trace.g.push_back(map.at(0, source, c_len == 3 ? 1 : 0));
    trace.b.push_back(map.at(0, source, c_len == 3 ? 2 : 0));
  }
  return trace;
}

PulseTrace pulse_front_end(const std::vector<double>& x, double sample_rate_hz, const BandConfig& band) {
  return filter_pulse(mean_normalized(x, "signal"), sample_rate_hz, band);
}

PulseTrace green_pulse(const RgbTrace& trace, const BandConfig& band) {
  trace.validate();
  return filter_pulse(mean_normalized(trace.g, "g"), trace.sample_rate_hz, band);
}

HrEstimate green_hr(const RgbTrace& trace, const BandConfig& band) {
  return spectral_hr(green_pulse(trace, band), band);
}

PulseTrace chrom_pulse(const RgbTrace& trace, const BandConfig& band) {
  trace.validate();
  const auto rn = mean_normalized(trace.r, "r");
  const auto gn = mean_normalized(trace.g, "g");
  const auto bn = mean_normalized(trace.b, "b");
  const std::size_t n = rn.size();
  std::vector<double> xc(n), yc(n);
  for (std::size_t i = 0; i < n; ++i) {
    xc[i] = 3.0 * rn[i] - 2.0 * gn[i];
    yc[i] = 1.5 * rn[i] + gn[i] - 1.5 * bn[i];
  }
  const double fs = trace.sample_rate_hz;
  const PulseTrace xf = filter_pulse(std::move(xc), fs, band);
  const PulseTrace yf = filter_pulse(std::move(yc), fs, band);
  const double sy = std_of(yf.samples());
  const double alpha = sy > kFlatStd ? std_of(xf.samples()) / sy : 0.0;
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = xf.samples()[i] - alpha * yf.samples()[i];
  if (!(std_of(s) > kFlatStd)) {
    throw InputError("chrom: chrominance signal is flat (degenerate channels)");
  }
  return PulseTrace(std::move(s), fs);
}

HrEstimate chrom_hr(const RgbTrace& trace, const BandConfig& band) {
  return spectral_hr(chrom_pulse(trace, band), band);
}

PulseTrace pos_pulse(const RgbTrace& trace, const BandConfig& band, double window_sec) {
  trace.validate();
  const double fs = trace.sample_rate_hz;
  const std::size_t n = trace.size();
  const auto len = static_cast<std::size_t>(std::lround(window_sec * fs));
  if (len < 2 || len > n) throw ConfigError("pos: window must span 2..N frames");
  // Positive overall means are required, as for chrom.
  mean_normalized(trace.r, "r");
  mean_normalized(trace.g, "g");
  mean_normalized(trace.b, "b");

  std::vector<double> h(n, 0.0);
  std::vector<double> s1(len), s2(len), hw(len);
  for (std::size_t m = 0; m + len <= n; ++m) {
    double mr = 0.0, mg = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      mr += trace.r[m + i];
      mg += trace.g[m + i];
      mb += trace.b[m + i];
    }
    mr /= len;
    mg /= len;
    mb /= len;
    if (!(mr > 0.0 && mg > 0.0 && mb > 0.0)) {
      throw InputError("pos: non-positive channel mean in window at frame " + std::to_string(m));
    }
    for (std::size_t i = 0; i < len; ++i) {
      const double rn = trace.r[m + i] / mr;
      const double gn = trace.g[m + i] / mg;
      const double bn = trace.b[m + i] / mb;
      s1[i] = gn - bn;
      s2[i] = -2.0 * rn + gn + bn;
    }
    const double sd2 = std_of(s2);
    const double alpha = sd2 > kFlatStd ? std_of(s1) / sd2 : 0.0;
    for (std::size_t i = 0; i < len; ++i) hw[i] = s1[i] + alpha * s2[i];
    const double mh = mean_of(hw);
    for (std::size_t i = 0; i < len; ++i) h[m + i] += hw[i] - mh;
  }
  return filter_pulse(std::move(h), fs, band);
}

HrEstimate pos_hr(const RgbTrace& trace, const BandConfig& band, double window_sec) {
  return spectral_hr(pos_pulse(trace, band, window_sec), band);
}

ClassicMethod parse_classic_method(std::string_view name) {
  if (name == "green") return ClassicMethod::green;
  if (name == "chrom") return ClassicMethod::chrom;
  if (name == "pos") return ClassicMethod::pos;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(ClassicMethod method) {
  switch (method) {
    case ClassicMethod::green: return "green";
    case ClassicMethod::chrom: return "chrom";
    case ClassicMethod::pos: return "pos";
  }
  return "unknown";
}

HrEstimate estimate_classic(const RgbTrace& trace, ClassicMethod method, const BandConfig& band) {
  switch (method) {
    case ClassicMethod::green: return green_hr(trace, band);
    case ClassicMethod::chrom: return chrom_hr(trace, band);
    case ClassicMethod::pos: return pos_hr(trace, band);
  }
  throw ConfigError("unknown method");
}

}  // namespace pulsebench
