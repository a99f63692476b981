#include "pulsebench/signal.hpp"

#include "pulsebench/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace pulsebench {

namespace {

// fftw planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double sinc_lowpass(double cutoff, double m) {
  // Impulse response of an ideal low-pass with normalized cutoff (cycles/sample).
  if (m == 0.0) return 2.0 * cutoff;
  return std::sin(2.0 * std::numbers::pi * cutoff * m) / (std::numbers::pi * m);
}

}  // namespace

PulseTrace::PulseTrace(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (!(std::isfinite(sample_rate_hz_) && sample_rate_hz_ > 0.0)) {
    throw InputError("PulseTrace: sample rate must be finite and positive");
  }
  if (samples_.size() < 2) {
    throw InputError("PulseTrace: need at least 2 samples");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InputError("PulseTrace: non-finite sample at index " + std::to_string(i));
    }
  }
}

void BandConfig::validate() const {
  if (!(lo_bpm > 0.0 && lo_bpm < hi_bpm && std::isfinite(hi_bpm))) {
    throw ConfigError("BandConfig: require 0 < lo_bpm < hi_bpm");
  }
}

PulseTrace detrend(const PulseTrace& trace, double window_sec) {
  const double fs = trace.sample_rate_hz();
  if (!(window_sec > 0.0) || window_sec * fs < 1.0) {
    throw ConfigError("detrend: window must cover at least one sample");
  }
  const auto& x = trace.samples();
  const std::size_t n = x.size();
  const long width = std::max<long>(1, std::lround(window_sec * fs));
  const long half = width / 2;

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

  std::vector<double> out(n);
  const long last = static_cast<long>(n) - 1;
  for (long i = 0; i <= last; ++i) {
    const long a = std::max(0L, i - half);
    const long b = std::min(last, i + half);
    const double mean = (prefix[b + 1] - prefix[a]) / static_cast<double>(b - a + 1);
    out[i] = x[i] - mean;
  }
  return PulseTrace(std::move(out), fs);
}

std::vector<double> design_bandpass(double lo_hz, double hi_hz, double sample_rate_hz, int taps) {
  if (taps < 3 || taps % 2 == 0) {
    throw ConfigError("design_bandpass: tap count must be odd and >= 3");
  }
  if (!(lo_hz > 0.0 && lo_hz < hi_hz)) {
    throw ConfigError("design_bandpass: require 0 < lo < hi");
  }
  if (!(hi_hz < sample_rate_hz / 2.0)) {
    throw ConfigError("design_bandpass: upper band edge " + std::to_string(hi_hz) +
                      " Hz is not below Nyquist (" + std::to_string(sample_rate_hz / 2.0) + " Hz)");
  }
  const double f1 = lo_hz / sample_rate_hz;
  const double f2 = hi_hz / sample_rate_hz;
  const int center = (taps - 1) / 2;
  std::vector<double> h(taps);
  // Mirror the left half so the taps are exactly symmetric.
  for (int i = 0; i <= center; ++i) {
    const double m = static_cast<double>(i - center);
    const double window = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
    h[i] = (sinc_lowpass(f2, m) - sinc_lowpass(f1, m)) * window;
    h[taps - 1 - i] = h[i];
  }
  return h;
}

std::vector<double> fir_filter_zero_delay(std::span<const double> x, std::span<const double> taps) {
  const long n = static_cast<long>(x.size());
  const long k = static_cast<long>(taps.size());
  const long delay = (k - 1) / 2;
  std::vector<double> y(x.size(), 0.0);
  // y[i] = causal output at i + delay
  for (long i = 0; i < n; ++i) {
    const long t = i + delay;
    double acc = 0.0;
    const long j_lo = std::max(0L, t - (n - 1));
    const long j_hi = std::min(k - 1, t);
    for (long j = j_lo; j <= j_hi; ++j) acc += taps[j] * x[t - j];
    y[i] = acc;
  }
  return y;
}

PulseTrace bandpass(const PulseTrace& trace, const BandConfig& band) {
  band.validate();
  const auto taps = design_bandpass(band.lo_hz(), band.hi_hz(), trace.sample_rate_hz());
  return PulseTrace(fir_filter_zero_delay(trace.samples(), taps), trace.sample_rate_hz());
}

std::size_t spectral_fft_size(std::size_t n) {
  const std::size_t target = std::max<std::size_t>(4096, 8 * n);
  std::size_t nfft = 1;
  while (nfft < target) nfft <<= 1;
  return nfft;
}

std::vector<double> magnitude_spectrum(std::span<const double> x, std::size_t nfft) {
  const std::size_t n = x.size();
  if (nfft < n) throw ConfigError("magnitude_spectrum: fft size shorter than input");

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  double* in = fftw_alloc_real(nfft);
  fftw_complex* out = fftw_alloc_complex(nfft / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < nfft; ++i) in[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = n > 1 ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1)) : 1.0;
    in[i] = (x[i] - mean) * w;
  }
  fftw_execute(plan);

  std::vector<double> mag(nfft / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(out[k][0], out[k][1]);

  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return mag;
}

HrEstimate spectral_hr(const PulseTrace& trace, const BandConfig& band) {
  band.validate();
  const double fs = trace.sample_rate_hz();
  if (static_cast<double>(trace.size()) < 2.0 * fs) {
    throw InputError("spectral_hr: trace shorter than 2 s");
  }
  const double lo_hz = band.lo_hz();
  const double hi_hz = std::min(band.hi_hz(), fs / 2.0);

  const std::size_t nfft = spectral_fft_size(trace.size());
  const double bin_hz = fs / static_cast<double>(nfft);
  const auto k_lo = static_cast<long>(std::ceil(lo_hz / bin_hz));
  const auto k_hi = static_cast<long>(std::floor(hi_hz / bin_hz));
  if (k_lo > k_hi) {
    throw ConfigError("spectral_hr: band is empty below Nyquist");
  }

  const auto mag = magnitude_spectrum(trace.samples(), nfft);
  long peak = k_lo;
  for (long k = k_lo + 1; k <= k_hi; ++k) {
    if (mag[k] > mag[peak]) peak = k;
  }

  double offset = 0.0;
  if (peak > 0 && peak + 1 < static_cast<long>(mag.size())) {
    constexpr double tiny = 1e-300;
    const double a = std::log(mag[peak - 1] + tiny);
    const double b = std::log(mag[peak] + tiny);
    const double c = std::log(mag[peak + 1] + tiny);
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }

  const double hz = std::clamp((static_cast<double>(peak) + offset) * bin_hz, lo_hz, hi_hz);
  return HrEstimate{hz * 60.0, 0, 0};
}

}  // namespace pulsebench
