#pragma once

#include "pulsebench/signal.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace testing {

inline std::vector<double> tone(double freq_hz, double fs, int n, double amp = 1.0, double offset = 0.0,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = offset + amp * std::sin(2.0 * std::numbers::pi * freq_hz * i / fs + phase);
  return x;
}

inline pulsebench::PulseTrace tone_trace(double freq_hz, double fs, int n, double amp = 1.0) {
  return pulsebench::PulseTrace(tone(freq_hz, fs, n, amp), fs);
}

// Naive O(N * bins) DFT magnitude of the mean-removed, Hann-windowed signal
// on the frequency grid k * fs / nfft. No FFT library involved.
inline std::vector<double> dft_magnitude(const std::vector<double>& x, std::size_t nfft) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = n > 1 ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1)) : 1.0;
    w[i] = (x[i] - mean) * hann;
  }
  std::vector<double> mag(nfft / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      acc += w[i] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * i % nfft) / nfft);
    }
    mag[k] = std::abs(acc);
  }
  return mag;
}

// Peak frequency (bpm) of the oracle DFT restricted to the band, on the
// padded grid without interpolation.
inline double dft_peak_bpm(const std::vector<double>& x, double fs, double lo_bpm, double hi_bpm) {
  const std::size_t nfft = pulsebench::spectral_fft_size(x.size());
  const auto mag = dft_magnitude(x, nfft);
  double best_bpm = lo_bpm, best = -1.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    const double bpm = 60.0 * k * fs / nfft;
    if (bpm < lo_bpm || bpm > hi_bpm) continue;
    if (mag[k] > best) {
      best = mag[k];
      best_bpm = bpm;
    }
  }
  return best_bpm;
}

// Amplitude of a sinusoid at freq_hz by least-squares projection over [from, to).
inline double tone_amplitude(const std::vector<double>& x, double freq_hz, double fs, std::size_t from,
                             std::size_t to) {
  double cc = 0.0, ss = 0.0, cs = 0.0, xs = 0.0, xc = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    const double ph = 2.0 * std::numbers::pi * freq_hz * i / fs;
    const double s = std::sin(ph), c = std::cos(ph);
    ss += s * s;
    cc += c * c;
    cs += c * s;
    xs += x[i] * s;
    xc += x[i] * c;
  }
  const double det = ss * cc - cs * cs;
  const double a = (xs * cc - xc * cs) / det;
  const double b = (xc * ss - xs * cs) / det;
  return std::hypot(a, b);
}

}  // namespace testing
