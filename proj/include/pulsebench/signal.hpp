#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pulsebench {

// 1-D time series sampled at a fixed rate: a contact BVP recording or a
// pulse signal extracted from video.
class PulseTrace {
 public:
  // Throws InputError unless samples.size() >= 2, every sample is finite and
  // sample_rate_hz is finite and positive.
  PulseTrace(std::vector<double> samples, double sample_rate_hz);

  const std::vector<double>& samples() const { return samples_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t size() const { return samples_.size(); }
  double duration_sec() const { return static_cast<double>(samples_.size()) / sample_rate_hz_; }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_;
};

// Heart-rate search band in beats per minute.
struct BandConfig {
  double lo_bpm{42.0};
  double hi_bpm{240.0};

  double lo_hz() const { return lo_bpm / 60.0; }
  double hi_hz() const { return hi_bpm / 60.0; }
  // Throws ConfigError unless 0 < lo < hi.
  void validate() const;
};

struct HrEstimate {
  double bpm{0.0};
  int clip_index{0};
  int window_start_frame{0};
};

constexpr double kDefaultDetrendWindowSec = 1.0;
constexpr int kBandpassTaps = 127;

// Subtracts a centered moving average of round(window_sec * fs) samples.
// Even widths are widened by one so the window stays centered; windows are
// truncated at the edges.
PulseTrace detrend(const PulseTrace& trace, double window_sec = kDefaultDetrendWindowSec);

// Hamming-windowed sinc band-pass taps (kBandpassTaps long, symmetric).
std::vector<double> design_bandpass(double lo_hz, double hi_hz, double sample_rate_hz,
                                    int taps = kBandpassTaps);

// Linear-phase FIR band-pass with the group delay removed. Samples outside
// the trace are treated as zero. Output has the input length.
PulseTrace bandpass(const PulseTrace& trace, const BandConfig& band);

// Direct-form convolution of x with symmetric taps, delay-compensated.
std::vector<double> fir_filter_zero_delay(std::span<const double> x, std::span<const double> taps);

// Smallest power of two >= max(4096, 8 * n).
std::size_t spectral_fft_size(std::size_t n);

// Heart rate from the dominant spectral peak inside the band.
//
// The trace is mean-removed, Hann-windowed and zero-padded to
// spectral_fft_size(). The peak bin is refined by a parabola through the
// log-magnitudes of its neighbours and the result is clamped to the band.
// Requires at least 2 s of samples.
HrEstimate spectral_hr(const PulseTrace& trace, const BandConfig& band);

// Magnitude spectrum of the preprocessed trace (bins 0..nfft/2).
std::vector<double> magnitude_spectrum(std::span<const double> x, std::size_t nfft);

}  // namespace pulsebench
