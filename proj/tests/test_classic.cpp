#include "support.hpp"

#include "pulsebench/classic.hpp"
#include "pulsebench/error.hpp"
#include "pulsebench/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

using namespace pulsebench;

namespace {

RgbTrace make_trace(int n, double fs, const std::function<std::array<double, 3>(double)>& f) {
  RgbTrace t;
  t.sample_rate_hz = fs;
  for (int i = 0; i < n; ++i) {
    const auto v = f(i / fs);
    t.r.push_back(v[0]);
    t.g.push_back(v[1]);
    t.b.push_back(v[2]);
  }
  return t;
}

// Skin-like trace: DC levels with the standardized pulse signature.
RgbTrace pulsatile(double hr_bpm, int n, double fs = 30.0) {
  const double f = hr_bpm / 60.0;
  return make_trace(n, fs, [f](double t) {
    const double p = std::sin(2.0 * std::numbers::pi * f * t);
    return std::array<double, 3>{160.0 * (1 + 0.33 * 0.02 * p), 120.0 * (1 + 0.77 * 0.02 * p),
                                 96.0 * (1 + 0.53 * 0.02 * p)};
  });
}

SynthVideo clean_video(double hr, std::uint64_t seed = 1, double seconds = 10.0) {
  SynthConfig c;
  c.hr_bpm = hr;
  c.seed = seed;
  c.duration_sec = seconds;
  return gen_video(c);
}

}  // namespace

TEST_CASE("green_hr on a tone, with drift and on noise") {
  const auto tone = make_trace(600, 30.0, [](double t) {
    const double g = 128.0 + 5.0 * std::sin(2.0 * std::numbers::pi * 1.2 * t);
    return std::array<double, 3>{g, g, g};
  });
  CHECK(std::abs(green_hr(tone, {}).bpm - 72.0) <= 1.0);

  const auto drift = make_trace(600, 30.0, [](double t) {
    const double g = 128.0 + t + 5.0 * std::sin(2.0 * std::numbers::pi * 1.2 * t);
    return std::array<double, 3>{g, g, g};
  });
  const double bpm = green_hr(drift, {}).bpm;
  CHECK(std::abs(bpm - 72.0) <= 1.0);
  // Same answer as the brute-force DFT on the filtered green signal.
  CHECK(std::abs(bpm - testing::dft_peak_bpm(green_pulse(drift, {}).samples(), 30.0, 42.0, 240.0)) <= 0.5);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 3.0);
    const auto noise = make_trace(300, 30.0, [&](double) {
      return std::array<double, 3>{100.0 + n(rng), 100.0 + n(rng), 100.0 + n(rng)};
    });
    const double e = green_hr(noise, {}).bpm;
    CHECK(e >= 42.0);
    CHECK(e <= 240.0);
  }
}

TEST_CASE("green_hr is spectral_hr of the filtered green channel") {
  const auto tr = pulsatile(80.0, 450);
  CHECK(green_hr(tr, {}).bpm == spectral_hr(green_pulse(tr, {}), {}).bpm);
}

TEST_CASE("chrom and pos on trace-level pulses") {
  for (double hr : {50.0, 72.0, 110.0, 140.0}) {
    const auto tr = pulsatile(hr, 600);
    CHECK(std::abs(chrom_hr(tr, {}).bpm - hr) <= 1.0);
    CHECK(std::abs(pos_hr(tr, {}).bpm - hr) <= 1.0);
  }
}

TEST_CASE("chrom rejects identical channels and non-positive means") {
  const auto gray = make_trace(300, 30.0, [](double t) {
    const double v = 100.0 + 3.0 * std::sin(2.0 * std::numbers::pi * 1.2 * t);
    return std::array<double, 3>{v, v, v};
  });
  CHECK_THROWS_AS(chrom_hr(gray, {}), InputError);
  auto neg = pulsatile(72.0, 300);
  for (double& v : neg.b) v -= 200.0;
  CHECK_THROWS_AS(chrom_hr(neg, {}), InputError);
  CHECK_THROWS_AS(pos_hr(neg, {}), InputError);
}

TEST_CASE("pos degenerate windows contribute S1 alone") {
  // r constant and g, b mirror each other with a period-2 pattern, so every
  // window has exact means and S2 = -2 rn + gn + bn vanishes.
  const int n = 200;
  RgbTrace tr;
  tr.sample_rate_hz = 30.0;
  for (int i = 0; i < n; ++i) {
    const double p = (i % 2 == 0) ? 1.0 : -1.0;
    tr.r.push_back(100.0);
    tr.g.push_back(100.0 + p);
    tr.b.push_back(100.0 - p);
  }
  const std::size_t len = 48;
  std::vector<double> h(n, 0.0);
  for (std::size_t m = 0; m + len <= static_cast<std::size_t>(n); ++m) {
    std::vector<double> s1(len);
    double mean = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      s1[i] = tr.g[m + i] / 100.0 - tr.b[m + i] / 100.0;
      mean += s1[i];
    }
    mean /= len;
    for (std::size_t i = 0; i < len; ++i) h[m + i] += s1[i] - mean;
  }
  const auto expected = bandpass(detrend(PulseTrace(h, 30.0)), BandConfig{});
  const auto got = pos_pulse(tr, BandConfig{});
  for (int i = 0; i < n; ++i) CHECK(got.samples()[i] == doctest::Approx(expected.samples()[i]).epsilon(1e-9).scale(1e-9));
}

TEST_CASE("property: estimators are invariant to global positive scaling") {
  const auto base = pulsatile(95.0, 400);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 0.3);
  RgbTrace noisy = base;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    noisy.r[i] += n(rng);
    noisy.g[i] += n(rng);
    noisy.b[i] += n(rng);
  }
  auto scaled = [&](double k) {
    RgbTrace t = noisy;
    for (auto* ch : {&t.r, &t.g, &t.b})
      for (double& v : *ch) v *= k;
    return t;
  };
  for (auto m : {ClassicMethod::green, ClassicMethod::chrom, ClassicMethod::pos}) {
    const double ref = estimate_classic(noisy, m, {}).bpm;
    // Power-of-two scaling is exact in floating point.
    CHECK(estimate_classic(scaled(4.0), m, {}).bpm == ref);
    CHECK(estimate_classic(scaled(0.125), m, {}).bpm == ref);
    CHECK(std::abs(estimate_classic(scaled(1.7), m, {}).bpm - ref) < 1e-9);
    CHECK(std::abs(estimate_classic(scaled(123.4), m, {}).bpm - ref) < 1e-9);
  }
}

TEST_CASE("property: chrom and pos ignore a slow common multiplicative term") {
  for (double hr : {55.0, 75.0, 120.0}) {
    const auto base = pulsatile(hr, 600);
    RgbTrace lit = base;
    for (std::size_t i = 0; i < lit.size(); ++i) {
      const double t = i / 30.0;
      const double k = 1.0 + 0.15 * std::sin(2.0 * std::numbers::pi * 0.3 * t) + 0.05 * std::sin(2.0 * std::numbers::pi * 0.45 * t);
      lit.r[i] *= k;
      lit.g[i] *= k;
      lit.b[i] *= k;
    }
    CHECK(std::abs(chrom_hr(lit, {}).bpm - chrom_hr(base, {}).bpm) <= 1.0);
    CHECK(std::abs(pos_hr(lit, {}).bpm - pos_hr(base, {}).bpm) <= 1.0);
  }
}

TEST_CASE("extract_rgb_trace equals the 1x1 RGB map") {
  const auto v = clean_video(72.0, 3, 4.0);
  const auto tr = extract_rgb_trace(v.video, v.landmarks);
  StmapOptions opt;
  opt.grid = {1, 1};
  opt.color = MapColor::rgb;
  opt.normalize = false;
  const auto map = build_stmap(v.video, v.landmarks, opt);
  REQUIRE(tr.size() == v.video.size());
  for (std::size_t t = 0; t < tr.size(); ++t) {
    CHECK(std::abs(tr.r[t] - map.at(0, t, 0)) <= 1e-12);
    CHECK(std::abs(tr.g[t] - map.at(0, t, 1)) <= 1e-12);
    CHECK(std::abs(tr.b[t] - map.at(0, t, 2)) <= 1e-12);
  }
}

TEST_CASE("extract_rgb_trace on a uniform video is constant") {
  SynthVideo v = clean_video(72.0, 1, 2.0);
  for (auto& f : v.video.frames)
    for (int y = 0; y < f.height; ++y)
      for (int x = 0; x < f.width; ++x) {
        f.at(x, y, 0) = 200;
        f.at(x, y, 1) = 150;
        f.at(x, y, 2) = 120;
      }
  const auto tr = extract_rgb_trace(v.video, v.landmarks);
  for (std::size_t t = 0; t < tr.size(); ++t) {
    CHECK(tr.r[t] == doctest::Approx(200.0));
    CHECK(tr.g[t] == doctest::Approx(150.0));
    CHECK(tr.b[t] == doctest::Approx(120.0));
  }
}

TEST_CASE("extract_rgb_trace holds values over invalid frames") {
  SynthVideo v = clean_video(72.0, 1, 2.0);
  v.landmarks.valid[0] = false;
  v.landmarks.valid[10] = false;
  const auto tr = extract_rgb_trace(v.video, v.landmarks);
  CHECK(tr.g[0] == tr.g[1]);
  CHECK(tr.g[10] == tr.g[9]);
}

TEST_CASE("classic methods on rendered videos") {
  const auto v = clean_video(72.0, 5, 20.0);
  const auto tr = extract_rgb_trace(v.video, v.landmarks);
  CHECK(std::abs(green_hr(tr, {}).bpm - 72.0) <= 1.0);
  CHECK(std::abs(chrom_hr(tr, {}).bpm - 72.0) <= 1.0);
  CHECK(std::abs(pos_hr(tr, {}).bpm - 72.0) <= 1.0);

  SynthConfig flicker;
  flicker.hr_bpm = 72.0;
  flicker.drift_freq_hz = 0.2;
  flicker.drift_rel_amp = 0.1;
  flicker.seed = 8;
  const auto fv = gen_video(flicker);
  CHECK(std::abs(chrom_hr(extract_rgb_trace(fv.video, fv.landmarks), {}).bpm - 72.0) <= 1.0);

  SynthConfig step;
  step.hr_bpm = 72.0;
  step.step_time_sec = 10.0;
  step.step_rel = 0.3;
  step.seed = 9;
  const auto sv = gen_video(step);
  CHECK(std::abs(pos_hr(extract_rgb_trace(sv.video, sv.landmarks), {}).bpm - 72.0) <= 2.0);
}

TEST_CASE("chrom cancels a pulse that enters both chrominance axes with one sign") {
  // With strengths (0.7, 1.0, 0.5) the pulse adds +0.1 to 3Rn - 2Gn and +1.3
  // to 1.5Rn + Gn - 1.5Bn; alpha = sd(X)/sd(Y) then removes it from S.
  const double f = 1.2;
  const auto same_sign = make_trace(600, 30.0, [f](double t) {
    const double p = std::sin(2.0 * std::numbers::pi * f * t);
    return std::array<double, 3>{160.0 * (1 + 0.7 * 0.02 * p), 120.0 * (1 + 1.0 * 0.02 * p), 96.0 * (1 + 0.5 * 0.02 * p)};
  });
  // For a noise-free trace the cancellation is exact and S is rejected as flat.
  CHECK_THROWS_AS(chrom_pulse(same_sign, {}), InputError);
  CHECK_NOTHROW(chrom_pulse(pulsatile(72.0, 600), {}));
}

TEST_CASE("method names") {
  CHECK(parse_classic_method("green") == ClassicMethod::green);
  CHECK(parse_classic_method("chrom") == ClassicMethod::chrom);
  CHECK(parse_classic_method("pos") == ClassicMethod::pos);
  CHECK(to_string(ClassicMethod::pos) == "pos");
  CHECK_THROWS_AS(parse_classic_method("ica"), ConfigError);
}
