#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wirange/simulate.hpp"
#include "wirange/spectral.hpp"

using namespace wirange;

namespace {

TimeSeries make_noise(double fs, double dur_s, double sigma, unsigned seed) {
  TimeSeries ts;
  ts.sample_rate = fs;
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  ts.samples.resize(static_cast<std::size_t>(fs * dur_s));
  for (auto& s : ts.samples) s = g(rng);
  return ts;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("stft axes match the window settings") {
  const TimeSeries ts = make_noise(2500.0, 45.0, 1.0, 1);
  const Spectrogram spec = stft(ts, 20.0, 0.5);
  CHECK(spec.kind == SpecKind::complex_amp);
  CHECK(spec.freq_spacing() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(spec.time_spacing() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(spec.freq_spacing() == 1.0 / 20.0);  // bin spacing * window length == 1
  CHECK(spec.n_freqs() == 25001);
  CHECK(spec.n_times() == 3);
}

TEST_CASE("on-bin sinusoid concentrates its energy in one bin +-1") {
  TimeSeries ts;
  ts.sample_rate = 500.0;
  const double f0 = 45.5;  // exact bin center for an 8 s window
  ts.samples.resize(4000);
  for (std::size_t i = 0; i < ts.samples.size(); ++i)
    ts.samples[i] = std::sin(2.0 * std::numbers::pi * f0 * static_cast<double>(i) / 500.0);
  const Spectrogram spec = stft(ts, 8.0, 0.0);
  REQUIRE(spec.n_times() == 1);
  double total = 0.0;
  double near = 0.0;
  const auto k0 = static_cast<std::size_t>(std::llround(f0 / spec.freq_spacing()));
  for (std::size_t k = 0; k < spec.n_freqs(); ++k) {
    const double p = std::norm(spec.cvalues.at(0, k));
    total += p;
    if (k + 1 >= k0 && k <= k0 + 1) near += p;
  }
  CHECK(near / total > 0.99);
}

TEST_CASE("white-noise frames obey the documented Parseval identity") {
  const TimeSeries ts = make_noise(400.0, 10.0, 2.5, 7);
  const double window_s = 4.0;
  const Spectrogram spec = stft(ts, window_s, 0.25);
  const std::size_t win_len = 1600;
  const std::size_t hop = 1200;

  // independent time-domain evaluation of the windowed-energy identity
  std::vector<double> w(win_len);
  for (std::size_t i = 0; i < win_len; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(win_len - 1));
  double w2 = 0.0;
  for (double v : w) w2 += v * v;

  for (std::size_t n = 0; n < spec.n_times(); ++n) {
    double freq_sum = 0.0;
    for (std::size_t k = 0; k < spec.n_freqs(); ++k) freq_sum += std::norm(spec.cvalues.at(n, k));
    freq_sum *= spec.freq_spacing();
    double time_sum = 0.0;
    for (std::size_t i = 0; i < win_len; ++i) {
      const double v = w[i] * ts.samples[n * hop + i];
      time_sum += v * v;
    }
    time_sum /= w2;
    CHECK(freq_sum == doctest::Approx(time_sum).epsilon(1e-6));
  }
}

TEST_CASE("stft rejects short input") {
  TimeSeries ts;
  ts.sample_rate = 100.0;
  ts.samples.assign(50, 0.0);
  CHECK_THROWS_WITH_AS(stft(ts, 1.0, 0.5), "stft: insufficient samples", std::runtime_error);
}

TEST_CASE("detect_tones finds a single injected tone") {
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  const std::size_t nk = 141;
  spec.freqs.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) spec.freqs[k] = 42.0 + 0.05 * static_cast<double>(k);
  spec.times = {0.0, 10.0, 20.0};
  spec.values = Matrix<double>(3, nk, 1.0);
  const std::size_t tone_bin = 70;  // 45.5 Hz
  for (std::size_t n = 0; n < 3; ++n) spec.values.at(n, tone_bin) = 50.0;
  const auto tones = detect_tones(spec, 42.0, 49.0, 6.0);
  REQUIRE(tones.size() == 1);
  CHECK(tones[0] == doctest::Approx(45.5));
}

TEST_CASE("detect_tones recovers all five simulated tones with no extras") {
  SimConfig cfg;
  cfg.band_lo = 42.0;
  cfg.band_hi = 49.0;
  cfg.df = 0.05;
  cfg.dt = 10.0;
  cfg.duration = 1000.0;
  cfg.seed = 42;
  cfg.noise.variance_per_bin = {1.0};
  cfg.channel.kind = ChannelKind::analytic_wi;
  cfg.channel.beta_true = 1.18;
  cfg.channel.delta_k_coeff = 1.2;
  cfg.channel.modulation_depth = 0.9;
  cfg.source.tone_freqs = {42.8, 44.2, 45.5, 46.9, 48.3};
  cfg.source.tone_mags.assign(5, std::sqrt(std::pow(10.0, 1.5)));  // +15 dB over noise
  cfg.source.broadband_sigma = {std::sqrt(std::pow(10.0, 0.8))};
  cfg.track.r_start = 10000.0;
  cfg.track.rate = RateProfile::constant_rate(10.2);
  auto [cspec, gt] = synth_spectrogram(cfg);
  const Spectrogram ispec = intensity(cspec);
  const auto tones = detect_tones(ispec, 42.0, 49.0, 6.0);
  REQUIRE(tones.size() == 5);
  for (std::size_t j = 0; j < 5; ++j)
    CHECK(tones[j] == doctest::Approx(cfg.source.tone_freqs[j]).epsilon(1e-12));
}

TEST_CASE("detect_tones on flat noise returns nothing") {
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  spec.freqs = {42.0, 42.5, 43.0, 43.5, 44.0, 44.5, 45.0};
  spec.times = {0.0, 1.0};
  spec.values = Matrix<double>(2, 7, 3.0);
  CHECK(detect_tones(spec, 42.0, 45.0, 6.0).empty());
  CHECK_THROWS(detect_tones(spec, 44.0, 44.0, 6.0));
}

TEST_CASE("partition_band drops seven bins on each side of a tone at the paper guard") {
  std::vector<double> freqs(141);
  for (std::size_t k = 0; k < freqs.size(); ++k) freqs[k] = 42.0 + 0.05 * static_cast<double>(k);
  const BandPartition part = partition_band(freqs, {45.5}, 0.35);
  REQUIRE(part.tonal_bins.size() == 1);
  CHECK(part.tonal_bins[0] == 70);
  CHECK(part.broadband_bins.size() == 141 - 15);  // tone bin + 7 each side excluded
  for (std::size_t k : part.broadband_bins)
    CHECK(std::abs(freqs[k] - 45.5) >= 0.35 - 1e-9);
}

TEST_CASE("partition_band without tones keeps every bin broadband") {
  const std::vector<double> freqs{42.0, 42.05, 42.1, 42.15};
  const BandPartition part = partition_band(freqs, {}, 0.35);
  CHECK(part.tonal_bins.empty());
  CHECK(part.broadband_bins.size() == freqs.size());
}

TEST_CASE("partition_band clips the exclusion zone at the band edge") {
  std::vector<double> freqs(141);
  for (std::size_t k = 0; k < freqs.size(); ++k) freqs[k] = 42.0 + 0.05 * static_cast<double>(k);
  const BandPartition part = partition_band(freqs, {42.0}, 0.35);
  CHECK(part.tonal_bins[0] == 0);
  CHECK(part.broadband_bins.size() == 141 - 8);  // tone bin + 7 above it
}

TEST_CASE("partition_band rejects tones that collide in one bin") {
  const std::vector<double> freqs{42.0, 42.05, 42.1};
  CHECK_THROWS_WITH_AS(partition_band(freqs, {42.05, 42.06}, 0.0),
                       "partition_band: unresolvable tones", std::runtime_error);
}

TEST_CASE("partition_band is order-independent and repeatable") {
  std::vector<double> freqs(200);
  for (std::size_t k = 0; k < freqs.size(); ++k) freqs[k] = 40.0 + 0.05 * static_cast<double>(k);
  std::vector<double> tones{44.2, 42.8, 48.3, 46.9};
  const BandPartition a = partition_band(freqs, tones, 0.35);
  std::reverse(tones.begin(), tones.end());
  const BandPartition b = partition_band(freqs, tones, 0.35);
  const BandPartition c = partition_band(freqs, tones, 0.35);
  CHECK(a.tonal_bins == b.tonal_bins);
  CHECK(a.broadband_bins == b.broadband_bins);
  CHECK(b.broadband_bins == c.broadband_bins);
}

TEST_CASE("noise_profile estimates an exponential field's variance") {
  SimConfig cfg;
  cfg.band_lo = 42.0;
  cfg.band_hi = 43.0;
  cfg.df = 0.05;
  cfg.dt = 10.0;
  cfg.duration = 5000.0;  // 500 snapshots
  cfg.seed = 9;
  cfg.noise.variance_per_bin = {4.0};
  cfg.source.broadband_sigma = {0.0};
  cfg.track.r_start = 10000.0;
  cfg.track.rate = RateProfile::constant_rate(0.0);
  auto [cspec, gt] = synth_spectrogram(cfg);
  const NoiseProfile prof = noise_profile(intensity(cspec));
  for (double v : prof.variance_per_bin) CHECK(std::abs(v - 4.0) < 0.5);
}

TEST_CASE("noise_profile of a constant field is exact and additive") {
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  spec.freqs = {10.0, 11.0, 12.0};
  spec.times.resize(12);
  for (std::size_t i = 0; i < 12; ++i) spec.times[i] = static_cast<double>(i);
  spec.values = Matrix<double>(12, 3, 2.5);
  const NoiseProfile prof = noise_profile(spec);
  for (double v : prof.variance_per_bin) CHECK(v == 2.5);

  // additivity of summed fields (mean is linear, so this is exact)
  Spectrogram sum = spec;
  for (auto& v : sum.values.data) v += 2.5;
  const NoiseProfile prof2 = noise_profile(sum);
  for (double v : prof2.variance_per_bin) CHECK(v == doctest::Approx(5.0));
}

TEST_CASE("noise_profile rejects short or degenerate input") {
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  spec.freqs = {10.0};
  spec.times = {0.0, 1.0};
  spec.values = Matrix<double>(2, 1, 1.0);
  CHECK_THROWS(noise_profile(spec));  // too few snapshots

  spec.times.resize(10);
  for (std::size_t i = 0; i < 10; ++i) spec.times[i] = static_cast<double>(i);
  spec.values = Matrix<double>(10, 1, 0.0);
  CHECK_THROWS_WITH_AS(noise_profile(spec), "noise_profile: degenerate noise bin",
                       std::runtime_error);
}

}  // TEST_SUITE
