#include "wirange/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace wirange {

namespace {

// FFTW planning is not thread-safe; execution of a private plan is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> hamming(std::size_t len) {
  std::vector<double> w(len);
  if (len == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i < len; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(len - 1));
  return w;
}

}  // namespace

Spectrogram stft(const TimeSeries& series, double window_s, double overlap_frac) {
  series.validate();
  if (!(overlap_frac >= 0.0 && overlap_frac < 1.0))
    throw std::invalid_argument("stft: overlap_frac must be in [0, 1)");
  const double fs = series.sample_rate;
  const auto win_len = static_cast<std::size_t>(std::llround(window_s * fs));
  if (win_len < 2) throw std::invalid_argument("stft: window shorter than 2 samples");
  if (series.samples.size() < win_len) throw std::runtime_error("stft: insufficient samples");

  auto hop = static_cast<std::size_t>(std::llround(static_cast<double>(win_len) * (1.0 - overlap_frac)));
  hop = std::max<std::size_t>(hop, 1);
  const std::size_t n_snap = (series.samples.size() - win_len) / hop + 1;
  const std::size_t n_bins = win_len / 2 + 1;

  const std::vector<double> w = hamming(win_len);
  double w2 = 0.0;
  for (double v : w) w2 += v * v;

  Spectrogram spec;
  spec.kind = SpecKind::complex_amp;
  spec.cvalues = Matrix<cplx>(n_snap, n_bins);
  spec.freqs.resize(n_bins);
  const double df = fs / static_cast<double>(win_len);
  for (std::size_t k = 0; k < n_bins; ++k) spec.freqs[k] = df * static_cast<double>(k);
  spec.times.resize(n_snap);
  for (std::size_t n = 0; n < n_snap; ++n)
    spec.times[n] = series.start_time +
                    (static_cast<double>(n * hop) + 0.5 * static_cast<double>(win_len)) / fs;

  std::vector<double> in(win_len);
  std::vector<fftw_complex> out(n_bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(win_len), in.data(), out.data(),
                                FFTW_ESTIMATE);
  }

  const double interior_scale = std::sqrt(2.0 / (fs * w2));
  const double edge_scale = std::sqrt(1.0 / (fs * w2));
  const bool even = (win_len % 2 == 0);
  for (std::size_t n = 0; n < n_snap; ++n) {
    const double* seg = series.samples.data() + n * hop;
    for (std::size_t i = 0; i < win_len; ++i) in[i] = w[i] * seg[i];
    fftw_execute(plan);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const bool edge = (k == 0) || (even && k == n_bins - 1);
      const double s = edge ? edge_scale : interior_scale;
      spec.cvalues.at(n, k) = cplx(out[k][0] * s, out[k][1] * s);
    }
  }
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  return spec;
}

std::vector<double> detect_tones(const Spectrogram& spec, double band_lo,
                                 double band_hi, double min_prominence_db,
                                 double median_window_hz) {
  if (!(band_hi > band_lo)) throw std::invalid_argument("detect_tones: empty band");
  if (spec.freqs.empty() || spec.freqs.front() > band_lo || spec.freqs.back() < band_hi)
    throw std::invalid_argument("detect_tones: spectrogram does not cover band");

  const std::size_t n = spec.n_times();
  const std::size_t nk = spec.n_freqs();
  std::vector<double> psd(nk, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t k = 0; k < nk; ++k) psd[k] += spec.intensity_at(t, k);
  for (double& v : psd) v /= static_cast<double>(n);

  const double df = spec.freq_spacing();
  const auto half_med = static_cast<std::size_t>(
      std::max(1.0, std::round(0.5 * median_window_hz / std::max(df, 1e-300))));

  std::vector<double> tones;
  std::vector<double> local;
  for (std::size_t k = 1; k + 1 < nk; ++k) {
    const double f = spec.freqs[k];
    if (f < band_lo || f > band_hi) continue;
    if (!(psd[k] > psd[k - 1] && psd[k] >= psd[k + 1])) continue;

    const std::size_t lo = k > half_med ? k - half_med : 0;
    const std::size_t hi = std::min(nk - 1, k + half_med);
    local.assign(psd.begin() + static_cast<std::ptrdiff_t>(lo),
                 psd.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    std::nth_element(local.begin(), local.begin() + static_cast<std::ptrdiff_t>(local.size() / 2),
                     local.end());
    const double med = local[local.size() / 2];
    if (med <= 0.0) continue;
    const double prom_db = 10.0 * std::log10(psd[k] / med);
    if (prom_db >= min_prominence_db) tones.push_back(f);
  }
  return tones;
}

BandPartition partition_band(const std::vector<double>& freqs,
                             const std::vector<double>& tones, double guard_hz) {
  if (freqs.empty()) throw std::invalid_argument("partition_band: empty freq axis");
  if (guard_hz < 0.0) throw std::invalid_argument("partition_band: guard_hz must be >= 0");

  BandPartition part;
  part.f_min = freqs.front();
  part.f_max = freqs.back();
  part.guard_hz = guard_hz;
  part.tonal_freqs = tones;
  std::sort(part.tonal_freqs.begin(), part.tonal_freqs.end());

  for (double tf : part.tonal_freqs) {
    if (tf < part.f_min || tf > part.f_max)
      throw std::invalid_argument("partition_band: tone outside frequency range");
    const auto it = std::lower_bound(freqs.begin(), freqs.end(), tf);
    std::size_t k = static_cast<std::size_t>(std::distance(freqs.begin(), it));
    if (k == freqs.size() || (k > 0 && tf - freqs[k - 1] <= freqs[k] - tf)) --k;
    if (!part.tonal_bins.empty() && part.tonal_bins.back() == k)
      throw std::runtime_error("partition_band: unresolvable tones");
    part.tonal_bins.push_back(k);
  }

  // A bin is excluded when it lies within guard_hz of any tone (inclusive, so
  // guard 0.35 Hz on a 0.05 Hz axis drops 7 bins on each side of a tone).
  const double guard_edge = guard_hz * (1.0 + 1e-9) + 1e-12;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    bool guarded = false;
    for (double tf : part.tonal_freqs) {
      if (std::abs(freqs[k] - tf) <= guard_edge) {
        guarded = true;
        break;
      }
    }
    if (!guarded) part.broadband_bins.push_back(k);
  }
  return part;
}

NoiseProfile noise_profile(const Spectrogram& quiet_spec) {
  const std::size_t n = quiet_spec.n_times();
  if (n < 10) throw std::invalid_argument("noise_profile: need >= 10 snapshots");
  const std::size_t nk = quiet_spec.n_freqs();
  NoiseProfile prof;
  prof.variance_per_bin.assign(nk, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t k = 0; k < nk; ++k)
      prof.variance_per_bin[k] += quiet_spec.intensity_at(t, k);
  for (double& v : prof.variance_per_bin) {
    v /= static_cast<double>(n);
    if (!(v > 0.0)) throw std::runtime_error("noise_profile: degenerate noise bin");
  }
  return prof;
}

}  // namespace wirange
