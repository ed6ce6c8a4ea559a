#include "wirange/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wirange/rng.hpp"

namespace wirange {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// RNG field tags; part of the reproducibility contract.
enum RngField : std::uint64_t { field_broadband = 0, field_noise = 1, field_phase = 2 };

}  // namespace

void ChannelModel::validate(std::size_t n_bins) const {
  if (kind == ChannelKind::analytic_wi) {
    if (!(beta_true > 0.0)) throw std::invalid_argument("channel: beta_true must be > 0");
    if (modulation_depth < 0.0 || modulation_depth > 1.0)
      throw std::invalid_argument("channel: modulation_depth must be in [0, 1]");
    if (base_gain.size() != 1 && base_gain.size() != n_bins)
      throw std::invalid_argument("channel: base_gain size mismatch");
    for (double g : base_gain)
      if (!(g > 0.0)) throw std::invalid_argument("channel: base_gain must be > 0");
  } else {
    if (!(depth > 0.0) || !(sound_speed > 0.0) || mode_count < 1)
      throw std::invalid_argument("channel: bad ideal_modes parameters");
    if (!(source_depth > 0.0 && source_depth < depth) ||
        !(receiver_depth > 0.0 && receiver_depth < depth))
      throw std::invalid_argument("channel: depths must be inside the water column");
  }
}

void SourceModel::validate(std::size_t n_bins) const {
  if (tone_freqs.size() != tone_mags.size())
    throw std::invalid_argument("source: tone_freqs/tone_mags size mismatch");
  for (double m : tone_mags)
    if (m < 0.0) throw std::invalid_argument("source: tone magnitudes must be >= 0");
  if (broadband_sigma.size() != 1 && broadband_sigma.size() != n_bins)
    throw std::invalid_argument("source: broadband_sigma size mismatch");
  for (double s : broadband_sigma)
    if (!(s >= 0.0)) throw std::invalid_argument("source: broadband_sigma must be >= 0");
}

std::size_t SimConfig::n_snapshots() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

std::size_t SimConfig::n_bins() const {
  return static_cast<std::size_t>(std::llround((band_hi - band_lo) / df)) + 1;
}

std::vector<double> SimConfig::freq_axis() const {
  const std::size_t nk = n_bins();
  std::vector<double> f(nk);
  for (std::size_t k = 0; k < nk; ++k) f[k] = band_lo + df * static_cast<double>(k);
  return f;
}

std::vector<double> SimConfig::snapshot_ranges() const {
  const std::size_t n = n_snapshots();
  std::vector<double> r(n);
  r[0] = track.r_start;
  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    acc += track.rate.integrate(dt * static_cast<double>(i - 1), dt * static_cast<double>(i));
    r[i] = track.r_start + acc;
  }
  return r;
}

void SimConfig::validate() const {
  if (!(band_hi > band_lo) || !(df > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("sim: bad band/df/dt");
  if (n_snapshots() < 2) throw std::invalid_argument("sim: duration/dt must give >= 2 snapshots");
  channel.validate(n_bins());
  source.validate(n_bins());
  if (noise.variance_per_bin.size() != 1 && noise.variance_per_bin.size() != n_bins())
    throw std::invalid_argument("sim: noise profile size mismatch");
  for (double v : noise.variance_per_bin)
    if (!(v > 0.0)) throw std::invalid_argument("sim: noise variances must be > 0");
  for (double r : snapshot_ranges())
    if (!(r > 0.0)) throw std::invalid_argument("sim: track range must stay > 0");
}

double green_magnitude(const ChannelModel& channel, double range_m, double freq_hz,
                       std::size_t bin) {
  if (!(range_m > 0.0) || !(freq_hz > 0.0))
    throw std::invalid_argument("green_magnitude: range and frequency must be > 0");
  if (channel.kind == ChannelKind::analytic_wi) {
    const double omega = two_pi * freq_hz;
    const double phase =
        channel.delta_k_coeff * std::pow(omega, -1.0 / channel.beta_true) * range_m;
    const double g0 = channel.base_gain_at(bin);
    const double g2 = g0 * g0 * (1.0 + channel.modulation_depth * std::cos(phase));
    return std::sqrt(std::max(g2, 0.0));
  }

  const double omega = two_pi * freq_hz;
  const double kw = omega / channel.sound_speed;
  cplx sum{0.0, 0.0};
  int propagating = 0;
  for (int m = 1; m <= channel.mode_count; ++m) {
    const double kz = (static_cast<double>(m) - 0.5) * std::numbers::pi / channel.depth;
    const double radicand = kw * kw - kz * kz;
    if (radicand <= 0.0) continue;  // evanescent mode dropped
    ++propagating;
    const double km = std::sqrt(radicand);
    const double shape = std::sin(kz * channel.source_depth) * std::sin(kz * channel.receiver_depth);
    const double spread = 1.0 / std::sqrt(km * range_m);
    sum += shape * spread * std::polar(1.0, km * range_m);
  }
  if (propagating == 0) throw std::runtime_error("green_magnitude: no propagating modes");
  return std::abs(sum);
}

std::pair<Spectrogram, GroundTruth> synth_spectrogram(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_snapshots();
  const std::size_t nk = cfg.n_bins();
  const std::vector<double> freqs = cfg.freq_axis();
  const std::vector<double> ranges = cfg.snapshot_ranges();

  // Map tones to their nearest bins.
  std::vector<double> tone_mag_per_bin(nk, 0.0);
  std::vector<std::size_t> tone_bins;
  for (std::size_t j = 0; j < cfg.source.tone_freqs.size(); ++j) {
    const double tf = cfg.source.tone_freqs[j];
    if (tf < cfg.band_lo || tf > cfg.band_hi)
      throw std::invalid_argument("sim: tone outside band");
    const auto k = static_cast<std::size_t>(std::llround((tf - cfg.band_lo) / cfg.df));
    tone_mag_per_bin[k] = cfg.source.tone_mags[j];
    tone_bins.push_back(k);
  }

  // Tonal phases. iid_uniform draws per cell; fixed uses the initial draw for
  // the whole track; random_walk accumulates wrapped steps. All three are
  // computed per tonal column so parallel cell evaluation stays deterministic.
  Matrix<double> phases(cfg.source.tone_freqs.empty() ? 0 : n,
                        cfg.source.tone_freqs.empty() ? 0 : nk);
  for (std::size_t k : tone_bins) {
    CounterRng rng(stream_key(cfg.seed, 0, k, field_phase));
    double walk = two_pi * rng.next_unit();
    for (std::size_t i = 0; i < n; ++i) {
      switch (cfg.source.phase_policy) {
        case PhasePolicy::fixed:
          phases.at(i, k) = walk;
          break;
        case PhasePolicy::random_walk:
          phases.at(i, k) = walk;
          walk += 0.5 * (rng.next_unit() - 0.5);
          break;
        case PhasePolicy::iid_uniform: {
          CounterRng cell(stream_key(cfg.seed, i, k, field_phase));
          phases.at(i, k) = two_pi * cell.next_unit();
          break;
        }
      }
    }
  }

  Spectrogram spec;
  spec.kind = SpecKind::complex_amp;
  spec.cvalues = Matrix<cplx>(n, nk);
  spec.freqs = freqs;
  spec.times.resize(n);
  for (std::size_t i = 0; i < n; ++i) spec.times[i] = cfg.dt * static_cast<double>(i);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < nk; ++k) {
      const double g = green_magnitude(cfg.channel, ranges[i], freqs[k], k);
      cplx s{0.0, 0.0};
      const double sb = cfg.source.broadband_sigma_at(k);
      if (sb > 0.0) {
        CounterRng rng(stream_key(cfg.seed, i, k, field_broadband));
        s += rng.next_complex_gaussian(sb * sb);
      }
      if (tone_mag_per_bin[k] > 0.0)
        s += std::polar(tone_mag_per_bin[k], phases.at(i, k));
      CounterRng noise_rng(stream_key(cfg.seed, i, k, field_noise));
      const cplx u = noise_rng.next_complex_gaussian(cfg.noise_var_at(k));
      spec.cvalues.at(i, k) = g * s + u;
    }
  }

  GroundTruth gt;
  gt.ranges = ranges;
  gt.beta_true = cfg.channel.kind == ChannelKind::analytic_wi ? cfg.channel.beta_true : 0.0;
  gt.seed = cfg.seed;
  return {std::move(spec), std::move(gt)};
}

Spectrogram intensity(const Spectrogram& spec) {
  if (spec.kind != SpecKind::complex_amp)
    throw std::invalid_argument("intensity: input must be a complex spectrogram");
  Spectrogram out;
  out.kind = SpecKind::intensity;
  out.freqs = spec.freqs;
  out.times = spec.times;
  out.values = Matrix<double>(spec.cvalues.rows, spec.cvalues.cols);
  for (std::size_t i = 0; i < spec.cvalues.data.size(); ++i)
    out.values.data[i] = std::norm(spec.cvalues.data[i]);
  return out;
}

Spectrogram deterministic_intensity(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_snapshots();
  const std::size_t nk = cfg.n_bins();
  const std::vector<double> freqs = cfg.freq_axis();
  const std::vector<double> ranges = cfg.snapshot_ranges();

  std::vector<double> tone_mag_per_bin(nk, 0.0);
  for (std::size_t j = 0; j < cfg.source.tone_freqs.size(); ++j) {
    const auto k = static_cast<std::size_t>(
        std::llround((cfg.source.tone_freqs[j] - cfg.band_lo) / cfg.df));
    tone_mag_per_bin.at(k) = cfg.source.tone_mags[j];
  }

  Spectrogram out;
  out.kind = SpecKind::intensity;
  out.freqs = freqs;
  out.times.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.times[i] = cfg.dt * static_cast<double>(i);
  out.values = Matrix<double>(n, nk);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < nk; ++k) {
      const double g = green_magnitude(cfg.channel, ranges[i], freqs[k], k);
      const double sb = cfg.source.broadband_sigma_at(k);
      const double mt = tone_mag_per_bin[k];
      out.values.at(i, k) = g * g * (sb * sb + mt * mt);
    }
  }
  return out;
}

}  // namespace wirange
