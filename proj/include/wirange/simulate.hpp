#pragma once

#include <cstdint>

#include "wirange/types.hpp"

namespace wirange {

enum class ChannelKind { analytic_wi, ideal_modes };

// Shallow-water channel magnitude model.
//
// analytic_wi: |g|^2 = g0(f)^2 * (1 + m*cos(A * w^(-1/beta) * r)), w = 2*pi*f.
// The interference phase A*w^(-1/beta)*r is exactly constant on curves
// f/f' = (r/r')^beta, so the deterministic intensity factor is invariant
// along striations of the configured waveguide invariant to machine
// precision. This is the module's defining property and what makes it a
// trustworthy oracle for the estimators.
//
// ideal_modes: pressure-release surface over a rigid bottom; mode m has
// wavenumber k_m = sqrt((w/c)^2 - ((m-1/2)*pi/D)^2) and shape
// sin((m-1/2)*pi*z/D), summed with cylindrical spreading 1/sqrt(k_m r).
struct ChannelModel {
  ChannelKind kind{ChannelKind::analytic_wi};

  // analytic_wi parameters
  double beta_true{1.0};
  double delta_k_coeff{1.0};     // A above
  double modulation_depth{0.0};  // m in [0, 1]
  std::vector<double> base_gain{1.0};  // g0(f): size 1 (constant) or per-bin

  // ideal_modes parameters
  double depth{75.0};          // water depth D (m)
  double sound_speed{1473.0};  // c (m/s)
  int mode_count{2};
  double source_depth{9.0};
  double receiver_depth{41.25};

  double base_gain_at(std::size_t bin) const {
    return base_gain.size() == 1 ? base_gain[0] : base_gain.at(bin);
  }
  void validate(std::size_t n_bins) const;
};

enum class PhasePolicy { fixed, random_walk, iid_uniform };

// Ship source: J tonal lines plus a smooth broadband envelope.
struct SourceModel {
  std::vector<double> tone_freqs;  // Hz
  std::vector<double> tone_mags;   // amplitudes m^t, same length
  PhasePolicy phase_policy{PhasePolicy::iid_uniform};
  std::vector<double> broadband_sigma{1.0};  // sigma^b(f): size 1 or per-bin

  double broadband_sigma_at(std::size_t bin) const {
    return broadband_sigma.size() == 1 ? broadband_sigma[0] : broadband_sigma.at(bin);
  }
  void validate(std::size_t n_bins) const;
};

struct TrackSpec {
  double r_start{10000.0};  // range at the first snapshot (m)
  RateProfile rate{RateProfile::constant_rate(0.0)};
};

struct SimConfig {
  ChannelModel channel;
  SourceModel source;
  TrackSpec track;
  NoiseProfile noise;      // per-bin (sigma^u_k)^2; size 1 is broadcast
  double band_lo{42.0};    // Hz
  double band_hi{49.0};
  double df{0.05};
  double dt{10.0};
  double duration{1300.0};
  std::uint64_t seed{0};

  std::size_t n_snapshots() const;
  std::size_t n_bins() const;
  std::vector<double> freq_axis() const;
  std::vector<double> snapshot_ranges() const;
  double noise_var_at(std::size_t bin) const {
    return noise.variance_per_bin.size() == 1 ? noise.variance_per_bin[0]
                                              : noise.variance_per_bin.at(bin);
  }
  void validate() const;
};

struct GroundTruth {
  std::vector<double> ranges;  // r_n per snapshot (m)
  double beta_true{0.0};
  std::uint64_t seed{0};
};

// |g| at (range, frequency). Throws if no mode propagates (ideal_modes).
double green_magnitude(const ChannelModel& channel, double range_m, double freq_hz,
                       std::size_t bin = 0);

// Draw a complex spectrogram from the received-signal model
// z = g*(s^b + s^t) + u with counter-based per-cell RNG substreams; the
// output is bit-reproducible for a fixed seed regardless of evaluation order.
std::pair<Spectrogram, GroundTruth> synth_spectrogram(const SimConfig& cfg);

// Elementwise |z|^2.
Spectrogram intensity(const Spectrogram& spec);

// Deterministic expected-intensity surface sigma_b^2|g|^2 (+ tone power at
// tonal bins) without noise; used by tests and the striation-grid oracle.
Spectrogram deterministic_intensity(const SimConfig& cfg);

}  // namespace wirange
