#pragma once

#include "wirange/types.hpp"

namespace wirange {

// Short-time Fourier transform with a Hamming taper.
//
// One-sided spectrum with PSD scaling: for interior bins
//   z[n,k] = sqrt(2 / (fs * sum(w^2))) * sum_i w[i] s[n*hop+i] e^{-j2 pi i k / M}
// (factor sqrt(1/...) instead of sqrt(2/...) at DC and Nyquist), so that
//   sum_k |z[n,k]|^2 * df == sum_i (w[i] s[n*hop+i])^2 / sum_i w[i]^2.
// Intensities |z|^2 are therefore per-bin PSD values (microPa^2/Hz for
// microPa inputs) and the mean intensity of a noise-only recording is
// directly the per-bin noise variance used by the inference model.
//
// Bin spacing is 1/window_s; snapshot spacing is window_s*(1-overlap_frac).
Spectrogram stft(const TimeSeries& series, double window_s, double overlap_frac);

// Tonal lines from PSD peaks: local maxima of the per-bin mean intensity
// inside [band_lo, band_hi] that exceed the local median (median_window_hz
// wide, default 2 Hz) by at least min_prominence_db.
std::vector<double> detect_tones(const Spectrogram& spec, double band_lo,
                                 double band_hi, double min_prominence_db = 6.0,
                                 double median_window_hz = 2.0);

// Split a frequency axis into tonal bins (nearest bin per tone) and broadband
// bins (everything farther than guard_hz from every tone). Bins within the
// guard band belong to neither set.
BandPartition partition_band(const std::vector<double>& freqs,
                             const std::vector<double>& tones, double guard_hz);

// Per-bin noise variance from a quiet-period spectrogram: the mean intensity
// across snapshots (the exponential-model mean). Needs >= 10 snapshots.
NoiseProfile noise_profile(const Spectrogram& quiet_spec);

}  // namespace wirange
