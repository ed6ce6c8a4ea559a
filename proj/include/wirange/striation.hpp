#pragma once

#include "wirange/types.hpp"

namespace wirange {

// Candidate parameter vector: range at the final snapshot, range-rate
// profile, and waveguide invariant.
struct ParamVector {
  double range{0.0};  // m, at the final snapshot
  RateProfile rate{RateProfile::constant_rate(0.0)};
  double beta{1.0};
};

struct RangeAxis {
  std::vector<double> ranges;  // one per snapshot (m)
};

// Intensities resampled along projected striations. Rows are striations
// ordered by reference range; columns follow the partition's bin ordering.
struct StriationGrid {
  Matrix<double> broadband;          // L x |K^b|
  Matrix<double> tonal;              // L x J
  double ref_freq{0.0};              // f' (Hz)
  std::vector<double> ref_ranges;    // r'_l, ascending (m)
  std::vector<double> broadband_freqs;
  std::vector<double> tonal_freqs;

  std::size_t n_striations() const { return ref_ranges.size(); }
};

// Convert snapshot times to ranges: r_n = q.range - integral of the rate
// over [t_n, t_N]. The final snapshot maps to q.range exactly.
RangeAxis map_time_to_range(const std::vector<double>& times, const ParamVector& q);

// Ranges along one striation: r(f) = r' * (f/f')^(1/beta).
std::vector<double> project_striation(double r_prime, double f_prime, double beta,
                                      const std::vector<double>& freqs);

// Resample an intensity spectrogram into the striation-frequency domain for
// candidate q. Reference frequency is the processed bin nearest the band
// center; candidate reference ranges are the snapshot ranges themselves.
// Striations needing extrapolation beyond the first/last snapshot are
// rejected, never extrapolated. Throws "window too short for candidate
// range" when fewer than l_min striations survive.
StriationGrid build_striation_grid(const Spectrogram& intensity_spec,
                                   const ParamVector& q, const BandPartition& part,
                                   int l_min = 30);

// Restrict a spectrogram to bins whose centers lie in [band_lo, band_hi].
Spectrogram slice_band(const Spectrogram& spec, double band_lo, double band_hi);

}  // namespace wirange
