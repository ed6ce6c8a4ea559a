#pragma once

#include "wirange/inference.hpp"
#include "wirange/striation.hpp"
#include "wirange/types.hpp"

namespace wirange {

// Range-frequency window for the slope-based estimator.
struct SlopeWindow {
  double range_extent_m{0.0};  // trailing portion of the range axis
  double freq_extent_hz{0.0};  // centered on the band center
  bool taper{true};
};

struct SlopeResult {
  double range_estimate{0.0};  // at the final snapshot (m)
  double slope{0.0};           // df/dr (Hz/m)
  double peak_snr_db{0.0};     // 2D-DFT peak over median off-cross magnitude
};

// Default window: full processed band; range extent limited so that striation
// curvature at the nominal range deviates from a straight line by less than
// one frequency bin, capped by the available track span.
SlopeWindow default_slope_window(double nominal_range_m, double track_span_m,
                                 const std::vector<double>& freqs, double beta);

// Slope-based benchmark (S): mean-removed window -> 2D DFT magnitude ->
// dominant off-axis peak (quadratic sub-bin refinement) -> striation slope
// df/dr -> r = beta * f_mid / slope at the window center, shifted to the
// final snapshot along the known relative range axis. Throws
// "no striation detected" when no off-axis peak clears the floor.
SlopeResult slope_range(const Spectrogram& intensity_spec, const RangeAxis& axis,
                        const SlopeWindow& window, double beta);

struct TonalOnlyOptions {
  double lambda_max{100.0};
  double lambda_step{2.5};
};

// Tonal-only statistical benchmark (T): same striation transform as the
// joint method, but the normalization variance is a range-independent
// background level pooled from the off-tonal bins of the observed
// spectrogram, the noncentrality of each cell is found by a likelihood
// search over {0, step, ..., max}, and only tonal bins enter the
// log-likelihood. Diagnostics flag saturation at the top of the search grid.
LikelihoodResult tonal_only_range(const Spectrogram& intensity_spec,
                                  const BandPartition& part, const MlProblem& problem,
                                  const TonalOnlyOptions& opts = {});

}  // namespace wirange
