#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wirange/striation.hpp"
#include "wirange/types.hpp"

namespace wirange {

// log of the modified Bessel function I_0, stable for arguments up to ~1e9
// (power series below 30, asymptotic expansion above).
double ln_bessel_i0(double a);

// Exponential log-density: -ln(theta) - x/theta.
double exp_logpdf(double x, double theta);

// Noncentral chi-squared (2 dof) log-density of a normalized intensity:
// ln(1/2) - (y + lambda)/2 + ln I0(sqrt(y*lambda)).
double nc2_logpdf(double y, double lambda);

struct ClampCounters {
  std::uint64_t alpha_floor{0};
  std::uint64_t v_floor{0};
  std::uint64_t theta_floor{0};
  std::uint64_t lambda_floor{0};
  std::uint64_t lambda_saturated{0};  // hit the top of a search grid
  bool no_tonal_excess{false};

  void accumulate(const ClampCounters& o) {
    alpha_floor += o.alpha_floor;
    v_floor += o.v_floor;
    theta_floor += o.theta_floor;
    lambda_floor += o.lambda_floor;
    lambda_saturated += o.lambda_saturated;
    no_tonal_excess = no_tonal_excess || o.no_tonal_excess;
  }
};

// Broadband parameters estimated from a striation grid: scaling factors
// alpha_k relative to the reference bin, per-striation received variance v_l,
// the resulting scale parameters theta (= broadband-plus-noise variance), and
// the variance at tonal bins obtained by averaging the nearest broadband
// neighbors on each side.
struct BroadbandEstimates {
  std::size_t ref_bin{0};          // index into the grid's broadband columns
  std::vector<double> alpha;       // |K^b|
  std::vector<double> v;           // L
  Matrix<double> theta;            // L x |K^b|
  Matrix<double> sigma2_at_tones;  // L x J
  ClampCounters clamps;
};

struct TonalEstimates {
  Matrix<double> y;       // L x J normalized intensities
  Matrix<double> lambda;  // L x J noncentrality estimates
  ClampCounters clamps;
};

BroadbandEstimates estimate_broadband_params(const StriationGrid& grid,
                                             const NoiseProfile& noise,
                                             const BandPartition& part);

// Normalized intensities y = x / (sigma^2/2) at the tonal bins.
Matrix<double> normalize_tonal(const StriationGrid& grid, const BroadbandEstimates& est);

// Rank-1 moment estimator of the noncentrality field from E[y] = 2 + lambda:
// lambda_hat[l,k] = (row_mean_l - 2)(col_mean_k - 2)/(grand_mean - 2),
// clamped at 0. When the grand mean shows no tonal excess above sampling
// noise the result is all-zero with the no_tonal_excess flag set.
Matrix<double> estimate_noncentrality(const Matrix<double>& y_bt, ClampCounters* clamps = nullptr);

struct LogLik {
  double total{0.0};
  double broadband{0.0};
  double tonal{0.0};
  bool finite{true};
};

// Sum of exp_logpdf over broadband cells plus nc2_logpdf over tonal cells,
// accumulated in fixed row-major order.
LogLik joint_loglik(const StriationGrid& grid, const BroadbandEstimates& est,
                    const TonalEstimates& ton);

enum class FreeParam { range, rate, beta };

struct MlProblem {
  FreeParam free{FreeParam::range};
  std::vector<double> candidates;
  // Fixed values for the two non-free parameters (range/rate/beta as needed).
  double fixed_range{0.0};
  RateProfile fixed_rate{RateProfile::constant_rate(0.0)};
  double fixed_beta{1.0};
  int l_min{30};
  int threads{0};  // 0 = hardware concurrency
};

struct LikelihoodResult {
  FreeParam free{FreeParam::range};
  std::vector<double> candidates;
  std::vector<double> loglik;            // NaN for infeasible/invalid candidates
  std::vector<double> loglik_broadband;  // partial sums
  std::vector<double> loglik_tonal;
  std::vector<std::uint8_t> valid;
  std::vector<std::uint32_t> striations_used;
  double argmax_value{0.0};
  std::size_t argmax_index{0};
  std::size_t skipped_candidates{0};
  ClampCounters clamps;
};

// Grid maximum-likelihood estimation of the free parameter. For each
// candidate the pipeline is: striation transform -> broadband parameter
// estimation -> intensity normalization -> noncentrality estimation -> joint
// log-likelihood. Candidates whose transform cannot supply l_min striations
// are skipped; ties break toward the smallest candidate. Results do not
// depend on the number of worker threads.
LikelihoodResult ml_estimate(const Spectrogram& intensity_spec, const BandPartition& part,
                             const NoiseProfile& noise, const MlProblem& problem);

std::string to_string(FreeParam p);

}  // namespace wirange
