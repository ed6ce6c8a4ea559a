#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wirange/baselines.hpp"
#include "wirange/inference.hpp"
#include "wirange/simulate.hpp"

namespace wirange {

enum class Method { G, S, T };

Method method_from_string(const std::string& s);
std::string to_string(Method m);

// One synthetic ranging scenario: an outbound ship over an analytic-WI
// channel with tones and broadband noise at configurable SNRs, estimated on
// a relative candidate grid around the true final range.
struct TrialSpec {
  double beta{1.18};
  double rate_mps{10.2};
  double r_final{23000.0};
  std::size_t n_snapshots{130};
  double dt{10.0};
  double band_lo{42.0};
  double band_hi{49.0};
  double df{0.05};
  std::vector<double> tones{42.8, 44.2, 45.5, 46.9, 48.3};
  double tone_snr_db{12.0};       // per-bin tone intensity over noise
  double broadband_snr_db{8.0};   // <= -300 means no ship broadband
  double noise_var{1.0};
  double modulation_depth{0.9};
  double striation_coeff{1.2};    // interference phase coefficient
  double guard_hz{0.35};
  double tone_prominence_db{6.0};
  double grid_rel_lo{0.6};
  double grid_rel_hi{1.4};
  double grid_step_m{10.0};
  int l_min{30};
  int threads{1};  // per-trial thread count
};

struct TrialResult {
  std::uint64_t seed{0};
  double r_true{0.0};
  double r_hat{0.0};
  double signed_pct{0.0};
};

struct SweepSummary {
  std::vector<TrialResult> trials;
  double rmse_pct{0.0};
  double mean_pct{0.0};
  double stdev_pct{0.0};
  double iqr_pct{0.0};
  double within_pct(double bound) const;  // fraction of |error| <= bound
};

SimConfig make_sim_config(const TrialSpec& spec, std::uint64_t seed);

// Run one seeded trial with the given method. The candidate grid spans
// [grid_rel_lo, grid_rel_hi] * r_final in grid_step_m increments (methods G
// and T); method S uses its default window sized at the grid center.
TrialResult run_trial(const TrialSpec& spec, Method method, std::uint64_t seed);

// n_trials seeded trials (seeds base_seed, base_seed+1, ...), optionally in
// parallel; aggregation is by trial index and independent of thread count.
SweepSummary run_sweep(const TrialSpec& spec, Method method, std::uint64_t base_seed,
                       int n_trials, int trial_threads);

TrialSpec read_trial_spec(const std::string& json_path);

}  // namespace wirange
