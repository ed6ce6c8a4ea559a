#include "wirange/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "wirange/parallel.hpp"

namespace wirange {

namespace {

constexpr double ln_half = -0.69314718055994530941723212145818;

double noise_var_for_bin(const NoiseProfile& noise, std::size_t bin) {
  if (noise.variance_per_bin.size() == 1) return noise.variance_per_bin[0];
  return noise.variance_per_bin.at(bin);
}

}  // namespace

double ln_bessel_i0(double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("ln_bessel_i0: argument must be >= 0");
  if (a < 30.0) {
    // I0(a) = sum_m (a^2/4)^m / (m!)^2; largest term ~ e^(2a)/(2 pi a), safe
    // in double precision for a < 30.
    const double q = 0.25 * a * a;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < 200; ++m) {
      term *= q / (static_cast<double>(m) * static_cast<double>(m));
      sum += term;
      if (term < sum * 1e-17) break;
    }
    return std::log(sum);
  }
  // Asymptotic: I0(a) ~ e^a/sqrt(2 pi a) (1 + 1/(8a) + 9/(128a^2) + ...).
  const double ia = 1.0 / a;
  const double corr =
      1.0 + ia * (0.125 + ia * (0.0703125 + ia * (0.0732421875 + ia * 0.112152099609375)));
  return a - 0.5 * std::log(2.0 * std::numbers::pi * a) + std::log(corr);
}

double exp_logpdf(double x, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("exp_logpdf: theta must be > 0");
  if (x < 0.0) throw std::invalid_argument("exp_logpdf: x must be >= 0");
  return -std::log(theta) - x / theta;
}

double nc2_logpdf(double y, double lambda) {
  if (y < 0.0 || lambda < 0.0)
    throw std::invalid_argument("nc2_logpdf: y and lambda must be >= 0");
  return ln_half - 0.5 * (y + lambda) + ln_bessel_i0(std::sqrt(y * lambda));
}

BroadbandEstimates estimate_broadband_params(const StriationGrid& grid,
                                             const NoiseProfile& noise,
                                             const BandPartition& part) {
  const std::size_t L = grid.n_striations();
  const std::size_t kb = grid.broadband.cols;
  if (L < 2 || kb < 2)
    throw std::invalid_argument("estimate_broadband_params: need >= 2 striations and bins");
  if (grid.broadband.cols != part.broadband_bins.size() ||
      grid.tonal.cols != part.tonal_bins.size())
    throw std::invalid_argument("estimate_broadband_params: grid/partition mismatch");

  BroadbandEstimates est;

  // Column means and noise variances for the broadband columns.
  std::vector<double> col_mean(kb, 0.0);
  std::vector<double> noise_var(kb, 0.0);
  for (std::size_t j = 0; j < kb; ++j) noise_var[j] = noise_var_for_bin(noise, part.broadband_bins[j]);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t j = 0; j < kb; ++j) col_mean[j] += grid.broadband.at(l, j);
  for (double& m : col_mean) m /= static_cast<double>(L);

  // Reference bin: largest mean intensity, which keeps the denominator of the
  // scaling-factor ratio as far above the noise floor as the data allows.
  est.ref_bin = static_cast<std::size_t>(
      std::distance(col_mean.begin(), std::max_element(col_mean.begin(), col_mean.end())));
  const double denom = col_mean[est.ref_bin] - noise_var[est.ref_bin];
  if (!(denom > 0.0))
    throw std::runtime_error("estimate_broadband_params: reference bin at/below noise floor");

  constexpr double alpha_floor = 1e-6;
  est.alpha.resize(kb);
  for (std::size_t j = 0; j < kb; ++j) {
    double a = (col_mean[j] - noise_var[j]) / denom;
    if (a < alpha_floor) {
      a = alpha_floor;
      ++est.clamps.alpha_floor;
    }
    est.alpha[j] = a;
  }

  const double alpha_mean =
      std::accumulate(est.alpha.begin(), est.alpha.end(), 0.0) / static_cast<double>(kb);

  est.v.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    double acc = 0.0;
    for (std::size_t j = 0; j < kb; ++j) acc += grid.broadband.at(l, j) - noise_var[j];
    double v = acc / static_cast<double>(kb) / alpha_mean;
    if (v < 0.0) {
      v = 0.0;
      ++est.clamps.v_floor;
    }
    est.v[l] = v;
  }

  est.theta = Matrix<double>(L, kb);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t j = 0; j < kb; ++j) {
      double th = est.alpha[j] * est.v[l] + noise_var[j];
      const double floor = 1e-3 * noise_var[j];
      if (th < floor) {
        th = floor;
        ++est.clamps.theta_floor;
      }
      est.theta.at(l, j) = th;
    }
  }

  // Variance at tonal bins: average of the nearest broadband columns on each
  // side (one-sided at the band edge).
  const std::size_t J = part.tonal_bins.size();
  est.sigma2_at_tones = Matrix<double>(L, J);
  for (std::size_t j = 0; j < J; ++j) {
    const std::size_t tone_bin = part.tonal_bins[j];
    const auto it = std::lower_bound(part.broadband_bins.begin(), part.broadband_bins.end(),
                                     tone_bin);
    const bool has_above = it != part.broadband_bins.end();
    const bool has_below = it != part.broadband_bins.begin();
    if (!has_above && !has_below)
      throw std::runtime_error("estimate_broadband_params: no broadband neighbor for tone");
    const std::size_t col_above =
        has_above ? static_cast<std::size_t>(std::distance(part.broadband_bins.begin(), it)) : 0;
    const std::size_t col_below = has_below ? col_above - 1 : 0;
    for (std::size_t l = 0; l < L; ++l) {
      double s;
      if (has_above && has_below)
        s = 0.5 * (est.theta.at(l, col_below) + est.theta.at(l, col_above));
      else
        s = has_above ? est.theta.at(l, col_above) : est.theta.at(l, col_below);
      est.sigma2_at_tones.at(l, j) = s;
    }
  }
  return est;
}

Matrix<double> normalize_tonal(const StriationGrid& grid, const BroadbandEstimates& est) {
  const std::size_t L = grid.tonal.rows;
  const std::size_t J = grid.tonal.cols;
  Matrix<double> y(L, J);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t j = 0; j < J; ++j)
      y.at(l, j) = grid.tonal.at(l, j) / (0.5 * est.sigma2_at_tones.at(l, j));
  return y;
}

Matrix<double> estimate_noncentrality(const Matrix<double>& y_bt, ClampCounters* clamps) {
  const std::size_t L = y_bt.rows;
  const std::size_t J = y_bt.cols;
  if (L < 2 || J < 1)
    throw std::invalid_argument("estimate_noncentrality: need >= 2 striations, >= 1 tone");

  std::vector<double> row_mean(L, 0.0), col_mean(J, 0.0);
  double grand = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t j = 0; j < J; ++j) {
      const double v = y_bt.at(l, j);
      row_mean[l] += v;
      col_mean[j] += v;
      grand += v;
    }
  }
  for (double& v : row_mean) v /= static_cast<double>(J);
  for (double& v : col_mean) v /= static_cast<double>(L);
  grand /= static_cast<double>(L * J);

  Matrix<double> lambda(L, J, 0.0);
  // Central chi^2_2 has variance 4, so the grand mean of a tone-free field
  // fluctuates around 2 with std 2/sqrt(LJ); require a 3-sigma excess before
  // trusting the rank-1 factorization.
  const double eps = 6.0 / std::sqrt(static_cast<double>(L * J));
  if (grand <= 2.0 + eps) {
    if (clamps) clamps->no_tonal_excess = true;
    return lambda;
  }
  const double denom = grand - 2.0;
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t j = 0; j < J; ++j) {
      double v = (row_mean[l] - 2.0) * (col_mean[j] - 2.0) / denom;
      if (v < 0.0) {
        v = 0.0;
        if (clamps) ++clamps->lambda_floor;
      }
      lambda.at(l, j) = v;
    }
  }
  return lambda;
}

LogLik joint_loglik(const StriationGrid& grid, const BroadbandEstimates& est,
                    const TonalEstimates& ton) {
  if (grid.broadband.rows != est.theta.rows || grid.broadband.cols != est.theta.cols ||
      grid.tonal.rows != ton.y.rows || grid.tonal.cols != ton.y.cols ||
      ton.y.rows != ton.lambda.rows || ton.y.cols != ton.lambda.cols)
    throw std::invalid_argument("joint_loglik: shape mismatch");

  LogLik out;
  for (std::size_t l = 0; l < grid.broadband.rows; ++l)
    for (std::size_t j = 0; j < grid.broadband.cols; ++j)
      out.broadband += exp_logpdf(grid.broadband.at(l, j), est.theta.at(l, j));
  for (std::size_t l = 0; l < grid.tonal.rows; ++l)
    for (std::size_t j = 0; j < grid.tonal.cols; ++j)
      out.tonal += nc2_logpdf(ton.y.at(l, j), ton.lambda.at(l, j));
  out.total = out.broadband + out.tonal;
  out.finite = std::isfinite(out.total);
  return out;
}

std::string to_string(FreeParam p) {
  switch (p) {
    case FreeParam::range: return "range";
    case FreeParam::rate: return "rate";
    case FreeParam::beta: return "beta";
  }
  return "?";
}

LikelihoodResult ml_estimate(const Spectrogram& intensity_spec, const BandPartition& part,
                             const NoiseProfile& noise, const MlProblem& problem) {
  if (problem.candidates.empty()) throw std::invalid_argument("ml_estimate: empty candidate grid");
  intensity_spec.validate();
  if (intensity_spec.kind != SpecKind::intensity)
    throw std::invalid_argument("ml_estimate: intensity spectrogram required");

  const std::size_t nc = problem.candidates.size();
  LikelihoodResult res;
  res.free = problem.free;
  res.candidates = problem.candidates;
  res.loglik.assign(nc, std::numeric_limits<double>::quiet_NaN());
  res.loglik_broadband.assign(nc, std::numeric_limits<double>::quiet_NaN());
  res.loglik_tonal.assign(nc, std::numeric_limits<double>::quiet_NaN());
  res.valid.assign(nc, 0);
  res.striations_used.assign(nc, 0);
  std::vector<ClampCounters> clamp_slots(nc);

  parallel_for(nc, problem.threads, [&](std::size_t i) {
    ParamVector q;
    q.range = problem.fixed_range;
    q.rate = problem.fixed_rate;
    q.beta = problem.fixed_beta;
    switch (problem.free) {
      case FreeParam::range: q.range = problem.candidates[i]; break;
      case FreeParam::rate: q.rate = RateProfile::constant_rate(problem.candidates[i]); break;
      case FreeParam::beta: q.beta = problem.candidates[i]; break;
    }
    try {
      StriationGrid grid = build_striation_grid(intensity_spec, q, part, problem.l_min);
      BroadbandEstimates est = estimate_broadband_params(grid, noise, part);
      TonalEstimates ton;
      ton.y = normalize_tonal(grid, est);
      ton.lambda = estimate_noncentrality(ton.y, &ton.clamps);
      const LogLik ll = joint_loglik(grid, est, ton);
      clamp_slots[i] = est.clamps;
      clamp_slots[i].accumulate(ton.clamps);
      res.striations_used[i] = static_cast<std::uint32_t>(grid.n_striations());
      if (ll.finite) {
        res.loglik[i] = ll.total;
        res.loglik_broadband[i] = ll.broadband;
        res.loglik_tonal[i] = ll.tonal;
        res.valid[i] = 1;
      }
    } catch (const std::runtime_error&) {
      // infeasible candidate (short window, receiver crossing, degenerate
      // reference bin); excluded from the argmax
    }
  });

  // Deterministic reduction: scan in order of increasing candidate value so
  // exact ties resolve toward the smallest candidate.
  std::vector<std::size_t> order(nc);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return res.candidates[a] < res.candidates[b];
  });
  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i : order) {
    if (!res.valid[i]) {
      ++res.skipped_candidates;
      continue;
    }
    if (!found || res.loglik[i] > best) {
      found = true;
      best = res.loglik[i];
      res.argmax_index = i;
      res.argmax_value = res.candidates[i];
    }
  }
  for (const auto& c : clamp_slots) res.clamps.accumulate(c);
  if (!found) throw std::runtime_error("ml_estimate: no feasible candidate");
  return res;
}

}  // namespace wirange
