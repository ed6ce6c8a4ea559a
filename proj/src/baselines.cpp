#include "wirange/baselines.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "wirange/parallel.hpp"

namespace wirange {

namespace {

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

constexpr double peak_floor_db = 6.0;

double quadratic_offset(double lm, double l0, double lp) {
  const double den = lm - 2.0 * l0 + lp;
  if (den >= 0.0) return 0.0;  // not a local max in this axis
  double d = 0.5 * (lm - lp) / den;
  return std::clamp(d, -0.5, 0.5);
}

}  // namespace

SlopeWindow default_slope_window(double nominal_range_m, double track_span_m,
                                 const std::vector<double>& freqs, double beta) {
  if (freqs.size() < 2 || !(nominal_range_m > 0.0) || !(track_span_m > 0.0))
    throw std::invalid_argument("default_slope_window: bad inputs");
  const double df = freqs[1] - freqs[0];
  const double f_mid = 0.5 * (freqs.front() + freqs.back());

  SlopeWindow w;
  w.freq_extent_hz = freqs.back() - freqs.front();
  const double curl = std::abs(beta * (beta - 1.0));
  if (curl < 1e-9) {
    w.range_extent_m = track_span_m;
  } else {
    // A striation f(r) = f_mid (r/r0)^beta deviates from its tangent by
    // ~ 0.5 |beta(beta-1)| f (dr/r0)^2; keep that below one bin at the window
    // edges.
    const double half = nominal_range_m * std::sqrt(2.0 * df / (f_mid * curl));
    w.range_extent_m = std::min(track_span_m, 2.0 * half);
  }
  return w;
}

SlopeResult slope_range(const Spectrogram& spec, const RangeAxis& axis,
                        const SlopeWindow& window, double beta) {
  if (spec.kind != SpecKind::intensity)
    throw std::invalid_argument("slope_range: intensity spectrogram required");
  const std::size_t n = spec.n_times();
  if (axis.ranges.size() != n) throw std::invalid_argument("slope_range: axis size mismatch");
  if (!(window.range_extent_m > 0.0) || !(window.freq_extent_hz > 0.0))
    throw std::invalid_argument("slope_range: window extents must be positive");

  // Frequency sub-band centered on the band center.
  const double f_mid = 0.5 * (spec.freqs.front() + spec.freqs.back());
  std::size_t kf0 = spec.n_freqs(), kf1 = 0;
  for (std::size_t k = 0; k < spec.n_freqs(); ++k) {
    if (std::abs(spec.freqs[k] - f_mid) <= 0.5 * window.freq_extent_hz + 1e-12) {
      kf0 = std::min(kf0, k);
      kf1 = std::max(kf1, k);
    }
  }
  if (kf0 >= spec.n_freqs() || kf1 <= kf0)
    throw std::invalid_argument("slope_range: frequency window does not fit");
  const std::size_t nf = kf1 - kf0 + 1;

  // Trailing range window ending at the final snapshot.
  const double r_final = axis.ranges.back();
  std::size_t n0 = n;
  for (std::size_t i = n; i-- > 0;) {
    if (std::abs(axis.ranges[i] - r_final) <= window.range_extent_m + 1e-9) n0 = i;
    else break;
  }
  if (n0 == n || n - n0 < 4) throw std::invalid_argument("slope_range: range window does not fit");
  const std::size_t nr = n - n0;

  // Resample rows onto a uniform, increasing range grid.
  std::vector<double> rw(nr);
  std::vector<std::size_t> rows(nr);
  const bool ascending = axis.ranges[n - 1] > axis.ranges[n0];
  for (std::size_t i = 0; i < nr; ++i) {
    const std::size_t src = ascending ? n0 + i : n - 1 - i;
    rw[i] = axis.ranges[src];
    rows[i] = src;
  }
  for (std::size_t i = 1; i < nr; ++i)
    if (!(rw[i] > rw[i - 1])) throw std::runtime_error("slope_range: range axis not monotone");
  const double r_lo = rw.front(), r_hi = rw.back();
  const double dr = (r_hi - r_lo) / static_cast<double>(nr - 1);

  Matrix<double> win(nr, nf);
  for (std::size_t i = 0; i < nr; ++i) {
    const double rho = r_lo + dr * static_cast<double>(i);
    auto it = std::upper_bound(rw.begin(), rw.end(), rho);
    std::size_t hi = static_cast<std::size_t>(std::distance(rw.begin(), it));
    hi = std::clamp<std::size_t>(hi, 1, nr - 1);
    const double w = std::clamp((rho - rw[hi - 1]) / (rw[hi] - rw[hi - 1]), 0.0, 1.0);
    for (std::size_t k = 0; k < nf; ++k) {
      const double v_lo = spec.values.at(rows[hi - 1], kf0 + k);
      const double v_hi = spec.values.at(rows[hi], kf0 + k);
      win.at(i, k) = v_lo * (1.0 - w) + v_hi * w;
    }
  }

  // Mean removal; optional separable Hann taper.
  double mean = 0.0;
  for (double v : win.data) mean += v;
  mean /= static_cast<double>(win.data.size());
  for (double& v : win.data) v -= mean;
  if (window.taper) {
    const auto hann = [](std::size_t i, std::size_t len) {
      return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(len - 1));
    };
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t k = 0; k < nf; ++k) win.at(i, k) *= hann(i, nr) * hann(k, nf);
  }

  // 2D DFT magnitude, one-sided in the frequency-wavenumber axis.
  const std::size_t nc = nf / 2 + 1;
  std::vector<fftw_complex> out(nr * nc);
  {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      plan = fftw_plan_dft_r2c_2d(static_cast<int>(nr), static_cast<int>(nf), win.data.data(),
                                  out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  Matrix<double> mag(nr, nc);
  for (std::size_t i = 0; i < nr * nc; ++i)
    mag.data[i] = std::hypot(out[i][0], out[i][1]);

  // Dominant peak outside the DC cross (kappa_r = 0 row, kappa_f = 0 column).
  double best = -1.0;
  std::size_t bi = 0, bj = 0;
  std::vector<double> off_cross;
  off_cross.reserve(nr * nc);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 1; j < nc; ++j) {
      if (i == 0) continue;
      off_cross.push_back(mag.at(i, j));
      if (mag.at(i, j) > best) {
        best = mag.at(i, j);
        bi = i;
        bj = j;
      }
    }
  }
  if (off_cross.empty() || best <= 0.0) throw std::runtime_error("slope_range: no striation detected");
  std::nth_element(off_cross.begin(), off_cross.begin() + static_cast<std::ptrdiff_t>(off_cross.size() / 2),
                   off_cross.end());
  const double med = off_cross[off_cross.size() / 2];
  const double snr_db = med > 0.0 ? 20.0 * std::log10(best / med)
                                  : std::numeric_limits<double>::infinity();
  if (!(snr_db >= peak_floor_db)) throw std::runtime_error("slope_range: no striation detected");

  // Quadratic sub-bin refinement on log magnitude (rows wrap; columns clamp).
  const auto lmag = [&](std::size_t i, std::size_t j) {
    const double v = mag.at(i % nr, j);
    return std::log(std::max(v, 1e-300));
  };
  double di = 0.0, dj = 0.0;
  di = quadratic_offset(lmag(bi + nr - 1, bj), lmag(bi, bj), lmag(bi + 1, bj));
  if (bj >= 1 && bj + 1 < nc)
    dj = quadratic_offset(lmag(bi, bj - 1), lmag(bi, bj), lmag(bi, bj + 1));

  const double df = spec.freqs[1] - spec.freqs[0];
  const double row = static_cast<double>(bi) + di;
  const double signed_row = row <= static_cast<double>(nr) / 2.0 ? row : row - static_cast<double>(nr);
  const double kappa_r = signed_row / (static_cast<double>(nr) * dr);  // cycles per meter
  const double kappa_f = (static_cast<double>(bj) + dj) / (static_cast<double>(nf) * df);  // cycles per Hz
  if (kappa_f <= 0.0) throw std::runtime_error("slope_range: no striation detected");
  const double slope = -kappa_r / kappa_f;  // df/dr along striations
  if (!(slope > 0.0)) throw std::runtime_error("slope_range: no striation detected");

  const double f_bar = 0.5 * (spec.freqs[kf0] + spec.freqs[kf1]);
  const double r_center = 0.5 * (r_lo + r_hi);
  SlopeResult out_res;
  out_res.slope = slope;
  out_res.peak_snr_db = snr_db;
  out_res.range_estimate = beta * f_bar / slope + (r_final - r_center);
  return out_res;
}

LikelihoodResult tonal_only_range(const Spectrogram& spec, const BandPartition& part,
                                  const MlProblem& problem, const TonalOnlyOptions& opts) {
  if (part.tonal_bins.empty()) throw std::invalid_argument("tonal_only_range: no tonal bins");
  if (part.broadband_bins.empty())
    throw std::invalid_argument("tonal_only_range: no off-tonal bins for background");
  if (problem.candidates.empty()) throw std::invalid_argument("tonal_only_range: empty grid");
  if (spec.kind != SpecKind::intensity)
    throw std::invalid_argument("tonal_only_range: intensity spectrogram required");

  // Range-independent background: pooled mean intensity over the off-tonal
  // bins and all snapshots of the processed window.
  double bg = 0.0;
  for (std::size_t nidx = 0; nidx < spec.n_times(); ++nidx)
    for (std::size_t k : part.broadband_bins) bg += spec.values.at(nidx, k);
  bg /= static_cast<double>(spec.n_times() * part.broadband_bins.size());
  if (!(bg > 0.0)) throw std::runtime_error("tonal_only_range: degenerate background");

  std::vector<double> lambda_grid;
  for (double v = 0.0; v <= opts.lambda_max + 1e-9; v += opts.lambda_step)
    lambda_grid.push_back(v);

  const std::size_t ncand = problem.candidates.size();
  LikelihoodResult res;
  res.free = problem.free;
  res.candidates = problem.candidates;
  res.loglik.assign(ncand, std::numeric_limits<double>::quiet_NaN());
  res.loglik_broadband.assign(ncand, 0.0);
  res.loglik_tonal.assign(ncand, std::numeric_limits<double>::quiet_NaN());
  res.valid.assign(ncand, 0);
  res.striations_used.assign(ncand, 0);
  std::vector<std::uint64_t> saturated(ncand, 0);

  parallel_for(ncand, problem.threads, [&](std::size_t i) {
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
      const StriationGrid grid = build_striation_grid(spec, q, part, problem.l_min);
      double total = 0.0;
      for (std::size_t l = 0; l < grid.tonal.rows; ++l) {
        for (std::size_t j = 0; j < grid.tonal.cols; ++j) {
          const double y = grid.tonal.at(l, j) / (0.5 * bg);
          double best_ll = -std::numeric_limits<double>::infinity();
          double best_lambda = 0.0;
          for (double lam : lambda_grid) {
            const double ll = nc2_logpdf(y, lam);
            if (ll > best_ll) {
              best_ll = ll;
              best_lambda = lam;
            }
          }
          if (best_lambda >= opts.lambda_max - 1e-9) ++saturated[i];
          total += best_ll;
        }
      }
      res.striations_used[i] = static_cast<std::uint32_t>(grid.n_striations());
      if (std::isfinite(total)) {
        res.loglik[i] = total;
        res.loglik_tonal[i] = total;
        res.valid[i] = 1;
      }
    } catch (const std::runtime_error&) {
      // infeasible candidate
    }
  });

  std::vector<std::size_t> order(ncand);
  for (std::size_t i = 0; i < ncand; ++i) order[i] = i;
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
  for (std::uint64_t s : saturated) res.clamps.lambda_saturated += s;
  if (!found) throw std::runtime_error("tonal_only_range: no feasible candidate");
  return res;
}

}  // namespace wirange
