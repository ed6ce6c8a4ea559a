#include "wirange/striation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wirange {

RangeAxis map_time_to_range(const std::vector<double>& times, const ParamVector& q) {
  if (times.empty()) throw std::invalid_argument("map_time_to_range: empty times");
  if (!(q.range > 0.0)) throw std::invalid_argument("map_time_to_range: range must be > 0");
  RangeAxis axis;
  axis.ranges.resize(times.size());
  const double t_final = times.back();
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double r = q.range - q.rate.integrate(times[n], t_final);
    if (!(r > 0.0)) throw std::runtime_error("map_time_to_range: track crosses receiver");
    axis.ranges[n] = r;
  }
  return axis;
}

std::vector<double> project_striation(double r_prime, double f_prime, double beta,
                                      const std::vector<double>& freqs) {
  if (!(r_prime > 0.0) || !(f_prime > 0.0))
    throw std::invalid_argument("project_striation: r' and f' must be > 0");
  if (beta == 0.0) throw std::invalid_argument("project_striation: beta must be nonzero");
  std::vector<double> r(freqs.size());
  const double inv_beta = 1.0 / beta;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (!(freqs[i] > 0.0)) throw std::invalid_argument("project_striation: frequencies must be > 0");
    r[i] = r_prime * std::pow(freqs[i] / f_prime, inv_beta);
  }
  return r;
}

namespace {

// Linear interpolation of column k at range rho on a strictly increasing
// range axis; rho must be within [r.front(), r.back()] up to fp slack.
double interp_column(const std::vector<double>& r, const Matrix<double>& x,
                     const std::vector<std::size_t>& row_order, std::size_t k, double rho) {
  const std::size_t n = r.size();
  if (rho <= r.front()) return x.at(row_order[0], k);
  if (rho >= r.back()) return x.at(row_order[n - 1], k);
  const auto it = std::upper_bound(r.begin(), r.end(), rho);
  const std::size_t hi = static_cast<std::size_t>(std::distance(r.begin(), it));
  const double w = (rho - r[hi - 1]) / (r[hi] - r[hi - 1]);
  return x.at(row_order[hi - 1], k) * (1.0 - w) + x.at(row_order[hi], k) * w;
}

}  // namespace

StriationGrid build_striation_grid(const Spectrogram& spec, const ParamVector& q,
                                   const BandPartition& part, int l_min) {
  if (spec.kind != SpecKind::intensity)
    throw std::invalid_argument("build_striation_grid: intensity spectrogram required");
  if (!(q.beta > 0.0)) throw std::invalid_argument("build_striation_grid: beta must be > 0");
  if (spec.freqs.empty() ||
      std::abs(spec.freqs.front() - part.f_min) > 1e-9 ||
      std::abs(spec.freqs.back() - part.f_max) > 1e-9)
    throw std::invalid_argument("build_striation_grid: partition/spectrogram axis mismatch");

  std::vector<std::size_t> processed;
  processed.reserve(part.broadband_bins.size() + part.tonal_bins.size());
  processed.insert(processed.end(), part.broadband_bins.begin(), part.broadband_bins.end());
  processed.insert(processed.end(), part.tonal_bins.begin(), part.tonal_bins.end());
  std::sort(processed.begin(), processed.end());
  if (processed.empty()) throw std::invalid_argument("build_striation_grid: empty partition");
  if (processed.back() >= spec.n_freqs())
    throw std::invalid_argument("build_striation_grid: partition bin out of range");

  RangeAxis axis = map_time_to_range(spec.times, q);
  const std::size_t n = axis.ranges.size();

  // The transform needs a monotone range axis (one pre- or post-CPA segment).
  const bool ascending = axis.ranges.back() > axis.ranges.front();
  std::vector<std::size_t> row_order(n);
  std::vector<double> r_sorted(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = ascending ? i : n - 1 - i;
    row_order[i] = src;
    r_sorted[i] = axis.ranges[src];
  }
  for (std::size_t i = 1; i < n; ++i)
    if (!(r_sorted[i] > r_sorted[i - 1]))
      throw std::runtime_error("build_striation_grid: range axis not monotone");

  // Reference frequency: processed bin nearest the band center.
  const double f_mid = 0.5 * (part.f_min + part.f_max);
  std::size_t ref_bin = processed[0];
  for (std::size_t k : processed)
    if (std::abs(spec.freqs[k] - f_mid) < std::abs(spec.freqs[ref_bin] - f_mid)) ref_bin = k;
  const double f_ref = spec.freqs[ref_bin];

  // Per-bin range scale factors (f_k/f')^(1/beta); shared by all striations.
  const double inv_beta = 1.0 / q.beta;
  std::vector<double> scale(processed.size());
  for (std::size_t i = 0; i < processed.size(); ++i)
    scale[i] = std::pow(spec.freqs[processed[i]] / f_ref, inv_beta);
  const double c_min = *std::min_element(scale.begin(), scale.end());
  const double c_max = *std::max_element(scale.begin(), scale.end());

  const double r_lo = r_sorted.front();
  const double r_hi = r_sorted.back();
  const double slack = 1e-9 * r_hi;

  // A striation anchored at r' is valid iff it stays inside the observed
  // range span across every processed bin.
  std::vector<double> ref_ranges;
  for (std::size_t i = 0; i < n; ++i) {
    const double rp = r_sorted[i];
    if (rp * c_min >= r_lo - slack && rp * c_max <= r_hi + slack) ref_ranges.push_back(rp);
  }
  if (static_cast<int>(ref_ranges.size()) < l_min)
    throw std::runtime_error("build_striation_grid: window too short for candidate range");

  StriationGrid grid;
  grid.ref_freq = f_ref;
  grid.ref_ranges = ref_ranges;
  grid.broadband = Matrix<double>(ref_ranges.size(), part.broadband_bins.size());
  grid.tonal = Matrix<double>(ref_ranges.size(), part.tonal_bins.size());
  grid.broadband_freqs.reserve(part.broadband_bins.size());
  std::vector<double> scale_bb;
  for (std::size_t k : part.broadband_bins) {
    grid.broadband_freqs.push_back(spec.freqs[k]);
    scale_bb.push_back(std::pow(spec.freqs[k] / f_ref, inv_beta));
  }
  grid.tonal_freqs.reserve(part.tonal_bins.size());
  std::vector<double> scale_t;
  for (std::size_t k : part.tonal_bins) {
    grid.tonal_freqs.push_back(spec.freqs[k]);
    scale_t.push_back(std::pow(spec.freqs[k] / f_ref, inv_beta));
  }

  for (std::size_t l = 0; l < ref_ranges.size(); ++l) {
    const double rp = ref_ranges[l];
    for (std::size_t j = 0; j < part.broadband_bins.size(); ++j)
      grid.broadband.at(l, j) = interp_column(r_sorted, spec.values, row_order,
                                              part.broadband_bins[j], rp * scale_bb[j]);
    for (std::size_t j = 0; j < part.tonal_bins.size(); ++j)
      grid.tonal.at(l, j) = interp_column(r_sorted, spec.values, row_order,
                                          part.tonal_bins[j], rp * scale_t[j]);
  }
  return grid;
}

Spectrogram slice_band(const Spectrogram& spec, double band_lo, double band_hi) {
  if (!(band_hi > band_lo)) throw std::invalid_argument("slice_band: empty band");
  std::size_t k0 = 0;
  while (k0 < spec.n_freqs() && spec.freqs[k0] < band_lo - 1e-12) ++k0;
  std::size_t k1 = k0;
  while (k1 < spec.n_freqs() && spec.freqs[k1] <= band_hi + 1e-12) ++k1;
  if (k1 <= k0) throw std::invalid_argument("slice_band: no bins in band");

  Spectrogram out;
  out.kind = spec.kind;
  out.times = spec.times;
  out.freqs.assign(spec.freqs.begin() + static_cast<std::ptrdiff_t>(k0),
                   spec.freqs.begin() + static_cast<std::ptrdiff_t>(k1));
  const std::size_t nk = k1 - k0;
  if (spec.kind == SpecKind::intensity) {
    out.values = Matrix<double>(spec.n_times(), nk);
    for (std::size_t n = 0; n < spec.n_times(); ++n)
      for (std::size_t k = 0; k < nk; ++k) out.values.at(n, k) = spec.values.at(n, k0 + k);
  } else {
    out.cvalues = Matrix<cplx>(spec.n_times(), nk);
    for (std::size_t n = 0; n < spec.n_times(); ++n)
      for (std::size_t k = 0; k < nk; ++k) out.cvalues.at(n, k) = spec.cvalues.at(n, k0 + k);
  }
  return out;
}

}  // namespace wirange
