#include "doctest.h"

#include <cmath>
#include <random>

#include "wirange/simulate.hpp"
#include "wirange/spectral.hpp"
#include "wirange/striation.hpp"

using namespace wirange;

namespace {

// Deterministic analytic-channel intensity surface on a constant-rate track.
Spectrogram analytic_surface(double beta, double r_start, double rate, std::size_t n_snap,
                             double dt, double f_lo, double f_hi, double df, double mod) {
  ChannelModel ch;
  ch.kind = ChannelKind::analytic_wi;
  ch.beta_true = beta;
  ch.delta_k_coeff = 1.2;
  ch.modulation_depth = mod;
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  const auto nk = static_cast<std::size_t>(std::llround((f_hi - f_lo) / df)) + 1;
  spec.freqs.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) spec.freqs[k] = f_lo + df * static_cast<double>(k);
  spec.times.resize(n_snap);
  for (std::size_t n = 0; n < n_snap; ++n) spec.times[n] = dt * static_cast<double>(n);
  spec.values = Matrix<double>(n_snap, nk);
  for (std::size_t n = 0; n < n_snap; ++n) {
    const double r = r_start + rate * spec.times[n];
    for (std::size_t k = 0; k < nk; ++k) {
      const double g = green_magnitude(ch, r, spec.freqs[k]);
      spec.values.at(n, k) = g * g;
    }
  }
  return spec;
}

double row_cov(const Matrix<double>& m, std::size_t l) {
  double mean = 0.0;
  for (std::size_t j = 0; j < m.cols; ++j) mean += m.at(l, j);
  mean /= static_cast<double>(m.cols);
  double var = 0.0;
  for (std::size_t j = 0; j < m.cols; ++j) {
    const double d = m.at(l, j) - mean;
    var += d * d;
  }
  var /= static_cast<double>(m.cols);
  return std::sqrt(var) / mean;
}

}  // namespace

TEST_SUITE("striation") {

TEST_CASE("constant rate maps time to range linearly back from the final snapshot") {
  ParamVector q;
  q.range = 23000.0;
  q.rate = RateProfile::constant_rate(10.2);
  q.beta = 1.18;
  const RangeAxis axis = map_time_to_range({0.0, 50.0, 100.0}, q);
  CHECK(axis.ranges[0] == doctest::Approx(21980.0).epsilon(1e-12));  // r - 10.2 * 100 s
  CHECK(axis.ranges[1] == doctest::Approx(22490.0).epsilon(1e-12));
  CHECK(axis.ranges[2] == 23000.0);  // final snapshot is exactly q.range
}

TEST_CASE("sampled rate profiles integrate like a fine Riemann sum") {
  std::vector<double> times, rates;
  for (int i = 0; i <= 20; ++i) {
    times.push_back(60.0 * i);
    rates.push_back(8.0 + 3.0 * std::sin(0.37 * i) + 0.1 * i);
  }
  ParamVector q;
  q.range = 30000.0;
  q.rate = RateProfile::sampled(times, rates);
  q.beta = 1.0;
  std::vector<double> snap_times;
  for (int n = 0; n < 13; ++n) snap_times.push_back(90.0 * n);
  const RangeAxis axis = map_time_to_range(snap_times, q);

  const double t_final = snap_times.back();
  for (std::size_t n = 0; n < snap_times.size(); ++n) {
    double integral = 0.0;
    const double step = 1e-3;
    const auto m = static_cast<std::size_t>((t_final - snap_times[n]) / step);
    for (std::size_t i = 0; i < m; ++i)
      integral += q.rate.at(snap_times[n] + (static_cast<double>(i) + 0.5) * step) * step;
    CHECK(axis.ranges[n] == doctest::Approx(30000.0 - integral).epsilon(1e-6));
  }
}

TEST_CASE("a track through the receiver is rejected") {
  ParamVector q;
  q.range = 500.0;
  q.rate = RateProfile::constant_rate(10.0);
  q.beta = 1.0;
  CHECK_THROWS_WITH_AS(map_time_to_range({0.0, 100.0}, q),
                       "map_time_to_range: track crosses receiver", std::runtime_error);
}

TEST_CASE("project_striation follows the power-law curve") {
  const auto r = project_striation(23000.0, 45.5, 1.18, {42.0, 45.5, 91.0});
  // high-precision evaluation of r' (f/f')^(1/beta)
  const double expected = 23000.0 * std::exp(std::log(42.0 / 45.5) / 1.18);
  CHECK(expected == doctest::Approx(21491.6).epsilon(2e-5));
  CHECK(r[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r[1] == 23000.0);  // f = f' is the identity point
  const auto lin = project_striation(1000.0, 45.5, 1.0, {91.0});
  CHECK(lin[0] == doctest::Approx(2000.0).epsilon(1e-12));  // beta = 1 doubles with f
  CHECK_THROWS(project_striation(1000.0, 45.5, 0.0, {42.0}));
}

TEST_CASE("project_striation round-trips through any intermediate frequency") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> rd(100.0, 90000.0);
  std::uniform_real_distribution<double> fd(10.0, 400.0);
  std::uniform_real_distribution<double> bd(0.4, 2.5);
  for (int i = 0; i < 300; ++i) {
    const double r0 = rd(rng), f0 = fd(rng), f1 = fd(rng), beta = bd(rng);
    const double r1 = project_striation(r0, f0, beta, {f1})[0];
    const double back = project_striation(r1, f1, beta, {f0})[0];
    CHECK(back == doctest::Approx(r0).epsilon(1e-12));
  }
}

TEST_CASE("a constant surface yields a constant grid with every interior striation") {
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  spec.freqs = {42.0, 42.5, 43.0, 43.5, 44.0};
  spec.times = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90};
  spec.values = Matrix<double>(10, 5, 7.25);
  const BandPartition part = partition_band(spec.freqs, {}, 0.0);
  ParamVector q;
  q.range = 10000.0;
  q.rate = RateProfile::constant_rate(10.0);
  q.beta = 1.18;
  const StriationGrid grid = build_striation_grid(spec, q, part, 1);

  // independent recount of valid anchors via the projection law
  const double f_ref = 43.0;
  std::size_t expected = 0;
  for (double t : spec.times) {
    const double rp = 10000.0 - 10.0 * (90.0 - t);
    const double lo = rp * std::pow(42.0 / f_ref, 1.0 / 1.18);
    const double hi = rp * std::pow(44.0 / f_ref, 1.0 / 1.18);
    if (lo >= 10000.0 - 900.0 && hi <= 10000.0) ++expected;
  }
  CHECK(grid.n_striations() == expected);
  CHECK(grid.ref_freq == 43.0);
  for (double v : grid.broadband.data) CHECK(v == 7.25);
}

TEST_CASE("matched candidate parameters give striation rows of constant intensity") {
  const double r_start = 9842.0, rate = 10.2, dt = 10.0;
  const std::size_t n_snap = 130;
  const Spectrogram surf =
      analytic_surface(1.18, r_start, rate, n_snap, dt, 42.0, 49.0, 0.05, 1.0);
  const BandPartition part = partition_band(surf.freqs, {}, 0.0);
  ParamVector q;
  q.range = r_start + rate * dt * static_cast<double>(n_snap - 1);
  q.rate = RateProfile::constant_rate(rate);
  q.beta = 1.18;
  const StriationGrid grid = build_striation_grid(surf, q, part, 30);
  REQUIRE(grid.n_striations() >= 30);
  for (std::size_t l = 0; l < grid.n_striations(); ++l)
    CHECK(row_cov(grid.broadband, l) < 1e-6);

  // a mismatched candidate range leaves visibly non-constant rows
  ParamVector bad = q;
  bad.range = 0.7 * q.range;
  const StriationGrid off = build_striation_grid(surf, bad, part, 30);
  double matched = 0.0, mismatched = 0.0;
  for (std::size_t l = 0; l < std::min(grid.n_striations(), off.n_striations()); ++l) {
    matched += row_cov(grid.broadband, l);
    mismatched += row_cov(off.broadband, l);
  }
  CHECK(mismatched > 100.0 * matched);
}

TEST_CASE("beta = 1 with constant rate equals a direct shear-sampling oracle") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  const std::size_t nk = 9, nn = 40;
  spec.freqs.resize(nk);
  for (std::size_t k = 0; k < nk; ++k) spec.freqs[k] = 40.0 + 0.5 * static_cast<double>(k);
  spec.times.resize(nn);
  for (std::size_t n = 0; n < nn; ++n) spec.times[n] = 10.0 * static_cast<double>(n);
  spec.values = Matrix<double>(nn, nk);
  for (auto& v : spec.values.data) v = u(rng);

  const BandPartition part = partition_band(spec.freqs, {}, 0.0);
  ParamVector q;
  q.range = 20000.0;
  q.rate = RateProfile::constant_rate(8.0);
  q.beta = 1.0;
  const StriationGrid grid = build_striation_grid(spec, q, part, 1);

  const double r0 = 20000.0 - 8.0 * spec.times.back();
  const double dr = 80.0;
  const double f_ref = grid.ref_freq;
  for (std::size_t l = 0; l < grid.n_striations(); ++l) {
    for (std::size_t j = 0; j < nk; ++j) {
      const double target = grid.ref_ranges[l] * spec.freqs[j] / f_ref;  // shear line
      const double pos = (target - r0) / dr;
      const auto i0 = std::min(static_cast<std::size_t>(std::floor(pos)), nn - 2);
      const double w = pos - static_cast<double>(i0);
      const double oracle = spec.values.at(i0, j) * (1.0 - w) + spec.values.at(i0 + 1, j) * w;
      CHECK(grid.broadband.at(l, j) == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("grid construction ignores uniform time shifts") {
  const Spectrogram surf = analytic_surface(1.18, 9842.0, 10.2, 60, 10.0, 42.0, 45.0, 0.05, 0.8);
  Spectrogram shifted = surf;
  for (double& t : shifted.times) t += 12345.0;
  const BandPartition part = partition_band(surf.freqs, {}, 0.0);
  ParamVector q;
  q.range = 9842.0 + 10.2 * 590.0;
  q.rate = RateProfile::constant_rate(10.2);
  q.beta = 1.18;
  const StriationGrid a = build_striation_grid(surf, q, part, 10);
  const StriationGrid b = build_striation_grid(shifted, q, part, 10);
  REQUIRE(a.n_striations() == b.n_striations());
  for (std::size_t i = 0; i < a.broadband.data.size(); ++i)
    CHECK(a.broadband.data[i] == b.broadband.data[i]);
}

TEST_CASE("too few striations is reported as a window problem") {
  const Spectrogram surf = analytic_surface(1.18, 9842.0, 10.2, 20, 10.0, 42.0, 49.0, 0.05, 0.8);
  const BandPartition part = partition_band(surf.freqs, {}, 0.0);
  ParamVector q;
  q.range = 9842.0 + 10.2 * 190.0;
  q.rate = RateProfile::constant_rate(10.2);
  q.beta = 1.18;
  CHECK_THROWS_WITH_AS(build_striation_grid(surf, q, part, 1000),
                       "build_striation_grid: window too short for candidate range",
                       std::runtime_error);
}

TEST_CASE("inbound tracks are supported and rows stay ordered by reference range") {
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  spec.freqs = {42.0, 42.5, 43.0};
  spec.times.resize(50);
  for (std::size_t n = 0; n < 50; ++n) spec.times[n] = 10.0 * static_cast<double>(n);
  spec.values = Matrix<double>(50, 3, 1.0);
  const BandPartition part = partition_band(spec.freqs, {}, 0.0);
  ParamVector q;
  q.range = 9000.0;
  q.rate = RateProfile::constant_rate(-10.0);  // closing geometry
  q.beta = 1.0;
  const StriationGrid grid = build_striation_grid(spec, q, part, 5);
  CHECK(grid.n_striations() >= 5);
  for (std::size_t l = 1; l < grid.n_striations(); ++l)
    CHECK(grid.ref_ranges[l] > grid.ref_ranges[l - 1]);
}

TEST_CASE("slice_band keeps exactly the bins inside the band") {
  Spectrogram spec;
  spec.kind = SpecKind::intensity;
  spec.freqs.resize(100);
  for (std::size_t k = 0; k < 100; ++k) spec.freqs[k] = 0.5 * static_cast<double>(k);
  spec.times = {0.0, 1.0};
  spec.values = Matrix<double>(2, 100, 1.0);
  const Spectrogram cut = slice_band(spec, 10.0, 20.0);
  CHECK(cut.freqs.front() == 10.0);
  CHECK(cut.freqs.back() == 20.0);
  CHECK(cut.n_freqs() == 21);
}

}  // TEST_SUITE
