#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wirange {

using cplx = std::complex<double>;

// Row-major dense matrix, the workhorse container for spectrograms and
// striation grids.
template <typename T>
struct Matrix {
  std::vector<T> data;
  std::size_t rows{0};
  std::size_t cols{0};

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, T fill = T{}) : data(r * c, fill), rows(r), cols(c) {}

  T& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool empty() const { return data.empty(); }
};

// Raw pressure time series (microPa), uniformly sampled.
struct TimeSeries {
  std::vector<double> samples;
  double sample_rate{0.0};  // Hz
  double start_time{0.0};   // s

  void validate() const {
    if (samples.empty()) throw std::invalid_argument("TimeSeries: samples empty");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("TimeSeries: sample_rate must be > 0");
  }
};

enum class SpecKind { complex_amp, intensity };

inline std::string to_string(SpecKind k) {
  return k == SpecKind::complex_amp ? "complex" : "intensity";
}

// Spectrogram over (snapshot time, frequency). Holds either complex STFT
// amplitudes (one-sided, taper-power normalized so |z|^2 is a per-bin PSD in
// microPa^2/Hz) or nonnegative intensities |z|^2.
struct Spectrogram {
  SpecKind kind{SpecKind::intensity};
  Matrix<cplx> cvalues;     // used when kind == complex_amp
  Matrix<double> values;    // used when kind == intensity
  std::vector<double> freqs;  // K ascending bin centers, uniform spacing (Hz)
  std::vector<double> times;  // N ascending snapshot centers, uniform spacing (s)

  std::size_t n_times() const { return times.size(); }
  std::size_t n_freqs() const { return freqs.size(); }

  double freq_spacing() const {
    return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0;
  }
  double time_spacing() const {
    return times.size() > 1 ? times[1] - times[0] : 0.0;
  }

  double intensity_at(std::size_t n, std::size_t k) const {
    if (kind == SpecKind::intensity) return values.at(n, k);
    return std::norm(cvalues.at(n, k));
  }

  void validate() const;
};

// Partition of the processed frequency band into broadband-only bins and
// broadband+tonal bins. Bins inside the guard band around a tone belong to
// neither set and are excluded from inference.
struct BandPartition {
  double f_min{0.0};
  double f_max{0.0};
  double guard_hz{0.0};
  std::vector<double> tonal_freqs;        // J ascending tone centers (Hz)
  std::vector<std::size_t> tonal_bins;    // K^bt, indices into the freq axis
  std::vector<std::size_t> broadband_bins;  // K^b

  std::size_t n_tones() const { return tonal_bins.size(); }
};

// Range rate vs time: either a constant or a sampled piecewise-linear
// profile. Positive rates are outbound (range increasing).
struct RateProfile {
  bool constant{true};
  double rate{0.0};                // m/s when constant
  std::vector<double> times;       // sampled profile knots (s)
  std::vector<double> rates;       // m/s at the knots

  static RateProfile constant_rate(double r) {
    RateProfile p;
    p.constant = true;
    p.rate = r;
    return p;
  }
  static RateProfile sampled(std::vector<double> t, std::vector<double> r) {
    if (t.size() != r.size() || t.size() < 2)
      throw std::invalid_argument("RateProfile: need >= 2 matching knots");
    for (std::size_t i = 1; i < t.size(); ++i)
      if (!(t[i] > t[i - 1]))
        throw std::invalid_argument("RateProfile: knot times must be increasing");
    RateProfile p;
    p.constant = false;
    p.times = std::move(t);
    p.rates = std::move(r);
    return p;
  }

  // Linear interpolation, clamped to the end values outside the knots.
  double at(double t) const {
    if (constant) return rate;
    if (t <= times.front()) return rates.front();
    if (t >= times.back()) return rates.back();
    std::size_t hi = 1;
    while (times[hi] < t) ++hi;
    const double w = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
    return rates[hi - 1] * (1.0 - w) + rates[hi] * w;
  }

  // Exact integral of the piecewise-linear interpolant over [a, b], a <= b.
  double integrate(double a, double b) const {
    if (b < a) return -integrate(b, a);
    if (constant) return rate * (b - a);
    double acc = 0.0;
    double t_prev = a;
    double v_prev = at(a);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double tk = times[i];
      if (tk <= a) continue;
      if (tk >= b) break;
      acc += 0.5 * (v_prev + rates[i]) * (tk - t_prev);
      t_prev = tk;
      v_prev = rates[i];
    }
    acc += 0.5 * (v_prev + at(b)) * (b - t_prev);
    return acc;
  }
};

// Per-bin ambient-noise variance (sigma^u_k)^2, aligned with a spectrogram
// frequency axis.
struct NoiseProfile {
  std::vector<double> variance_per_bin;

  void validate() const {
    if (variance_per_bin.empty())
      throw std::invalid_argument("NoiseProfile: empty");
    for (double v : variance_per_bin)
      if (!(v > 0.0)) throw std::invalid_argument("NoiseProfile: variances must be > 0");
  }
};

inline void Spectrogram::validate() const {
  const auto check_axis = [](const std::vector<double>& a, const char* name) {
    for (std::size_t i = 1; i < a.size(); ++i)
      if (!(a[i] > a[i - 1]))
        throw std::invalid_argument(std::string("Spectrogram: ") + name +
                                    " must be strictly increasing");
  };
  check_axis(freqs, "freqs");
  check_axis(times, "times");
  if (kind == SpecKind::intensity) {
    if (values.rows != times.size() || values.cols != freqs.size())
      throw std::invalid_argument("Spectrogram: value shape mismatch");
    for (double v : values.data)
      if (v < 0.0) throw std::invalid_argument("Spectrogram: negative intensity");
  } else {
    if (cvalues.rows != times.size() || cvalues.cols != freqs.size())
      throw std::invalid_argument("Spectrogram: value shape mismatch");
  }
}

}  // namespace wirange
