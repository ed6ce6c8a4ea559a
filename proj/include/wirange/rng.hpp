#pragma once

#include <cstdint>
#include <complex>

namespace wirange {

// Counter-based RNG: every draw is a pure function of (key, counter), so
// cells of a synthetic spectrogram can be generated in any order, on any
// number of threads, with bit-identical results.
//
// The generator is a splitmix64-style finalizer applied to the keyed
// counter. Statistical quality is more than adequate for the Monte-Carlo
// tolerances used in this project.

std::uint64_t mix64(std::uint64_t x);

// Collapse a (seed, a, b, c) tuple into a stream key.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double next_unit();
  // Uniform in (0, 1]; safe as a log() argument.
  double next_unit_open();
  // Standard normal pair (Box-Muller).
  void next_gaussian_pair(double& g0, double& g1);
  // Circular complex Gaussian with E|z|^2 = variance.
  std::complex<double> next_complex_gaussian(double variance);

 private:
  std::uint64_t key_;
  std::uint64_t counter_{0};
};

}  // namespace wirange
