#include "wirange/rng.hpp"

#include <cmath>

namespace wirange {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ (a + 0x9E3779B97F4A7C15ULL));
  h = mix64(h ^ (b + 0xC2B2AE3D27D4EB4FULL));
  h = mix64(h ^ (c + 0x165667B19E3779F9ULL));
  return h;
}

std::uint64_t CounterRng::next_u64() {
  return mix64(key_ ^ (counter_++ * 0xD6E8FEB86659FD93ULL));
}

double CounterRng::next_unit() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_unit_open() {
  return 1.0 - next_unit();
}

void CounterRng::next_gaussian_pair(double& g0, double& g1) {
  const double u1 = next_unit_open();
  const double u2 = next_unit();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  constexpr double two_pi = 6.283185307179586476925286766559;
  g0 = rad * std::cos(two_pi * u2);
  g1 = rad * std::sin(two_pi * u2);
}

std::complex<double> CounterRng::next_complex_gaussian(double variance) {
  double g0, g1;
  next_gaussian_pair(g0, g1);
  const double s = std::sqrt(variance * 0.5);
  return {s * g0, s * g1};
}

}  // namespace wirange
