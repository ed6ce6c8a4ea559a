#include "doctest.h"

#include <cmath>
#include <set>

#include "wirange/rng.hpp"

using namespace wirange;

TEST_SUITE("rng") {

TEST_CASE("draws are reproducible and keyed") {
  CounterRng a(stream_key(7, 1, 2, 3));
  CounterRng b(stream_key(7, 1, 2, 3));
  CounterRng c(stream_key(7, 1, 2, 4));
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
  }
}

TEST_CASE("unit draws stay in [0,1) and are roughly uniform") {
  CounterRng rng(stream_key(11, 0, 0, 0));
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(var - 1.0 / 12.0) < 3e-3);
}

TEST_CASE("complex gaussian has the requested variance split evenly") {
  CounterRng rng(stream_key(3, 5, 9, 1));
  const int n = 100000;
  const double target = 6.25;
  double p = 0.0, re2 = 0.0, im2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.next_complex_gaussian(target);
    p += std::norm(z);
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
  }
  // E|z|^2 = target; |z|^2 is Exp(target) with std = target.
  CHECK(std::abs(p / n - target) < 3.0 * target / std::sqrt(double(n)));
  CHECK(std::abs(re2 / n - target / 2) < 3.0 * target / std::sqrt(double(n)));
  CHECK(std::abs(im2 / n - target / 2) < 3.0 * target / std::sqrt(double(n)));
}

}  // TEST_SUITE
