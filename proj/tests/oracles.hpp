#pragma once

// Test-only numeric oracles, independent of the library implementations they
// check.

#include <cmath>
#include <functional>

namespace oracles {

// Adaptive Simpson quadrature.
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_step(f, a, m, fa, flm, fm);
  const double right = simpson_step(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int depth = 40) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson_step(f, a, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// ln I0(a) through the integral representation
// I0(a) = (1/pi) int_0^pi exp(a cos t) dt, evaluated in log space.
inline double ln_i0_integral(double a) {
  const auto g = [a](double t) { return std::exp(a * (std::cos(t) - 1.0)); };
  const double val = integrate(g, 0.0, 3.14159265358979323846, 1e-14, 48);
  return a + std::log(val / 3.14159265358979323846);
}

}  // namespace oracles
