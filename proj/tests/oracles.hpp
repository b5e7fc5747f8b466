#pragma once

// Reference implementations used to cross-check the library.  Everything here
// is deliberately naive — fixed-grid composite rules, direct summation, and
// closed forms — and shares no code with the implementation under test.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

// Composite trapezoid on a uniform n-interval grid.
inline double trapezoid(const std::function<double(double)>& f, double a,
                        double b, int n) {
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h;
}

// Composite Simpson (n must be even).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline std::complex<double> trapezoid_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    int n) {
  const double h = (b - a) / n;
  std::complex<double> acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h;
}

inline std::complex<double> simpson_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    int n) {
  const double h = (b - a) / n;
  std::complex<double> acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Unit-mass Lorentzian centered at c with half-width g.
inline double lorentzian(double omega, double c, double g) {
  const double d = omega - c;
  return (g / M_PI) / (d * d + g * g);
}

// Mass of the unit Lorentzian inside [a, b].
inline double lorentzian_mass(double a, double b, double c, double g) {
  return (std::atan((b - c) / g) - std::atan((a - c) / g)) / M_PI;
}

// One-term bath sums evaluated directly.
inline double decay_rate_term(double w, double eps, double g, double omega) {
  const double d = omega - eps;
  return w * g / (d * d + g * g);
}

inline double energy_shift_term(double w, double eps, double g, double omega) {
  const double d = omega - eps;
  return w * d / (d * d + g * g);
}

// Round-trip capture probability accumulated shot by shot: each round is
// flight (survive 1-q), sink attempt (capture p), and — when not captured —
// the flight back (survive 1-q again).
inline double bounce_recurrence(double p, double q, long n) {
  double captured = 0.0;
  double alive = 1.0;
  for (long k = 0; k < n; ++k) {
    alive *= 1.0 - q;          // flight towards the acceptor
    captured += alive * p;     // sink attempt
    alive *= (1.0 - p) * (1.0 - q);  // miss, fly back
  }
  return captured;
}

// Matched-Lorentzian transfer probability for constant flight time on the
// infinite window, s = gamma (t0 - tau):  P(s) = 4 s^2 e^{-2s} for s >= 0,
// 0 otherwise (closed contour picks up no residue for s < 0).
inline double matched_lorentzian_probability(double s) {
  if (s <= 0.0) return 0.0;
  return 4.0 * s * s * std::exp(-2.0 * s);
}

}  // namespace oracle
