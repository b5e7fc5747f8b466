#pragma once

#include <cmath>
#include <ostream>

// Absolute-tolerance companion to doctest::Approx, whose epsilon scales with
// the magnitudes being compared.  `value == Margin{target, tol}` holds when
// |value - target| <= tol, full stop.
struct Margin {
  double target = 0.0;
  double tolerance = 0.0;
};

inline bool operator==(double value, const Margin& m) {
  return std::abs(value - m.target) <= m.tolerance;
}
inline bool operator==(const Margin& m, double value) { return value == m; }
inline bool operator!=(double value, const Margin& m) { return !(value == m); }
inline bool operator!=(const Margin& m, double value) { return !(value == m); }

inline std::ostream& operator<<(std::ostream& os, const Margin& m) {
  return os << m.target << " +- " << m.tolerance;
}
