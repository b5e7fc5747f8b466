#pragma once

#include <functional>
#include <span>

namespace excires {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double absolute_tolerance = 1e-9;
  // Cap on adaptive subdivisions; 15 integrand evaluations per interval.
  int max_intervals = 4000;
};

// Adaptive Gauss-Kronrod 7-15 integration of f over [a, b].
//
// `interior_points` pre-seeds the subdivision at known sharp features
// (Lorentzian peak centers); points outside (a, b) are ignored.  The
// refinement always splits the interval with the largest error estimate
// (ties broken towards the leftmost interval) and the final reduction sums
// contributions in left-to-right interval order, so results are
// deterministic and run-to-run identical.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opt = {},
                           std::span<const double> interior_points = {});

}  // namespace excires
