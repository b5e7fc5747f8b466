#pragma once

#include <array>
#include <optional>

#include "excires/spectral.hpp"

namespace excires {

enum class TauModel { constant, quadratic };

// Phase accumulated between the forward-emitted donor packet and the
// backward-propagated acceptor packet.  Sign convention:
//   theta(omega; t0) = (t0 - tau(omega)) (omega - omega0)
//                      - 2 arctan((omega - omega0)/gamma),
// chosen so that for constant tau the optimal arrival time is
// t0 = tau + 1/gamma with probability 4/e^2.
// Times are in reciprocal cm^-1 (hbar = 1); conversion to picoseconds
// happens only at I/O boundaries.
struct PhaseModel {
  double resonance_frequency = 0.0;  // omega0 (cm^-1)
  double width = 1.0;                // gamma (cm^-1), > 0
  TauModel tau_model = TauModel::constant;
  double tau0 = 0.0;   // tau (constant) or tau_0 (quadratic vertex)
  double kappa = 0.0;  // quadratic coefficient, time/(cm^-1)^2
  double arrival_time = 0.0;  // t0
};

double phase(const PhaseModel& model, double omega);

// P_12 = |int_window e^{i theta(omega; t0)} sqrt(f1 f2) domega|^2.
// Evaluated by composite trapezoid on a deterministic uniform grid spaced
// about width/200 (clamped to [20001, 400001] points): the cubic phase of
// quadratic tau-models oscillates ~1e5 times across a wide window, which
// defeats worst-interval adaptive subdivision, while the grid spacing
// resolves every oscillation whose amplitude is above rounding noise.
double transfer_probability(const DensityView& f1, const DensityView& f2,
                            const PhaseModel& model);

struct ArrivalResult {
  double arrival_time = 0.0;
  double probability = 0.0;
  double kappa = 0.0;  // echoed for constant tau, optimized for quadratic
  int evaluations = 0;
};

struct KappaRange {
  double lower = 0.0;
  double upper = 0.0;
};

// Maximizes P_12 over the arrival time t0 by golden-section search
// (tolerance 1e-4/gamma) on `t0_bracket`, defaulting to
// [tau0 - 10/gamma, tau0 + 10/gamma].  For quadratic tau models a kappa
// range is required and (kappa, t0) are optimized jointly: a coarse kappa
// scan on a clipped +-12 gamma window locates the basin, then golden
// refinement re-evaluates on the full window.
ArrivalResult optimize_arrival(const DensityView& f1, const DensityView& f2,
                               PhaseModel model,
                               std::optional<KappaRange> kappa_range = {},
                               std::optional<std::array<double, 2>> t0_bracket = {});

// p = F x (P_12 / F), the single-shot transfer probability.
double single_shot_probability(double overlap, double phase_factor);

// Bouncing-exciton model: per-shot sink-dissipation probability p, per-flight
// recombination probability q.
struct BounceParameters {
  double p = 0.0;
  double q = 0.0;
};

// eta(n) = p(1-q) (1 - [(1-q)^2 (1-p)]^n) / (1 - (1-q)^2 (1-p));
// returns 0 at the removable singularity p = 0, q = 0.
double bounce_efficiency(const BounceParameters& bp, long n);

struct AsymptoticEfficiency {
  double exact = 0.0;             // p(1-q) / (1 - (1-q)^2 (1-p))
  double first_order_in_q = 0.0;  // 1 - q (1 + 2(1-p)/p)
};

// Exact n -> infinity limit plus the first-order-in-q comparison value.
// Throws DomainError for p = 0 (no dissipation channel).
AsymptoticEfficiency asymptotic_efficiency(const BounceParameters& bp);

}  // namespace excires
