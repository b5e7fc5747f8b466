#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "excires/network.hpp"

namespace excires {

// Per-site view of the bath: coupling weights |<alpha|g_j>|^2, eigenstate
// energies and decoherence rates, and the site's bare frequency omega_j.
struct SpectralProfile {
  int owner = 0;  // 1 = donor, 2 = acceptor
  std::vector<double> weights;
  std::vector<double> energies;
  std::vector<double> rates;
  double bare_frequency = 0.0;
};

SpectralProfile donor_profile(const SystemPartition& part, const BathSpectrum& bath);
SpectralProfile acceptor_profile(const SystemPartition& part, const BathSpectrum& bath);

// gamma_j(omega) = sum_a w_a Gamma_a / ((omega - eps_a)^2 + Gamma_a^2)
double decay_rate(const SpectralProfile& p, double omega);

// delta_j(omega) = sum_a w_a (omega - eps_a) / ((omega - eps_a)^2 + Gamma_a^2)
double energy_shift(const SpectralProfile& p, double omega);

// G_jj(t) = sum_a w_a e^{-i eps_a t} e^{-Gamma_a t};  t >= 0.
std::complex<double> correlation_function(const SpectralProfile& p, double t);

// Raw (un-normalized) emission density
// f_j(omega) = (1/pi) gamma_j / ((omega - omega_j - delta_j)^2 + gamma_j^2).
double spectral_density(const SpectralProfile& p, double omega);

struct QuadratureWindow {
  double lower = 0.0;
  double upper = 0.0;
  double absolute_tolerance = 1e-9;
};

// Default integration window: [min eps - 20 max Gamma, max eps + 20 max Gamma].
QuadratureWindow default_window(const SpectralProfile& p);
QuadratureWindow default_window(const SpectralProfile& a, const SpectralProfile& b);

struct RootDiagnostics {
  std::vector<double> all_roots;  // every root found in the scan bracket
  int iterations = 0;
  double residual = 0.0;
  bool fixed_point_converged = false;
};

// Solves the self-consistent equation omega = omega_j + delta_j(omega) by
// damped fixed-point iteration (damping 0.5), falling back to a sign-change
// scan plus bisection over the window.  Among multiple roots the one nearest
// the bare omega_j is returned; the full list lands in `diag`.
// Throws ConvergenceError when no root lies in the window.
double renormalized_frequency(const SpectralProfile& p,
                              std::optional<QuadratureWindow> window = {},
                              RootDiagnostics* diag = nullptr);

// (omega_j^r, gamma_j(omega_j^r)) — the Lorentzian-approximation parameters.
std::pair<double, double> lorentzian_parameters(
    const SpectralProfile& p, std::optional<QuadratureWindow> window = {});

// A normalized density evaluator over a window: callable, integrates to 1.
// `seeds` lists sharp-feature locations inside the window for downstream
// quadrature (eigenstate energies plus the renormalized peak).
struct DensityView {
  std::function<double(double)> value;
  QuadratureWindow window;
  std::vector<double> seeds;
};

class NormalizedDensity {
 public:
  double operator()(double omega) const;
  const SpectralProfile& profile() const { return profile_; }
  const QuadratureWindow& window() const { return window_; }
  double normalization() const { return normalization_; }
  const std::vector<double>& seeds() const { return seeds_; }
  DensityView view() const;

 private:
  friend NormalizedDensity normalize_density(const SpectralProfile&,
                                             const QuadratureWindow&,
                                             std::vector<double>);
  SpectralProfile profile_;
  QuadratureWindow window_;
  double normalization_ = 1.0;  // Z = integral of the raw density
  std::vector<double> seeds_;
};

// Computes Z = int_window f_j and returns the evaluator f_j / Z.  Throws
// DomainError when the integral vanishes and ConvergenceError when the
// quadrature cannot reach tolerance.
NormalizedDensity normalize_density(const SpectralProfile& p,
                                    const QuadratureWindow& window,
                                    std::vector<double> extra_seeds = {});

// F = [int_window sqrt(f1 f2) domega]^2 for normalized densities on the
// same window.  Overshoots above 1 within 1e-6 are clamped to 1; larger
// overshoots throw ConvergenceError.
double overlap_efficiency(const DensityView& f1, const DensityView& f2);

struct ResonanceSummary {
  double renorm_donor = 0.0;
  double renorm_acceptor = 0.0;
  double width_donor = 0.0;
  double width_acceptor = 0.0;
  double resonance_frequency = 0.0;  // argmax of sqrt(f1 f2)
  double effective_width = 0.0;      // FWHM of sqrt(f1 f2) / 2
  double detuning = 0.0;             // |omega_1^r - omega_2^r|
};

// Aggregates the renormalized frequencies, widths, and the location/width of
// the sqrt(f1 f2) resonance.  Throws DomainError for a flat product density.
ResonanceSummary resonance_summary(const NormalizedDensity& f1,
                                   const NormalizedDensity& f2);

}  // namespace excires
