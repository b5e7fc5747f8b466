#include "excires/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "excires/errors.hpp"
#include "excires/quadrature.hpp"

namespace excires {
namespace {

SpectralProfile profile_from(const SystemPartition& part, const BathSpectrum& bath,
                             int owner) {
  SpectralProfile p;
  p.owner = owner;
  p.bare_frequency = owner == 1 ? part.donor_energy : part.acceptor_energy;
  const Eigen::VectorXd& w =
      owner == 1 ? bath.weights_donor : bath.weights_acceptor;
  const int n = static_cast<int>(bath.eigenvalues.size());
  p.weights.assign(w.data(), w.data() + n);
  p.energies.assign(bath.eigenvalues.data(), bath.eigenvalues.data() + n);
  p.rates.assign(bath.rates.data(), bath.rates.data() + n);
  return p;
}

void check_profile(const SpectralProfile& p) {
  if (p.weights.size() != p.energies.size() || p.weights.size() != p.rates.size()) {
    throw ParameterError("spectral profile arrays must have equal length");
  }
  for (double g : p.rates) {
    if (!(g > 0.0)) throw ParameterError("spectral profile rates must be positive");
  }
  for (double w : p.weights) {
    if (w < 0.0) throw ParameterError("spectral profile weights must be nonnegative");
  }
}

// Self-consistency residual g(omega) = omega - omega_j - delta_j(omega).
double residual(const SpectralProfile& p, double omega) {
  return omega - p.bare_frequency - energy_shift(p, omega);
}

double bisect_root(const SpectralProfile& p, double lo, double hi) {
  double flo = residual(p, lo);
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = residual(p, mid);
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SpectralProfile donor_profile(const SystemPartition& part, const BathSpectrum& bath) {
  return profile_from(part, bath, 1);
}

SpectralProfile acceptor_profile(const SystemPartition& part, const BathSpectrum& bath) {
  return profile_from(part, bath, 2);
}

double decay_rate(const SpectralProfile& p, double omega) {
  double sum = 0.0;
  for (std::size_t a = 0; a < p.weights.size(); ++a) {
    const double d = omega - p.energies[a];
    sum += p.weights[a] * p.rates[a] / (d * d + p.rates[a] * p.rates[a]);
  }
  return sum;
}

double energy_shift(const SpectralProfile& p, double omega) {
  double sum = 0.0;
  for (std::size_t a = 0; a < p.weights.size(); ++a) {
    const double d = omega - p.energies[a];
    sum += p.weights[a] * d / (d * d + p.rates[a] * p.rates[a]);
  }
  return sum;
}

std::complex<double> correlation_function(const SpectralProfile& p, double t) {
  if (t < 0.0) throw DomainError("correlation function defined for t >= 0");
  std::complex<double> sum = 0.0;
  for (std::size_t a = 0; a < p.weights.size(); ++a) {
    sum += p.weights[a] * std::exp(-p.rates[a] * t) *
           std::complex<double>(std::cos(p.energies[a] * t),
                                -std::sin(p.energies[a] * t));
  }
  return sum;
}

double spectral_density(const SpectralProfile& p, double omega) {
  const double gamma = decay_rate(p, omega);
  const double delta = energy_shift(p, omega);
  const double d = omega - p.bare_frequency - delta;
  return gamma / M_PI / (d * d + gamma * gamma);
}

QuadratureWindow default_window(const SpectralProfile& p) {
  const double eps_min = *std::min_element(p.energies.begin(), p.energies.end());
  const double eps_max = *std::max_element(p.energies.begin(), p.energies.end());
  const double g_max = *std::max_element(p.rates.begin(), p.rates.end());
  return {eps_min - 20.0 * g_max, eps_max + 20.0 * g_max, 1e-9};
}

QuadratureWindow default_window(const SpectralProfile& a, const SpectralProfile& b) {
  const QuadratureWindow wa = default_window(a);
  const QuadratureWindow wb = default_window(b);
  return {std::min(wa.lower, wb.lower), std::max(wa.upper, wb.upper), 1e-9};
}

double renormalized_frequency(const SpectralProfile& p,
                              std::optional<QuadratureWindow> window,
                              RootDiagnostics* diag) {
  check_profile(p);
  const QuadratureWindow w = window ? *window : default_window(p);

  // Damped fixed-point iteration from the bare frequency.
  double x = p.bare_frequency;
  bool fp_converged = false;
  int iterations = 0;
  for (; iterations < 200; ++iterations) {
    const double next = x + 0.5 * (p.bare_frequency + energy_shift(p, x) - x);
    if (!std::isfinite(next)) break;
    x = next;
    if (std::abs(residual(p, x)) < 1e-10) {
      fp_converged = true;
      break;
    }
  }

  // Sign-change scan over the window: enumerates every root for the
  // diagnostics and guards against the iteration drifting to a far root.
  constexpr int kScanIntervals = 4096;
  std::vector<double> roots;
  const double step = (w.upper - w.lower) / kScanIntervals;
  double prev_omega = w.lower;
  double prev_g = residual(p, prev_omega);
  for (int i = 1; i <= kScanIntervals; ++i) {
    const double omega = w.lower + i * step;
    const double g = residual(p, omega);
    if (prev_g == 0.0) {
      roots.push_back(prev_omega);
    } else if ((g < 0.0) != (prev_g < 0.0)) {
      roots.push_back(bisect_root(p, prev_omega, omega));
    }
    prev_omega = omega;
    prev_g = g;
  }
  if (prev_g == 0.0) roots.push_back(prev_omega);

  if (diag) {
    diag->all_roots = roots;
    diag->iterations = iterations;
    diag->fixed_point_converged = fp_converged;
  }

  double best;
  if (!roots.empty()) {
    best = roots.front();
    for (double r : roots) {
      if (std::abs(r - p.bare_frequency) < std::abs(best - p.bare_frequency)) best = r;
    }
    // The fixed point refines the scan result when both landed on the same root.
    if (fp_converged && std::abs(x - best) <= 2.0 * step) best = x;
  } else if (fp_converged && x >= w.lower && x <= w.upper) {
    best = x;
  } else {
    std::ostringstream os;
    os << "no self-consistent frequency in [" << w.lower << ", " << w.upper
       << "]; fixed-point residual " << residual(p, x);
    throw ConvergenceError(os.str());
  }

  if (diag) diag->residual = residual(p, best);
  return best;
}

std::pair<double, double> lorentzian_parameters(const SpectralProfile& p,
                                                std::optional<QuadratureWindow> window) {
  const double root = renormalized_frequency(p, window);
  return {root, decay_rate(p, root)};
}

double NormalizedDensity::operator()(double omega) const {
  return spectral_density(profile_, omega) / normalization_;
}

DensityView NormalizedDensity::view() const {
  const SpectralProfile& p = profile_;
  const double z = normalization_;
  return {[p, z](double omega) { return spectral_density(p, omega) / z; },
          window_, seeds_};
}

NormalizedDensity normalize_density(const SpectralProfile& p,
                                    const QuadratureWindow& window,
                                    std::vector<double> extra_seeds) {
  check_profile(p);
  if (!(window.lower < window.upper)) {
    throw ParameterError("quadrature window must satisfy lower < upper");
  }

  NormalizedDensity density;
  density.profile_ = p;
  density.window_ = window;
  density.seeds_ = std::move(extra_seeds);
  for (double e : p.energies) density.seeds_.push_back(e);
  std::sort(density.seeds_.begin(), density.seeds_.end());
  density.seeds_.erase(
      std::unique(density.seeds_.begin(), density.seeds_.end()),
      density.seeds_.end());

  QuadratureOptions opt;
  opt.absolute_tolerance = window.absolute_tolerance;
  const QuadratureResult z = integrate(
      [&p](double omega) { return spectral_density(p, omega); }, window.lower,
      window.upper, opt, density.seeds_);
  if (!z.converged) {
    std::ostringstream os;
    os << "density normalization did not converge: achieved error "
       << z.error_estimate << " vs tolerance " << window.absolute_tolerance;
    throw ConvergenceError(os.str());
  }
  if (!(z.value > 0.0)) {
    throw DomainError("density integrates to zero over the window");
  }
  density.normalization_ = z.value;
  return density;
}

double overlap_efficiency(const DensityView& f1, const DensityView& f2) {
  if (f1.window.lower != f2.window.lower || f1.window.upper != f2.window.upper) {
    throw ParameterError("overlap requires both densities on the same window");
  }
  std::vector<double> seeds = f1.seeds;
  seeds.insert(seeds.end(), f2.seeds.begin(), f2.seeds.end());
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  QuadratureOptions opt;
  opt.absolute_tolerance = f1.window.absolute_tolerance;
  const QuadratureResult r = integrate(
      [&](double omega) { return std::sqrt(f1.value(omega) * f2.value(omega)); },
      f1.window.lower, f1.window.upper, opt, seeds);
  if (!r.converged) {
    std::ostringstream os;
    os << "overlap quadrature did not converge: achieved error " << r.error_estimate
       << " vs tolerance " << opt.absolute_tolerance;
    throw ConvergenceError(os.str());
  }

  double overlap = r.value * r.value;
  if (overlap > 1.0) {
    if (overlap <= 1.0 + 1e-6) {
      overlap = 1.0;
    } else {
      std::ostringstream os;
      os << "overlap " << overlap << " exceeds 1 beyond quadrature tolerance";
      throw ConvergenceError(os.str());
    }
  }
  return overlap;
}

ResonanceSummary resonance_summary(const NormalizedDensity& f1,
                                   const NormalizedDensity& f2) {
  const QuadratureWindow& w = f1.window();
  ResonanceSummary s;
  s.renorm_donor = renormalized_frequency(f1.profile(), w);
  s.renorm_acceptor = renormalized_frequency(f2.profile(), w);
  s.width_donor = decay_rate(f1.profile(), s.renorm_donor);
  s.width_acceptor = decay_rate(f2.profile(), s.renorm_acceptor);
  s.detuning = std::abs(s.renorm_donor - s.renorm_acceptor);

  const auto product = [&](double omega) {
    return std::sqrt(f1(omega) * f2(omega));
  };

  // Locate the peak of sqrt(f1 f2): coarse scan, then golden-section.
  constexpr int kScan = 4096;
  const double step = (w.upper - w.lower) / kScan;
  int best_i = 0;
  double best_v = -1.0;
  for (int i = 0; i <= kScan; ++i) {
    const double v = product(w.lower + i * step);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  double lo = w.lower + std::max(0, best_i - 1) * step;
  double hi = w.lower + std::min(kScan, best_i + 1) * step;
  constexpr double kGolden = 0.6180339887498949;
  while (hi - lo > 1e-8 * std::max(1.0, std::abs(hi))) {
    const double c1 = hi - kGolden * (hi - lo);
    const double c2 = lo + kGolden * (hi - lo);
    if (product(c1) < product(c2)) {
      lo = c1;
    } else {
      hi = c2;
    }
  }
  s.resonance_frequency = 0.5 * (lo + hi);
  const double peak = product(s.resonance_frequency);
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw DomainError("product density has no usable peak");
  }

  // Full width at half maximum, crossing refined by bisection on each side.
  const double half = 0.5 * peak;
  const auto crossing = [&](int direction) {
    double inner = s.resonance_frequency;
    double outer = inner;
    for (int i = 1; i <= 2 * kScan; ++i) {
      outer = s.resonance_frequency + direction * i * step;
      if (outer < w.lower || outer > w.upper) {
        throw DomainError("product density never falls to half maximum inside the window");
      }
      if (product(outer) < half) break;
      inner = outer;
    }
    if (product(outer) >= half) {
      throw DomainError("product density never falls to half maximum inside the window");
    }
    for (int i = 0; i < 100 && std::abs(outer - inner) > 1e-9 * std::max(1.0, std::abs(outer)); ++i) {
      const double mid = 0.5 * (inner + outer);
      if (product(mid) >= half) {
        inner = mid;
      } else {
        outer = mid;
      }
    }
    return 0.5 * (inner + outer);
  };
  const double right = crossing(+1);
  const double left = crossing(-1);
  s.effective_width = 0.5 * (right - left);
  return s;
}

}  // namespace excires
