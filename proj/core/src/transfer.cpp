#include "excires/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "excires/errors.hpp"

namespace excires {
namespace {

constexpr double kGolden = 0.6180339887498949;

void check_model(const PhaseModel& model) {
  if (!(model.width > 0.0)) throw ParameterError("phase model width must be positive");
  if (!std::isfinite(model.resonance_frequency) || !std::isfinite(model.tau0) ||
      !std::isfinite(model.kappa) || !std::isfinite(model.arrival_time)) {
    throw ParameterError("phase model parameters must be finite");
  }
}

// Amplitude sqrt(f1 f2) sampled once on a uniform grid; the phase pass reuses
// the samples for every (kappa, t0) the optimizer tries.
struct AmplitudeGrid {
  std::vector<double> amplitude;  // sqrt(f1 f2) * trapezoid weight
  std::vector<double> offset;     // omega - omega0
  std::vector<double> chirp;      // 2 arctan((omega - omega0)/gamma)
};

int grid_points(double lower, double upper, double width) {
  const double wanted = (upper - lower) / width * 200.0;
  const double clamped = std::clamp(wanted, 20000.0, 400000.0);
  return static_cast<int>(std::lround(clamped)) + 1;
}

AmplitudeGrid sample_amplitude(const DensityView& f1, const DensityView& f2,
                               const PhaseModel& model, double lower,
                               double upper) {
  const int n = grid_points(lower, upper, model.width);
  const double h = (upper - lower) / (n - 1);
  AmplitudeGrid grid;
  grid.amplitude.resize(n);
  grid.offset.resize(n);
  grid.chirp.resize(n);
  for (int i = 0; i < n; ++i) {
    const double omega = lower + i * h;
    const double trap = (i == 0 || i == n - 1) ? 0.5 * h : h;
    grid.amplitude[i] = std::sqrt(f1.value(omega) * f2.value(omega)) * trap;
    grid.offset[i] = omega - model.resonance_frequency;
    grid.chirp[i] = 2.0 * std::atan(grid.offset[i] / model.width);
  }
  return grid;
}

// |sum_i A_i e^{i theta_i}|^2 with theta = (t0 - tau(omega))(omega - omega0)
// - 2 arctan((omega - omega0)/gamma) and tau either constant or quadratic.
double grid_probability(const AmplitudeGrid& grid, const PhaseModel& model,
                        double arrival_time, double kappa) {
  const bool quadratic = model.tau_model == TauModel::quadratic;
  double re = 0.0;
  double im = 0.0;
  const std::size_t n = grid.amplitude.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = grid.offset[i];
    const double tau = quadratic ? model.tau0 + kappa * d * d : model.tau0;
    const double theta = (arrival_time - tau) * d - grid.chirp[i];
    re += grid.amplitude[i] * std::cos(theta);
    im += grid.amplitude[i] * std::sin(theta);
  }
  return re * re + im * im;
}

struct ScalarOptimum {
  double argument = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

// Golden-section maximization of `f` on [lo, hi] to interval width `tol`.
template <typename F>
ScalarOptimum golden_max(F&& f, double lo, double hi, double tol) {
  ScalarOptimum out;
  double c1 = hi - kGolden * (hi - lo);
  double c2 = lo + kGolden * (hi - lo);
  double v1 = f(c1);
  double v2 = f(c2);
  out.evaluations = 2;
  while (hi - lo > tol) {
    if (v1 < v2) {
      lo = c1;
      c1 = c2;
      v1 = v2;
      c2 = lo + kGolden * (hi - lo);
      v2 = f(c2);
    } else {
      hi = c2;
      c2 = c1;
      v2 = v1;
      c1 = hi - kGolden * (hi - lo);
      v1 = f(c1);
    }
    ++out.evaluations;
  }
  out.argument = 0.5 * (lo + hi);
  out.value = f(out.argument);
  ++out.evaluations;
  return out;
}

void check_same_window(const DensityView& f1, const DensityView& f2) {
  if (f1.window.lower != f2.window.lower || f1.window.upper != f2.window.upper) {
    throw ParameterError("transfer requires both densities on the same window");
  }
  if (!(f1.window.lower < f1.window.upper)) {
    throw ParameterError("transfer window must satisfy lower < upper");
  }
}

}  // namespace

double phase(const PhaseModel& model, double omega) {
  check_model(model);
  const double d = omega - model.resonance_frequency;
  const double tau = model.tau_model == TauModel::quadratic
                         ? model.tau0 + model.kappa * d * d
                         : model.tau0;
  return (model.arrival_time - tau) * d - 2.0 * std::atan(d / model.width);
}

double transfer_probability(const DensityView& f1, const DensityView& f2,
                            const PhaseModel& model) {
  check_model(model);
  check_same_window(f1, f2);
  const AmplitudeGrid grid =
      sample_amplitude(f1, f2, model, f1.window.lower, f1.window.upper);
  return grid_probability(grid, model, model.arrival_time, model.kappa);
}

ArrivalResult optimize_arrival(const DensityView& f1, const DensityView& f2,
                               PhaseModel model,
                               std::optional<KappaRange> kappa_range,
                               std::optional<std::array<double, 2>> t0_bracket) {
  check_model(model);
  check_same_window(f1, f2);

  const double gamma = model.width;
  double t_lo = model.tau0 - 10.0 / gamma;
  double t_hi = model.tau0 + 10.0 / gamma;
  if (t0_bracket) {
    if (!((*t0_bracket)[0] < (*t0_bracket)[1])) {
      throw ParameterError("arrival-time bracket must satisfy lower < upper");
    }
    t_lo = (*t0_bracket)[0];
    t_hi = (*t0_bracket)[1];
  }
  const double t_tol = 1e-4 / gamma;

  const AmplitudeGrid full =
      sample_amplitude(f1, f2, model, f1.window.lower, f1.window.upper);

  ArrivalResult out;
  if (model.tau_model == TauModel::constant) {
    const ScalarOptimum best = golden_max(
        [&](double t0) { return grid_probability(full, model, t0, 0.0); }, t_lo,
        t_hi, t_tol);
    out.arrival_time = best.argument;
    out.probability = best.value;
    out.kappa = model.kappa;
    out.evaluations = best.evaluations;
    return out;
  }

  if (!kappa_range) {
    throw ParameterError("quadratic tau-model needs a kappa range to optimize over");
  }
  if (!(kappa_range->lower <= kappa_range->upper)) {
    throw ParameterError("kappa range must satisfy lower <= upper");
  }

  // Stage 1: coarse kappa grid, each point scored by a t0 line search on a
  // window clipped to +-12 gamma around the resonance.  The clipped grid keeps
  // the scan cheap; truncation rescales every score by a common factor, so the
  // ranking matches the full-window objective.
  const double clip_lo =
      std::max(f1.window.lower, model.resonance_frequency - 12.0 * gamma);
  const double clip_hi =
      std::min(f1.window.upper, model.resonance_frequency + 12.0 * gamma);
  if (!(clip_lo < clip_hi)) {
    throw ParameterError("transfer window does not overlap the resonance region");
  }
  const AmplitudeGrid clipped = sample_amplitude(f1, f2, model, clip_lo, clip_hi);

  constexpr int kKappaPoints = 101;
  const double k_step =
      kappa_range->upper > kappa_range->lower
          ? (kappa_range->upper - kappa_range->lower) / (kKappaPoints - 1)
          : 0.0;
  int evaluations = 0;
  int best_index = 0;
  double best_score = -1.0;
  const int coarse_points = k_step > 0.0 ? kKappaPoints : 1;
  for (int i = 0; i < coarse_points; ++i) {
    const double kappa = kappa_range->lower + i * k_step;
    const ScalarOptimum line = golden_max(
        [&](double t0) { return grid_probability(clipped, model, t0, kappa); },
        t_lo, t_hi, t_tol);
    evaluations += line.evaluations;
    if (line.value > best_score) {
      best_score = line.value;
      best_index = i;
    }
  }

  // Stage 2: golden refinement of kappa between the coarse winner's
  // neighbors, scoring each candidate on the full window.  The basin can be
  // narrower than the coarse step, so the bracket spans both neighbors.
  const double k_lo = std::max(kappa_range->lower,
                               kappa_range->lower + (best_index - 1) * k_step);
  const double k_hi = std::min(kappa_range->upper,
                               kappa_range->lower + (best_index + 1) * k_step);
  double best_t0 = model.tau0;
  const auto strict_line = [&](double kappa) {
    const ScalarOptimum line = golden_max(
        [&](double t0) { return grid_probability(full, model, t0, kappa); },
        t_lo, t_hi, t_tol);
    evaluations += line.evaluations;
    best_t0 = line.argument;
    return line.value;
  };

  if (k_hi > k_lo) {
    const double k_tol =
        std::max(1e-12, 1e-6 * (kappa_range->upper - kappa_range->lower));
    const ScalarOptimum refined = golden_max(strict_line, k_lo, k_hi, k_tol);
    out.kappa = refined.argument;
    out.probability = refined.value;
  } else {
    out.kappa = kappa_range->lower;
    out.probability = strict_line(out.kappa);
  }
  out.arrival_time = best_t0;
  out.evaluations = evaluations;
  return out;
}

double single_shot_probability(double overlap, double phase_factor) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw ParameterError("overlap must lie in [0, 1]");
  }
  if (!(phase_factor >= 0.0 && phase_factor <= 1.0)) {
    throw ParameterError("phase factor must lie in [0, 1]");
  }
  return overlap * phase_factor;
}

double bounce_efficiency(const BounceParameters& bp, long n) {
  if (!(bp.p >= 0.0 && bp.p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
  if (!(bp.q >= 0.0 && bp.q <= 1.0)) throw ParameterError("q must lie in [0, 1]");
  if (n < 0) throw ParameterError("shot count must be nonnegative");
  const double survive = (1.0 - bp.q) * (1.0 - bp.q) * (1.0 - bp.p);
  if (survive >= 1.0) return 0.0;  // p = q = 0: nothing ever dissipates
  return bp.p * (1.0 - bp.q) * (1.0 - std::pow(survive, static_cast<double>(n))) /
         (1.0 - survive);
}

AsymptoticEfficiency asymptotic_efficiency(const BounceParameters& bp) {
  if (!(bp.p > 0.0 && bp.p <= 1.0)) {
    throw DomainError("asymptotic efficiency needs a dissipation channel (p > 0)");
  }
  if (!(bp.q >= 0.0 && bp.q <= 1.0)) throw ParameterError("q must lie in [0, 1]");
  const double survive = (1.0 - bp.q) * (1.0 - bp.q) * (1.0 - bp.p);
  AsymptoticEfficiency out;
  out.exact = bp.p * (1.0 - bp.q) / (1.0 - survive);
  out.first_order_in_q = 1.0 - bp.q * (1.0 + 2.0 * (1.0 - bp.p) / bp.p);
  return out;
}

}  // namespace excires
