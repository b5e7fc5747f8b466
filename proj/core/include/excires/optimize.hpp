#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "excires/network.hpp"

namespace excires {

// Free-parameter vector layout, shared by the sampler, the objective, and
// all search records:
//   [0..4] Gamma_3 .. Gamma_7  (non-sink bath eigenstate rates)
//   [5]    Gamma_8             (sink rate)
//   [6]    omega_8             (sink energy)
//   [7]    h_28                (acceptor-sink coupling)
inline constexpr int kParamCount = 8;
using ParameterVector = std::array<double, kParamCount>;

struct ParameterBounds {
  std::array<double, 2> omega8_range{-500.0, 0.0};
  std::array<double, 2> gamma_range{50.0, 90.0};  // applied to each Gamma
  std::array<double, 2> h28_range{0.0, 600.0};
};

// Per-coordinate [lower, upper] in the ParameterVector layout.
std::array<std::array<double, 2>, kParamCount> coordinate_bounds(
    const ParameterBounds& bounds);

struct SearchRecord {
  ParameterVector parameters{};
  double objective = 0.0;
  std::uint64_t seed = 0;
  long evaluations = 0;
  std::string provenance;  // "sampled" | "refined"
  // Coordinates of `parameters` sitting on a bound (within 1e-9 of the
  // coordinate range) — reported rather than guessed away.
  std::vector<int> boundary_contacts;
};

// Uniform independent draw per coordinate; [a, a] intervals yield exactly a.
ParameterVector sample_parameters(const ParameterBounds& bounds,
                                  std::mt19937_64& rng);

// Full pipeline: partition -> diagonalize -> profiles -> normalize ->
// overlap.  Pure and deterministic; numerical failures propagate as
// exceptions (never silent zeros).
double evaluate_objective(const ExcitonNetwork& net,
                          const ParameterVector& params);

struct EvaluationRow {
  long index = -1;
  ParameterVector parameters{};
  double objective = 0.0;  // NaN for failed evaluations
  bool ok = false;
};

struct SearchResult {
  SearchRecord best;
  std::vector<SearchRecord> top;  // best-first, up to top_k
  long failed_evaluations = 0;
  std::vector<EvaluationRow> evaluations;  // in index order
};

// Best-of-budget under uniform sampling.  The PRNG stream is split
// deterministically per evaluation index (one generator seeded from
// {seed, index} per draw), and the reduction is a keyed argmax on
// (objective, -index), so results are bit-identical for any worker count.
// Failed evaluations are skipped and counted, never scored as zero.
// Throws ConvergenceError if every evaluation failed.
SearchResult random_search(const ExcitonNetwork& net,
                           const ParameterBounds& bounds, long budget,
                           std::uint64_t seed, int workers = 1,
                           int top_k = 10);

// Derivative-free simplex descent on -F with box projection.  Terminates
// when the per-coordinate scaled simplex diameter drops below 1e-3 or after
// 2000 evaluations; a degenerate simplex restarts once with jitter.  Never
// returns a worse objective than the start.
SearchRecord refine_local(const ExcitonNetwork& net,
                          const ParameterVector& start,
                          const ParameterBounds& bounds);

struct SweepResult {
  std::vector<double> h28_grid;
  std::vector<double> omega8_grid;
  std::vector<double> values;  // row-major: [i_h28 * omega8_grid.size() + j]
  std::vector<char> ok;        // per-cell success flag
};

// F over the (h28, omega8) grid at fixed Gamma values.  All cells share one
// window (covering the most negative omega8 in the grid) so the donor side
// is computed once and is identical across cells.
SweepResult grid_sweep(const ExcitonNetwork& net,
                       std::span<const double> h28_grid,
                       std::span<const double> omega8_grid,
                       const std::array<double, 6>& gamma_values);

// Temperature model: all six bath-eigenstate rates (sink included) scale as
// Gamma_k(T) = Gamma_k(T0) * (T / T0).
struct TemperatureModel {
  double reference_temperature = 77.0;  // T0, Kelvin
  std::array<double, 6> reference_rates{};
};

std::array<double, 6> rates_at(const TemperatureModel& model, double temperature);

// F(T) over a temperature grid; `params_at_t0` supplies the rates at T0
// plus the (fixed) sink energy and coupling.  Throws DomainError for T <= 0.
std::vector<std::pair<double, double>> temperature_sweep(
    const ExcitonNetwork& net, const ParameterVector& params_at_t0,
    std::span<const double> temperature_grid, double reference_temperature = 77.0);

}  // namespace excires
