#include "excires/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include "excires/errors.hpp"
#include "excires/spectral.hpp"

namespace excires {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double uniform01(std::mt19937_64& rng) {
  // 53 uniform mantissa bits in [0, 1); exact endpoints for degenerate ranges.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::mt19937_64 row_generator(std::uint64_t seed, long index) {
  const auto idx = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(idx),
                    static_cast<std::uint32_t>(idx >> 32)};
  return std::mt19937_64(seq);
}

std::vector<double> peak_seed(const SpectralProfile& p, const QuadratureWindow& w) {
  // The renormalized peak is the sharpest feature of the density; hand it to
  // the quadrature as a breakpoint.  A failed root search only costs the seed.
  try {
    return {renormalized_frequency(p, w)};
  } catch (const ConvergenceError&) {
    return {};
  }
}

double overlap_for(const SpectralProfile& f1, const SpectralProfile& f2,
                   const QuadratureWindow& w) {
  const NormalizedDensity d1 = normalize_density(f1, w, peak_seed(f1, w));
  const NormalizedDensity d2 = normalize_density(f2, w, peak_seed(f2, w));
  return overlap_efficiency(d1.view(), d2.view());
}

void check_network_arity(const ExcitonNetwork& net) {
  if (net.n_sites - 2 != 6) {
    throw ParameterError(
        "the 8-entry parameter vector addresses a six-state bath; network has " +
        std::to_string(net.n_sites - 2) + " bath states");
  }
}

std::vector<int> find_boundary_contacts(
    const ParameterVector& params,
    const std::array<std::array<double, 2>, kParamCount>& cb) {
  std::vector<int> out;
  for (int k = 0; k < kParamCount; ++k) {
    const double tol = 1e-9 * std::max(1.0, cb[k][1] - cb[k][0]);
    if (std::abs(params[k] - cb[k][0]) <= tol ||
        std::abs(params[k] - cb[k][1]) <= tol) {
      out.push_back(k);
    }
  }
  return out;
}

}  // namespace

std::array<std::array<double, 2>, kParamCount> coordinate_bounds(
    const ParameterBounds& bounds) {
  const auto ordered = [](const std::array<double, 2>& r, const char* name) {
    if (!(r[0] <= r[1]) || !std::isfinite(r[0]) || !std::isfinite(r[1])) {
      throw ParameterError(std::string(name) + " range must be finite with lower <= upper");
    }
  };
  ordered(bounds.gamma_range, "gamma");
  ordered(bounds.omega8_range, "omega8");
  ordered(bounds.h28_range, "h28");
  if (!(bounds.gamma_range[0] > 0.0)) {
    throw ParameterError("gamma range must be positive (rates are widths)");
  }
  std::array<std::array<double, 2>, kParamCount> cb;
  for (int k = 0; k < 6; ++k) cb[k] = bounds.gamma_range;
  cb[6] = bounds.omega8_range;
  cb[7] = bounds.h28_range;
  return cb;
}

ParameterVector sample_parameters(const ParameterBounds& bounds,
                                  std::mt19937_64& rng) {
  const auto cb = coordinate_bounds(bounds);
  ParameterVector params{};
  for (int k = 0; k < kParamCount; ++k) {
    params[k] = cb[k][0] + uniform01(rng) * (cb[k][1] - cb[k][0]);
  }
  return params;
}

double evaluate_objective(const ExcitonNetwork& net,
                          const ParameterVector& params) {
  check_network_arity(net);
  for (double v : params) {
    if (!std::isfinite(v)) throw ParameterError("parameter vector must be finite");
  }
  const SinkParameters sink{params[6], params[7], params[5]};
  const SystemPartition part = partition(net, sink);
  const std::vector<double> rates(params.begin(), params.begin() + 6);
  const BathSpectrum bath = diagonalize_bath(part, rates);
  const SpectralProfile f1 = donor_profile(part, bath);
  const SpectralProfile f2 = acceptor_profile(part, bath);
  return overlap_for(f1, f2, default_window(f1, f2));
}

SearchResult random_search(const ExcitonNetwork& net,
                           const ParameterBounds& bounds, long budget,
                           std::uint64_t seed, int workers, int top_k) {
  if (budget < 1) throw ParameterError("search budget must be at least 1");
  if (workers < 1) throw ParameterError("worker count must be at least 1");
  if (top_k < 1) throw ParameterError("top-k must be at least 1");
  check_network_arity(net);
  const auto cb = coordinate_bounds(bounds);

  std::vector<EvaluationRow> rows(static_cast<std::size_t>(budget));
  const auto run_range = [&](long begin, long end) {
    for (long i = begin; i < end; ++i) {
      EvaluationRow& row = rows[static_cast<std::size_t>(i)];
      row.index = i;
      std::mt19937_64 rng = row_generator(seed, i);
      row.parameters = sample_parameters(bounds, rng);
      try {
        row.objective = evaluate_objective(net, row.parameters);
        row.ok = true;
      } catch (const ConvergenceError&) {
        row.objective = kNaN;
      } catch (const DomainError&) {
        row.objective = kNaN;
      }
    }
  };

  const int used = static_cast<int>(std::min<long>(workers, budget));
  if (used <= 1) {
    run_range(0, budget);
  } else {
    // Contiguous chunks into preallocated disjoint slots; each row derives
    // its own generator from (seed, index), so the split cannot change
    // results relative to a serial run.
    const long chunk = (budget + used - 1) / used;
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < used; ++w) {
      const long begin = w * chunk;
      const long end = std::min<long>(budget, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] {
        try {
          run_range(begin, end);
        } catch (...) {
          const std::lock_guard<std::mutex> hold(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  SearchResult result;
  long best_index = -1;
  for (const EvaluationRow& row : rows) {
    if (!row.ok) {
      ++result.failed_evaluations;
      continue;
    }
    // Keyed argmax on (objective, -index): strict improvement wins, ties keep
    // the earliest index.  Order-independent, so worker count cannot matter.
    if (best_index < 0 || row.objective > rows[best_index].objective) {
      best_index = row.index;
    }
  }
  if (best_index < 0) {
    throw ConvergenceError("random search: every evaluation failed");
  }

  std::vector<long> ranked;
  ranked.reserve(rows.size());
  for (const EvaluationRow& row : rows) {
    if (row.ok) ranked.push_back(row.index);
  }
  std::sort(ranked.begin(), ranked.end(), [&](long a, long b) {
    const double fa = rows[a].objective;
    const double fb = rows[b].objective;
    if (fa != fb) return fa > fb;
    return a < b;
  });
  if (ranked.size() > static_cast<std::size_t>(top_k)) ranked.resize(top_k);

  const auto to_record = [&](long index) {
    SearchRecord rec;
    rec.parameters = rows[index].parameters;
    rec.objective = rows[index].objective;
    rec.seed = seed;
    rec.evaluations = budget;
    rec.provenance = "sampled";
    rec.boundary_contacts = find_boundary_contacts(rec.parameters, cb);
    return rec;
  };
  result.best = to_record(best_index);
  for (long idx : ranked) result.top.push_back(to_record(idx));
  result.evaluations = std::move(rows);
  return result;
}

SearchRecord refine_local(const ExcitonNetwork& net, const ParameterVector& start,
                          const ParameterBounds& bounds) {
  check_network_arity(net);
  const auto cb = coordinate_bounds(bounds);

  ParameterVector origin = start;
  for (int k = 0; k < kParamCount; ++k) {
    const double tol = 1e-9 * std::max(1.0, cb[k][1] - cb[k][0]);
    if (start[k] < cb[k][0] - tol || start[k] > cb[k][1] + tol) {
      throw ParameterError("refinement start lies outside the bounds at coordinate " +
                           std::to_string(k));
    }
    origin[k] = std::clamp(start[k], cb[k][0], cb[k][1]);
  }

  std::vector<int> free_coords;
  for (int k = 0; k < kParamCount; ++k) {
    if (cb[k][1] > cb[k][0]) free_coords.push_back(k);
  }

  long evaluations = 0;
  const auto embed = [&](const std::vector<double>& u) {
    ParameterVector x = origin;
    for (std::size_t d = 0; d < free_coords.size(); ++d) {
      const int k = free_coords[d];
      const double clipped = std::clamp(u[d], 0.0, 1.0);
      x[k] = cb[k][0] + clipped * (cb[k][1] - cb[k][0]);
    }
    return x;
  };
  const auto score = [&](const std::vector<double>& u) {
    ++evaluations;
    try {
      return evaluate_objective(net, embed(u));
    } catch (const ConvergenceError&) {
      return -std::numeric_limits<double>::infinity();
    } catch (const DomainError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  // The start must carry a real objective for the monotonicity guarantee;
  // failures here are the caller's problem, not a "worst value" to descend from.
  ++evaluations;
  const double start_value = evaluate_objective(net, origin);

  const std::size_t m = free_coords.size();
  SearchRecord out;
  out.provenance = "refined";
  if (m == 0) {
    out.parameters = origin;
    out.objective = start_value;
    out.evaluations = evaluations;
    out.boundary_contacts = find_boundary_contacts(origin, cb);
    return out;
  }

  std::vector<double> u0(m);
  for (std::size_t d = 0; d < m; ++d) {
    const int k = free_coords[d];
    u0[d] = (origin[k] - cb[k][0]) / (cb[k][1] - cb[k][0]);
  }

  constexpr long kMaxEvaluations = 2000;
  constexpr double kDiameterTol = 1e-3;
  std::vector<std::vector<double>> simplex;
  std::vector<double> values;

  const auto build_simplex = [&](const std::vector<double>& center, double step) {
    simplex.assign(1, center);
    for (std::size_t d = 0; d < m; ++d) {
      std::vector<double> v = center;
      v[d] += (v[d] + step <= 1.0) ? step : -step;
      simplex.push_back(std::move(v));
    }
    values.resize(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = score(simplex[i]);
  };

  const auto order_vertices = [&] {
    std::vector<std::size_t> perm(simplex.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (std::size_t i : perm) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };

  const auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        d = std::max(d, std::abs(simplex[i][k] - simplex[0][k]));
      }
    }
    return d;
  };

  const auto descend = [&] {
    while (evaluations < kMaxEvaluations) {
      order_vertices();
      if (diameter() < kDiameterTol) break;
      std::vector<double> centroid(m, 0.0);
      for (std::size_t i = 0; i + 1 < simplex.size(); ++i) {
        for (std::size_t k = 0; k < m; ++k) centroid[k] += simplex[i][k];
      }
      for (std::size_t k = 0; k < m; ++k) centroid[k] /= static_cast<double>(m);

      const std::vector<double>& worst = simplex.back();
      std::vector<double> reflected(m), candidate(m);
      for (std::size_t k = 0; k < m; ++k) {
        reflected[k] = std::clamp(2.0 * centroid[k] - worst[k], 0.0, 1.0);
      }
      const double fr = score(reflected);
      if (fr > values.front()) {
        for (std::size_t k = 0; k < m; ++k) {
          candidate[k] = std::clamp(3.0 * centroid[k] - 2.0 * worst[k], 0.0, 1.0);
        }
        const double fe = score(candidate);
        if (fe > fr) {
          simplex.back() = candidate;
          values.back() = fe;
        } else {
          simplex.back() = reflected;
          values.back() = fr;
        }
      } else if (fr > values[values.size() - 2]) {
        simplex.back() = reflected;
        values.back() = fr;
      } else {
        for (std::size_t k = 0; k < m; ++k) {
          candidate[k] = std::clamp(0.5 * (centroid[k] + worst[k]), 0.0, 1.0);
        }
        const double fc = score(candidate);
        if (fc > values.back()) {
          simplex.back() = candidate;
          values.back() = fc;
        } else {
          for (std::size_t i = 1; i < simplex.size(); ++i) {
            for (std::size_t k = 0; k < m; ++k) {
              simplex[i][k] = std::clamp(
                  simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]), 0.0, 1.0);
            }
            values[i] = score(simplex[i]);
          }
        }
      }
    }
    order_vertices();
  };

  build_simplex(u0, 0.05);
  descend();
  std::vector<double> stage_best = simplex[0];
  double stage_value = values[0];

  // One deterministic restart around the incumbent with a tighter simplex:
  // recovers from a collapsed (degenerate) simplex and costs little otherwise.
  if (evaluations < kMaxEvaluations) {
    build_simplex(stage_best, 0.02);
    descend();
    if (values[0] > stage_value) {
      stage_best = simplex[0];
      stage_value = values[0];
    }
  }

  if (stage_value >= start_value) {
    out.parameters = embed(stage_best);
    out.objective = stage_value;
  } else {
    out.parameters = origin;
    out.objective = start_value;
  }
  out.evaluations = evaluations;
  out.boundary_contacts = find_boundary_contacts(out.parameters, cb);
  return out;
}

SweepResult grid_sweep(const ExcitonNetwork& net, std::span<const double> h28_grid,
                       std::span<const double> omega8_grid,
                       const std::array<double, 6>& gamma_values) {
  if (h28_grid.empty() || omega8_grid.empty()) {
    throw ParameterError("sweep grids must be nonempty");
  }
  check_network_arity(net);
  for (double g : gamma_values) {
    if (!(g > 0.0)) throw ParameterError("sweep rates must be positive");
  }
  const std::vector<double> rates(gamma_values.begin(), gamma_values.end());

  // One window covering every cell: the pigment eigenvalues are fixed across
  // the sweep and the sink eigenvalue ranges over omega8_grid.  A shared
  // window makes the donor density bitwise identical in every cell.
  const auto [o_min_it, o_max_it] =
      std::minmax_element(omega8_grid.begin(), omega8_grid.end());
  const SinkParameters probe{*o_min_it, h28_grid.front(), gamma_values[5]};
  const SystemPartition part0 = partition(net, probe);
  const BathSpectrum bath0 = diagonalize_bath(part0, rates);

  double e_min = *o_min_it;
  double e_max = *o_max_it;
  for (int k = 0; k < bath0.eigenvalues.size(); ++k) {
    if (bath0.sink_position && k == *bath0.sink_position) continue;
    e_min = std::min(e_min, bath0.eigenvalues(k));
    e_max = std::max(e_max, bath0.eigenvalues(k));
  }
  const double g_max = *std::max_element(gamma_values.begin(), gamma_values.end());
  const QuadratureWindow window{e_min - 20.0 * g_max, e_max + 20.0 * g_max, 1e-9};

  const SpectralProfile f1 = donor_profile(part0, bath0);
  const NormalizedDensity d1 = normalize_density(f1, window, peak_seed(f1, window));
  const DensityView donor_view = d1.view();

  SweepResult result;
  result.h28_grid.assign(h28_grid.begin(), h28_grid.end());
  result.omega8_grid.assign(omega8_grid.begin(), omega8_grid.end());
  result.values.assign(h28_grid.size() * omega8_grid.size(), kNaN);
  result.ok.assign(result.values.size(), 0);

  for (std::size_t i = 0; i < h28_grid.size(); ++i) {
    for (std::size_t j = 0; j < omega8_grid.size(); ++j) {
      const std::size_t cell = i * omega8_grid.size() + j;
      try {
        const SinkParameters sink{omega8_grid[j], h28_grid[i], gamma_values[5]};
        const SystemPartition part = partition(net, sink);
        const BathSpectrum bath = diagonalize_bath(part, rates);
        const SpectralProfile f2 = acceptor_profile(part, bath);
        const NormalizedDensity d2 =
            normalize_density(f2, window, peak_seed(f2, window));
        result.values[cell] = overlap_efficiency(donor_view, d2.view());
        result.ok[cell] = 1;
      } catch (const ConvergenceError&) {
      } catch (const DomainError&) {
      }
    }
  }
  return result;
}

std::array<double, 6> rates_at(const TemperatureModel& model, double temperature) {
  if (!(model.reference_temperature > 0.0)) {
    throw ParameterError("reference temperature must be positive");
  }
  for (double g : model.reference_rates) {
    if (!(g > 0.0)) throw ParameterError("reference rates must be positive");
  }
  if (!(temperature > 0.0)) {
    throw DomainError("temperature must be positive");
  }
  std::array<double, 6> out{};
  const double scale = temperature / model.reference_temperature;
  for (int k = 0; k < 6; ++k) out[k] = model.reference_rates[k] * scale;
  return out;
}

std::vector<std::pair<double, double>> temperature_sweep(
    const ExcitonNetwork& net, const ParameterVector& params_at_t0,
    std::span<const double> temperature_grid, double reference_temperature) {
  check_network_arity(net);
  TemperatureModel model;
  model.reference_temperature = reference_temperature;
  for (int k = 0; k < 6; ++k) model.reference_rates[k] = params_at_t0[k];

  std::vector<std::pair<double, double>> out;
  out.reserve(temperature_grid.size());
  for (double t : temperature_grid) {
    const std::array<double, 6> scaled = rates_at(model, t);
    ParameterVector params = params_at_t0;
    for (int k = 0; k < 6; ++k) params[k] = scaled[k];
    out.emplace_back(t, evaluate_objective(net, params));
  }
  return out;
}

}  // namespace excires
