#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "excires/errors.hpp"
#include "excires/network.hpp"
#include "excires/optimize.hpp"
#include "excires/quadrature.hpp"
#include "excires/spectral.hpp"
#include "excires/transfer.hpp"

using namespace excires;

namespace {

const ExcitonNetwork& fmo() {
  static const ExcitonNetwork net =
      load_network(std::string(EXCIRES_BENCH_DATA_DIR) + "/fmo_adolphs_renger.json");
  return net;
}

const ParameterVector kReference{59.6, 90.0, 50.3, 59.7, 89.7, 50.1, -500.0, 327.0};

struct Pipeline {
  NormalizedDensity d1;
  NormalizedDensity d2;
};

const Pipeline& reference_pipeline() {
  static const Pipeline p = [] {
    const SinkParameters sink{kReference[6], kReference[7], kReference[5]};
    const SystemPartition part = partition(fmo(), sink);
    const std::vector<double> rates(kReference.begin(), kReference.begin() + 6);
    const BathSpectrum bath = diagonalize_bath(part, rates);
    const SpectralProfile f1 = donor_profile(part, bath);
    const SpectralProfile f2 = acceptor_profile(part, bath);
    const QuadratureWindow w = default_window(f1, f2);
    const auto seeds = [&](const SpectralProfile& f) -> std::vector<double> {
      try {
        return {renormalized_frequency(f, w)};
      } catch (const ConvergenceError&) {
        return {};
      }
    };
    return Pipeline{normalize_density(f1, w, seeds(f1)),
                    normalize_density(f2, w, seeds(f2))};
  }();
  return p;
}

void BM_EvaluateObjective(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_objective(fmo(), kReference));
  }
}
BENCHMARK(BM_EvaluateObjective);

void BM_OverlapEfficiency(benchmark::State& state) {
  const Pipeline& p = reference_pipeline();
  const DensityView v1 = p.d1.view();
  const DensityView v2 = p.d2.view();
  for (auto _ : state) {
    benchmark::DoNotOptimize(overlap_efficiency(v1, v2));
  }
}
BENCHMARK(BM_OverlapEfficiency);

void BM_TransferProbability(benchmark::State& state) {
  const Pipeline& p = reference_pipeline();
  const DensityView v1 = p.d1.view();
  const DensityView v2 = p.d2.view();
  PhaseModel model;
  model.resonance_frequency = 160.34;
  model.width = 20.4;
  model.tau0 = 0.5;
  model.arrival_time = 0.5 + 1.0 / 20.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transfer_probability(v1, v2, model));
  }
}
BENCHMARK(BM_TransferProbability);

void BM_NarrowLorentzianQuadrature(benchmark::State& state) {
  const double center = 0.3;
  const double gamma = 1e-3;
  const auto f = [&](double omega) {
    const double d = omega - center;
    return gamma / (3.141592653589793 * (d * d + gamma * gamma));
  };
  const std::vector<double> seeds{center};
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(f, -100.0, 100.0, {}, seeds));
  }
}
BENCHMARK(BM_NarrowLorentzianQuadrature);

}  // namespace

BENCHMARK_MAIN();
