#include "approx.hpp"
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "excires/errors.hpp"
#include "excires/spectral.hpp"
#include "excires/transfer.hpp"
#include "oracles.hpp"

using namespace excires;

namespace {

// Hand-built normalized Lorentzian view: exact analytic values divided by the
// truncated in-window mass, independent of the spectral pipeline.
DensityView lorentz_view_on(double center, double g0, QuadratureWindow window) {
  const double mass =
      oracle::lorentzian_mass(window.lower, window.upper, center, g0);
  return {[center, g0, mass](double omega) {
            return oracle::lorentzian(omega, center, g0) / mass;
          },
          window,
          {center}};
}

DensityView lorentz_view(double center, double g0, double half_window) {
  return lorentz_view_on(center, g0,
                         {center - half_window, center + half_window, 1e-10});
}

PhaseModel constant_model(double omega0, double gamma, double tau, double t0) {
  PhaseModel m;
  m.resonance_frequency = omega0;
  m.width = gamma;
  m.tau_model = TauModel::constant;
  m.tau0 = tau;
  m.arrival_time = t0;
  return m;
}

}  // namespace

TEST_SUITE("transfer") {

TEST_CASE("phase vanishes at the resonance frequency and is odd around it") {
  PhaseModel m = constant_model(150.0, 20.0, 0.3, 0.45);
  CHECK(phase(m, 150.0) == 0.0);
  for (double d : {1.0, 7.5, 40.0}) {
    CHECK(phase(m, 150.0 + d) ==
          doctest::Approx(-phase(m, 150.0 - d)).epsilon(1e-14));
  }

  PhaseModel quad = m;
  quad.tau_model = TauModel::quadratic;
  quad.kappa = 2e-4;
  CHECK(phase(quad, 150.0) == 0.0);
  for (double d : {1.0, 7.5, 40.0}) {
    CHECK(phase(quad, 150.0 + d) ==
          doctest::Approx(-phase(quad, 150.0 - d)).epsilon(1e-14));
  }
}

TEST_CASE("arriving exactly at the flight time leaves only the chirp term") {
  PhaseModel m = constant_model(100.0, 5.0, 0.7, 0.7);
  for (double d : {-12.0, -2.0, 3.0, 30.0}) {
    CHECK(phase(m, 100.0 + d) ==
          doctest::Approx(-2.0 * std::atan(d / 5.0)).epsilon(1e-14));
  }
}

TEST_CASE("a negligible phase reproduces the overlap integral") {
  // Distinct widths and centers give a nontrivial overlap; a near-infinite
  // width makes theta ~ 1e-13 rad, so the transfer integral must reproduce
  // the overlap computed by the adaptive quadrature path.
  const DensityView f1 = lorentz_view(0.0, 4.0, 1200.0);
  const DensityView f2 = lorentz_view_on(3.0, 7.0, f1.window);
  const double f = overlap_efficiency(f1, f2);
  CHECK(f > 0.5);
  CHECK(f < 1.0);

  PhaseModel m = constant_model(0.0, 1e15, 0.3, 0.3);
  const double p = transfer_probability(f1, f2, m);
  CHECK(p == doctest::Approx(f).epsilon(1e-6));
  CHECK(p <= f + 1e-9);
}

TEST_CASE("matched lorentzians follow the closed-form arrival curve") {
  const double gamma = 5.0;
  const double tau = 0.5;
  const DensityView f = lorentz_view(160.0, gamma, 300.0 * gamma);
  for (double s : {0.3, 0.7, 1.0, 1.5, 2.5}) {
    PhaseModel m = constant_model(160.0, gamma, tau, tau + s / gamma);
    const double p = transfer_probability(f, f, m);
    CHECK(p == Margin{oracle::matched_lorentzian_probability(s), 3e-3});
  }
  // Arriving before the flight time: the packet has not formed yet.
  PhaseModel early = constant_model(160.0, gamma, tau, tau - 1.0 / gamma);
  CHECK(transfer_probability(f, f, early) < 1e-4);
}

TEST_CASE("probability never exceeds the overlap") {
  const DensityView f1 = lorentz_view(-20.0, 6.0, 2000.0);
  const DensityView f2 = lorentz_view_on(-14.0, 9.0, f1.window);
  const double overlap = overlap_efficiency(f1, f2);
  for (double t0 : {-0.4, 0.0, 0.05, 0.21, 0.9}) {
    PhaseModel m = constant_model(-20.0, 6.0, 0.0, t0);
    CHECK(transfer_probability(f1, f2, m) <= overlap + 1e-9);
  }
}

TEST_CASE("constant-time optimum sits one inverse width past the flight time") {
  const double gamma = 5.0;
  const double tau = 0.5;
  const DensityView f = lorentz_view(160.0, gamma, 300.0 * gamma);
  PhaseModel m = constant_model(160.0, gamma, tau, 0.0);
  const ArrivalResult r = optimize_arrival(f, f, m);
  CHECK(r.probability == Margin{4.0 / (M_E * M_E), 5e-3});
  CHECK(r.arrival_time - tau ==
        doctest::Approx(1.0 / gamma).epsilon(0.01));
  CHECK(r.arrival_time > tau);  // documented sign convention
  CHECK(r.kappa == 0.0);
  CHECK(r.evaluations > 10);
}

TEST_CASE("the constant-time probability is unimodal across the bracket") {
  const double gamma = 5.0;
  const DensityView f = lorentz_view(0.0, gamma, 100.0 * gamma);
  std::vector<double> values;
  for (int i = 0; i <= 40; ++i) {
    const double t0 = i * (3.0 / gamma) / 40.0;
    values.push_back(transfer_probability(f, f, constant_model(0.0, gamma, 0.0, t0)));
  }
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] > values[i - 1] + 1e-12 && values[i] > values[i + 1] + 1e-12) {
      ++maxima;
    }
  }
  CHECK(maxima == 1);
}

TEST_CASE("joint chirp optimization reaches the documented plateau") {
  const double gamma = 5.0;
  const double tau = 0.5;
  const DensityView f = lorentz_view(160.0, gamma, 80.0 * gamma);
  PhaseModel m = constant_model(160.0, gamma, tau, 0.0);
  m.tau_model = TauModel::quadratic;
  const double g3 = gamma * gamma * gamma;
  const ArrivalResult r =
      optimize_arrival(f, f, m, KappaRange{-50.0 / g3, 50.0 / g3});
  CHECK(r.probability == Margin{0.72, 0.02});
  CHECK(r.probability > 4.0 / (M_E * M_E));  // the chirp must beat constant tau
  CHECK(std::abs(r.kappa) <= 50.0 / g3);
  CHECK(r.arrival_time > tau);
  CHECK(r.evaluations > 101);
}

TEST_CASE("reflecting the frequency axis leaves the probability unchanged") {
  // Mirroring the whole problem (density center, window, and reference
  // frequency all negated) flips the sign of every phase contribution —
  // linear, chirp, and arctan alike — so the amplitude conjugates and the
  // probability is invariant.  The windows are symmetric about the centers,
  // so the mirrored quadrature grid is the exact negation of the original.
  const double gamma = 5.0;
  const double tau = 0.5;
  const DensityView right = lorentz_view(160.0, gamma, 200.0 * gamma);
  const DensityView left = lorentz_view(-160.0, gamma, 200.0 * gamma);
  for (double s : {0.4, 1.2}) {
    for (double c : {0.0, 0.025}) {
      PhaseModel forward = constant_model(160.0, gamma, tau, tau + s / gamma);
      forward.tau_model = TauModel::quadratic;
      forward.kappa = c / (gamma * gamma * gamma);
      PhaseModel mirrored = forward;
      mirrored.resonance_frequency = -160.0;
      const double p = transfer_probability(right, right, forward);
      CHECK(p > 0.1);
      CHECK(transfer_probability(left, left, mirrored) ==
            doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("optimization respects a caller-supplied arrival bracket") {
  const double gamma = 5.0;
  const double tau = 0.5;
  const DensityView f = lorentz_view(160.0, gamma, 150.0 * gamma);
  PhaseModel m = constant_model(160.0, gamma, tau, 0.0);
  const std::array<double, 2> bracket{tau + 2.0 / gamma, tau + 4.0 / gamma};
  const ArrivalResult r = optimize_arrival(f, f, m, {}, bracket);
  CHECK(r.arrival_time >= bracket[0] - 1e-12);
  CHECK(r.arrival_time <= bracket[1] + 1e-12);
  // The unconstrained optimum at tau + 1/gamma is outside: the edge wins.
  CHECK(r.arrival_time == Margin{bracket[0], 1e-3});
}

TEST_CASE("optimizer argument validation") {
  const DensityView f = lorentz_view(0.0, 5.0, 500.0);
  PhaseModel quad = constant_model(0.0, 5.0, 0.5, 0.0);
  quad.tau_model = TauModel::quadratic;
  // Quadratic flight needs a kappa range.
  CHECK_THROWS_AS(optimize_arrival(f, f, quad), ParameterError);
  // Reversed brackets and ranges are rejected.
  CHECK_THROWS_AS(optimize_arrival(f, f, constant_model(0.0, 5.0, 0.5, 0.0), {},
                                   std::array<double, 2>{1.0, 0.0}),
                  ParameterError);
  CHECK_THROWS_AS(optimize_arrival(f, f, quad, KappaRange{1.0, -1.0}), ParameterError);
  // Non-positive width is out of contract.
  CHECK_THROWS_AS(transfer_probability(f, f, constant_model(0.0, 0.0, 0.5, 0.5)),
                  ParameterError);
  CHECK_THROWS_AS(transfer_probability(f, f, constant_model(0.0, -3.0, 0.5, 0.5)),
                  ParameterError);
}

TEST_CASE("a degenerate kappa range pins the chirp") {
  const double gamma = 5.0;
  const DensityView f = lorentz_view(160.0, gamma, 100.0 * gamma);
  PhaseModel m = constant_model(160.0, gamma, 0.5, 0.0);
  m.tau_model = TauModel::quadratic;
  const double pinned = 0.02 / (gamma * gamma * gamma);
  const ArrivalResult r = optimize_arrival(f, f, m, KappaRange{pinned, pinned});
  CHECK(r.kappa == pinned);
  CHECK(r.probability > 0.0);
}

TEST_CASE("the optimum is invariant under joint frequency-time rescaling") {
  const DensityView slow = lorentz_view(100.0, 4.0, 200.0 * 4.0);
  const DensityView fast = lorentz_view(100.0, 40.0, 200.0 * 40.0);
  const ArrivalResult a =
      optimize_arrival(slow, slow, constant_model(100.0, 4.0, 2.0, 0.0));
  const ArrivalResult b =
      optimize_arrival(fast, fast, constant_model(100.0, 40.0, 0.2, 0.0));
  CHECK(a.probability == doctest::Approx(b.probability).epsilon(1e-9));
  CHECK(a.arrival_time == doctest::Approx(10.0 * b.arrival_time).epsilon(1e-6));
}

TEST_CASE("single-shot probability is the product of its factors") {
  CHECK(single_shot_probability(0.7, 0.7) == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(single_shot_probability(1.0, 1.0) == 1.0);
  CHECK(single_shot_probability(0.0, 0.9) == 0.0);
  CHECK_THROWS_AS(single_shot_probability(-0.1, 0.5), ParameterError);
  CHECK_THROWS_AS(single_shot_probability(0.5, 1.1), ParameterError);
}

TEST_CASE("bounce efficiency matches the shot-by-shot recurrence") {
  const BounceParameters bp{0.5, 1e-3};
  for (long n : {1L, 2L, 5L, 17L, 100L}) {
    CHECK(bounce_efficiency(bp, n) ==
          doctest::Approx(oracle::bounce_recurrence(0.5, 1e-3, n)).epsilon(1e-12));
  }
  CHECK(bounce_efficiency(bp, 1) == doctest::Approx(0.5 * (1.0 - 1e-3)).epsilon(1e-14));
  CHECK(bounce_efficiency(bp, 0) == 0.0);
}

TEST_CASE("five-bounce and asymptotic efficiency checkpoints") {
  const BounceParameters bp{0.5, 1e-3};
  CHECK(bounce_efficiency(bp, 5) == Margin{0.9662, 1e-4});
  const AsymptoticEfficiency a = asymptotic_efficiency(bp);
  CHECK(a.exact == Margin{0.9970, 5e-4});
  CHECK(a.first_order_in_q == doctest::Approx(1.0 - 1e-3 * 3.0).epsilon(1e-12));
}

TEST_CASE("efficiency grows with bounces towards the asymptote") {
  const BounceParameters bp{0.3, 0.005};
  double previous = -1.0;
  for (long n : {0L, 1L, 2L, 4L, 8L, 32L, 1000L}) {
    const double eta = bounce_efficiency(bp, n);
    CHECK(eta >= previous);
    CHECK(eta >= 0.0);
    CHECK(eta <= 1.0);
    previous = eta;
  }
  CHECK(bounce_efficiency(bp, 10000) ==
        doctest::Approx(asymptotic_efficiency(bp).exact).epsilon(1e-9));
}

TEST_CASE("bounce edge cases and validation") {
  // Without recombination every exciton eventually dissipates.
  CHECK(bounce_efficiency({0.25, 0.0}, 200) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(asymptotic_efficiency({0.25, 0.0}).exact == doctest::Approx(1.0).epsilon(1e-14));
  // Guaranteed dissipation: one flight decides everything.
  CHECK(asymptotic_efficiency({1.0, 0.01}).exact == doctest::Approx(0.99).epsilon(1e-14));
  // Certain recombination kills the transfer.
  CHECK(bounce_efficiency({0.5, 1.0}, 10) == 0.0);
  // Removable singularity at p = q = 0.
  CHECK(bounce_efficiency({0.0, 0.0}, 50) == 0.0);

  CHECK_THROWS_AS(bounce_efficiency({-0.1, 0.0}, 1), ParameterError);
  CHECK_THROWS_AS(bounce_efficiency({0.5, 1.5}, 1), ParameterError);
  CHECK_THROWS_AS(bounce_efficiency({0.5, 0.5}, -1), ParameterError);
  CHECK_THROWS_AS(asymptotic_efficiency({0.0, 0.5}), DomainError);
}

TEST_CASE("random bounce parameters stay within the unit interval") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const BounceParameters bp{u(rng), u(rng)};
    const long n = static_cast<long>(u(rng) * 50.0);
    const double eta = bounce_efficiency(bp, n);
    CHECK(eta >= 0.0);
    CHECK(eta <= 1.0);
  }
}

TEST_CASE("picosecond flights against nanosecond recombination set the loss") {
  const double flight_ps = 1.0;
  const double recombination_ps = 1000.0;  // one nanosecond
  const double q = flight_ps / recombination_ps;
  CHECK(q == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(bounce_efficiency({0.5, q}, 5) == Margin{0.9662, 1e-4});
}

}  // TEST_SUITE
