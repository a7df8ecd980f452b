#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tempsep/contfrac.hpp"
#include "tempsep/error.hpp"
#include "tempsep/transport.hpp"

namespace tempsep::transport {
namespace {

const TransportParams kCompton = TransportParams::comptonization();

TEST(Transport, DriftAndDiffusion) {
  const auto a = drift_diffusion(kCompton, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(a.drift, 3.0);
  EXPECT_DOUBLE_EQ(a.diffusion, 2.0);
  const double theta = 4.0 / 3.0;
  EXPECT_NEAR(drift_diffusion(kCompton, theta, 4.0 * theta).drift, 0.0, 1e-12);
  for (double x : {0.1, 1.0, 7.0}) {
    EXPECT_EQ(drift_diffusion(kCompton, 0.3, x).diffusion, drift_diffusion(kCompton, 9.0, x).diffusion);
  }
}

TEST(Transport, LogGrid) {
  const Grid g = make_log_grid(1e-3, 50.0, 400, 2.0, 21);
  EXPECT_EQ(g.cells(), 400u);
  EXPECT_DOUBLE_EQ(g.edges.front(), 1e-3);
  EXPECT_DOUBLE_EQ(g.edges.back(), 50.0);
  EXPECT_NEAR(g.edges[1] / g.edges[0], g.edges[400] / g.edges[399], 1e-12);
  EXPECT_EQ(g.snapshots.size(), 21u);
  EXPECT_DOUBLE_EQ(g.snapshots[10], 1.0);
  EXPECT_THROW(make_log_grid(0.0, 50.0, 10, 2.0, 3), Error);
  EXPECT_THROW(make_log_grid(1.0, 0.5, 10, 2.0, 3), Error);
  EXPECT_THROW(make_log_grid(1.0, 5.0, 1, 2.0, 3), Error);
}

TEST(Transport, TemperatureFunctions) {
  const auto table = moments::theta_derivatives_comptonization(InitialSpectrum::monoenergetic(), 8);
  const auto cf = contfrac::cf_coefficients(table);
  const auto psi = TemperatureFn::continued_fraction(cf, 8);
  EXPECT_DOUBLE_EQ(psi(0.7), contfrac::cf_eval(cf, 8, 0.7));
  const auto phi = TemperatureFn::taylor(table, 8);
  EXPECT_NEAR(phi(0.05), contfrac::taylor_eval(table, 8, 0.05), 1e-14);
  EXPECT_EQ(TemperatureFn::constant(2.5)(1.0), 2.5);
  EXPECT_NO_THROW(psi.check_positive(2.0));

  auto expect_nonpositive = [](const TemperatureFn& fn) {
    try {
      fn.check_positive(2.0);
      FAIL() << fn.description();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kNonPositiveTemperature);
    }
  };
  expect_nonpositive(TemperatureFn::constant(-1.0));
  expect_nonpositive(TemperatureFn::continued_fraction(cf, 1));  // pole at y = 1/2
  expect_nonpositive(TemperatureFn::callable([](double y) { return 1.0 - y; }, "1-y"));
}

// Zero-flux boundaries: the width-weighted sum of L F vanishes for any F.
TEST(TransportProperty, OperatorConservesPhotonNumber) {
  const Grid g = make_log_grid(1e-3, 50.0, 120, 2.0, 2);
  const TransportOperator op(kCompton, g);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> F(g.cells());
    for (auto& v : F) v = u(rng);
    const auto LF = op.apply(F, 0.2 + 3.0 * u(rng));
    double total = 0.0;
    double scale = 0.0;
    for (std::size_t l = 0; l < F.size(); ++l) {
      total += LF[l] * g.widths[l];
      scale += std::abs(LF[l]) * g.widths[l];
    }
    EXPECT_LT(std::abs(total), 1e-12 * scale);
  }
}

// An implicit step maps non-negative data to non-negative data.
TEST(TransportProperty, ImplicitStepPreservesPositivity) {
  const Grid g = make_log_grid(1e-3, 50.0, 100, 2.0, 2);
  const TransportOperator op(kCompton, g);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> F(g.cells(), 0.0);
    F[static_cast<std::size_t>(u(rng) * 99)] = 1.0;
    const auto next = op.implicit_step(F, 0.1 + 2.0 * u(rng), std::pow(10.0, -6.0 + 5.0 * u(rng)));
    for (double v : next) EXPECT_GE(v, 0.0);
  }
}

// The discrete operator converges to the expanded Fokker-Planck form
//   -d/dx[F drift] + d^2/dx^2[F diffusion / 2]
// at second order in the mesh spacing.
TEST(Transport, FokkerPlanckEquivalenceIsSecondOrder) {
  TransportParams p;
  p.i = 2;
  p.j = 3;
  p.k = 2;
  const double theta = 0.8;
  auto F = [](double x) { return x * x * std::exp(-(x - 3.0) * (x - 3.0)); };
  auto expanded = [&](double x) {
    const double h = 1e-4;
    auto drift_term = [&](double s) { return F(s) * drift_diffusion(p, theta, s).drift; };
    auto diff_term = [&](double s) { return F(s) * drift_diffusion(p, theta, s).diffusion / 2.0; };
    const double d1 = (drift_term(x + h) - drift_term(x - h)) / (2.0 * h);
    const double d2 = (diff_term(x + h) - 2.0 * diff_term(x) + diff_term(x - h)) / (h * h);
    return -d1 + d2;
  };
  auto max_error = [&](int cells) {
    const Grid g = make_log_grid(0.05, 12.0, cells, 1.0, 2);
    const TransportOperator op(p, g);
    std::vector<double> values;
    for (double x : g.centers) values.push_back(F(x));
    const auto LF = op.apply(values, theta);
    double err = 0.0;
    for (std::size_t l = 0; l < g.cells(); ++l) {
      const double x = g.centers[l];
      if (x < 1.0 || x > 6.0) continue;
      err = std::max(err, std::abs(LF[l] - expanded(x)));
    }
    return err;
  };
  const double coarse = max_error(200);
  const double fine = max_error(400);
  const double finer = max_error(800);
  EXPECT_GT(std::log2(coarse / fine), 1.8);
  EXPECT_GT(std::log2(fine / finer), 1.8);
}

TEST(Transport, WienIsAFixedPoint) {
  const auto wien = InitialSpectrum::wien(Rational(4, 3), 1);
  const Grid g = make_log_grid(1e-3, 50.0, 400, 2.0, 21);
  const auto sol = solve_transport(kCompton, wien, TemperatureFn::constant(4.0 / 3.0), g);
  const auto& start = sol.snapshots.front().number_spectrum;
  double worst = 0.0;
  for (const auto& s : sol.snapshots) {
    for (std::size_t l = 0; l < start.size(); ++l) {
      worst = std::max(worst, std::abs(s.number_spectrum[l] / start[l] - 1.0));
    }
  }
  EXPECT_LE(worst, 1e-4);
  EXPECT_EQ(sol.stats.clipped_values, 0);
}

TEST(Transport, PulseRunConservesNumberAndStaysPositive) {
  const Grid g = make_log_grid(1e-3, 50.0, 200, 0.5, 6);
  const auto sol = solve_transport(kCompton, InitialSpectrum::gaussian_pulse(4, Rational(1, 100)),
                                   TemperatureFn::constant(1.0), g);
  ASSERT_EQ(sol.snapshots.size(), 6u);
  const auto nr = sol.number_density_trace();
  for (double v : nr) EXPECT_NEAR(v / nr.front(), 1.0, 1e-12);
  for (const auto& s : sol.snapshots) {
    for (double v : s.number_spectrum) EXPECT_GE(v, 0.0);
  }
  EXPECT_GT(sol.stats.accepted_steps, 10);
  EXPECT_EQ(sol.trace.y.size(), static_cast<std::size_t>(sol.stats.accepted_steps) + 1);
}

TEST(Transport, MonoenergeticLineBecomesAPulse) {
  const Grid g = make_log_grid(1e-3, 50.0, 400, 0.1, 2);
  const auto F = initial_number_spectrum(kCompton, InitialSpectrum::monoenergetic(), g);
  double number = 0.0;
  double energy = 0.0;
  for (std::size_t l = 0; l < F.size(); ++l) {
    number += F[l] * g.widths[l];
    energy += F[l] * g.centers[l] * g.widths[l];
  }
  EXPECT_NEAR(number, 1.0, 1e-12);
  EXPECT_NEAR(energy, 4.0, 4.0 * 1e-3);
}

TEST(Transport, PhotonSpectrumAtStart) {
  const Grid g = make_log_grid(1e-3, 50.0, 400, 0.2, 3);
  const auto sol = solve_transport(kCompton, InitialSpectrum::monoenergetic(),
                                   TemperatureFn::constant(1.0), g);
  const auto curve = photon_spectrum(sol, 0.0);
  EXPECT_NEAR(curve.integral, 4.0, 4.0 * 5e-3);
  for (double G : curve.energy_spectrum) EXPECT_GE(G, 0.0);
  try {
    photon_spectrum(sol, 0.05);
    FAIL() << "expected SnapshotMissing";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSnapshotMissing);
  }
}

TEST(Transport, RejectsNonPositiveTemperature) {
  const Grid g = make_log_grid(1e-3, 50.0, 50, 2.0, 3);
  try {
    solve_transport(kCompton, InitialSpectrum::bremsstrahlung(), TemperatureFn::constant(0.0), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonPositiveTemperature);
  }
}

TEST(Transport, StepUnderflowIsReported) {
  const Grid g = make_log_grid(1e-3, 50.0, 50, 0.5, 2);
  SolverOptions o;
  o.rel_tol = 1e-300;
  o.min_step = 1e-3;
  o.initial_step = 1e-3;
  try {
    solve_transport(kCompton, InitialSpectrum::monoenergetic(), TemperatureFn::constant(1.0), g, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStepSizeUnderflow);
  }
}

// Halving the mesh spacing: the energy-weighted moment at the end of a short run converges
// at second order.
TEST(Transport, MeshRefinementOrder) {
  auto moment_at_end = [](int cells) {
    const Grid g = make_log_grid(1e-3, 50.0, cells, 0.5, 2);
    SolverOptions o;
    o.rel_tol = 1e-8;
    const auto sol = solve_transport(kCompton, InitialSpectrum::wien(Rational(1, 2), 1),
                                     TemperatureFn::constant(1.0), g, o);
    return sol.moment(sol.snapshots.back(), 4.0);
  };
  const double a = moment_at_end(100);
  const double b = moment_at_end(200);
  const double c = moment_at_end(400);
  EXPECT_GT(std::log2(std::abs(a - b) / std::abs(b - c)), 1.8);
}

TEST(Transport, DefaultTracedMoments) {
  const auto idx = default_traced_moments(kCompton);
  for (double n : {2.0, 3.0, 4.0, 5.0, 6.0}) {
    EXPECT_NE(std::find(idx.begin(), idx.end(), n), idx.end()) << n;
  }
}

}  // namespace
}  // namespace tempsep::transport
