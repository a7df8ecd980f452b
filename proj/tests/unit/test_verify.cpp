#include <gtest/gtest.h>

#include <cmath>

#include "tempsep/contfrac.hpp"
#include "tempsep/verify.hpp"

namespace tempsep::verify {
namespace {

using transport::Grid;
using transport::make_log_grid;
using transport::solve_transport;

const TransportParams kCompton = TransportParams::comptonization();

struct Run {
  TemperatureFn theta;
  PdeSolution solution;
};

TemperatureFn psi24(const InitialSpectrum& s) {
  const auto table = moments::theta_derivatives_comptonization(s, 24);
  return TemperatureFn::continued_fraction(contfrac::cf_coefficients(table), 24);
}

const Run& mono_run() {
  static const Run run = [] {
    const auto s = InitialSpectrum::monoenergetic();
    auto theta = psi24(s);
    auto sol = solve_transport(kCompton, s, theta, make_log_grid(1e-3, 50.0, 400, 2.0, 21));
    return Run{std::move(theta), std::move(sol)};
  }();
  return run;
}

const Grid& brems_grid() {
  static const Grid g = make_log_grid(1e-8, 50.0, 800, 2.0, 21);
  return g;
}

TEST(Verify, OutputTemperatureStartsAtOne) {
  const auto curve = output_temperature(mono_run().solution);
  ASSERT_EQ(curve.y.size(), 21u);
  EXPECT_DOUBLE_EQ(curve.theta.front(), 1.0);
}

TEST(Verify, QuadratureMatchesSolverTrace) {
  const auto& sol = mono_run().solution;
  const auto energy = sol.energy_trace();
  EXPECT_NEAR(sol.moment(sol.snapshots.back(), 3.0) / energy.back(), 1.0, 1e-8);
  EXPECT_NEAR(sol.moment(sol.snapshots.front(), 3.0) / energy.front(), 1.0, 1e-8);
}

TEST(Verify, MonoenergeticRunIsSelfConsistent) {
  const auto report = self_consistency(mono_run().solution, mono_run().theta);
  EXPECT_TRUE(report.pass) << report.max_rel_dev;
  EXPECT_EQ(report.rows.size(), 21u);
  EXPECT_LT(report.conservation.number_drift, 1e-12);
}

TEST(Verify, TenPercentPerturbationIsDetected) {
  const auto& base = mono_run().theta;
  const auto perturbed =
      TemperatureFn::callable([&base](double y) { return 1.1 * base(y); }, "1.1 * psi24");
  const auto s = InitialSpectrum::monoenergetic();
  const auto sol = solve_transport(kCompton, s, perturbed, make_log_grid(1e-3, 50.0, 400, 2.0, 21));
  const auto report = self_consistency(sol, perturbed);
  EXPECT_FALSE(report.pass);
  EXPECT_GT(report.max_rel_dev, 0.05);
}

// Negative control: a constant input temperature for the bremsstrahlung run. The deviation
// was computed once and is pinned here as a regression value.
TEST(Verify, ConstantTemperatureNegativeControl) {
  const auto theta = TemperatureFn::constant(1.0);
  const auto sol = solve_transport(kCompton, InitialSpectrum::bremsstrahlung(), theta, brems_grid());
  const auto report = self_consistency(sol, theta, 0.02, false);
  EXPECT_FALSE(report.pass);
  EXPECT_DOUBLE_EQ(report.worst_y, 2.0);
  EXPECT_NEAR(report.max_rel_dev, 3.13989, 5e-4);
}

TEST(Verify, WienConservationAtRoundoffLevel) {
  const auto sol = solve_transport(kCompton, InitialSpectrum::wien(Rational(4, 3), 1),
                                   TemperatureFn::constant(4.0 / 3.0),
                                   make_log_grid(1e-3, 50.0, 400, 2.0, 21));
  const auto c = conservation_report(sol);
  EXPECT_LE(c.number_drift, 1e-10);
  EXPECT_LE(c.energy_drift, 1e-10);
}

TEST(Verify, MomentEquationHoldsOnTheSolution) {
  const auto report = moment_ode_check(mono_run().solution);
  EXPECT_TRUE(report.pass) << report.max_residual;
  EXPECT_EQ(report.residuals.size(), 3u * 20u);
}

// Removing a tenth of the photons above x = 4 midway is not a solution of the transport
// equation; the moment check must notice.
TEST(Verify, MomentCheckDetectsATamperedSnapshot) {
  PdeSolution tampered = mono_run().solution;
  auto& snap = tampered.snapshots[10];
  for (std::size_t l = 0; l < snap.number_spectrum.size(); ++l) {
    if (tampered.grid.centers[l] > 4.0) snap.number_spectrum[l] *= 0.9;
  }
  EXPECT_FALSE(moment_ode_check(tampered).pass);
}

}  // namespace
}  // namespace tempsep::verify
