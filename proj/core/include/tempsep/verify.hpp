#pragma once

#include <optional>
#include <vector>

#include "tempsep/transport.hpp"

namespace tempsep::verify {

using transport::PdeSolution;
using transport::TemperatureFn;

struct TemperatureCurve {
  std::vector<double> y;
  std::vector<double> theta;
};

// theta_out(y) = I_alpha(y) / I_alpha(0) at every stored snapshot, by the solver's cell rule.
// `alpha` defaults to the run's transport parameters.
TemperatureCurve output_temperature(const PdeSolution& solution,
                                    std::optional<double> alpha = std::nullopt);

struct ConservationReport {
  double number_drift = 0.0;  // max |N_r(y)/N_r(0) - 1| over accepted steps
  double energy_drift = 0.0;  // same for I_3
  // Photon number is only meaningful when it converges (not for bremsstrahlung).
  bool number_meaningful = true;
};

ConservationReport conservation_report(const PdeSolution& solution, bool number_meaningful = true);

struct ConsistencyRow {
  double y = 0.0;
  double theta_in = 0.0;
  double theta_out = 0.0;
  double rel_dev = 0.0;
};

struct VerificationReport {
  std::vector<ConsistencyRow> rows;
  double max_rel_dev = 0.0;
  double worst_y = 0.0;
  double tolerance = 0.02;
  bool pass = false;
  std::string temperature;
  ConservationReport conservation;
};

VerificationReport self_consistency(const PdeSolution& solution, const TemperatureFn& theta,
                                    double tolerance = 0.02, bool number_meaningful = true);

// dI_n/dy from consecutive snapshots against the moment equation
//   dI_n/dy = (n-i) [ (n+k-1) I_{n+k-2} - I_{n+j-1} / theta ],
// with the right side averaged over the interval from the solver's step trace. The residual
// is scaled by the mean magnitude of the two right-side terms, since for the conserved
// moment the right side itself is near zero.
struct MomentResidual {
  double n = 0.0;
  double y_start = 0.0;
  double y_end = 0.0;
  double finite_difference = 0.0;
  double rhs = 0.0;
  double scale = 0.0;
  double residual = 0.0;  // |finite_difference - rhs| / scale
};

struct MomentOdeReport {
  std::vector<MomentResidual> residuals;
  double max_residual = 0.0;
  double tolerance = 0.03;
  bool pass = false;
};

MomentOdeReport moment_ode_check(const PdeSolution& solution,
                                 const std::vector<double>& orders = {3, 4, 5},
                                 double tolerance = 0.03);

}  // namespace tempsep::verify
