#include "tempsep/verify.hpp"

#include <algorithm>
#include <cmath>

#include "tempsep/error.hpp"

namespace tempsep::verify {

namespace {

double max_drift(const std::vector<double>& series) {
  if (series.empty() || series.front() == 0.0) return 0.0;
  double m = 0.0;
  for (double v : series) m = std::max(m, std::abs(v / series.front() - 1.0));
  return m;
}

}  // namespace

TemperatureCurve output_temperature(const PdeSolution& solution, std::optional<double> alpha) {
  const double a = alpha.value_or(to_double(solution.params.alpha));
  const auto& first = solution.snapshot_at(0.0);
  const double base = solution.moment(first, a);
  if (base == 0.0) throw Error(ErrorKind::kInvalidArgument, "I_alpha(0) vanishes on the grid");
  TemperatureCurve curve;
  for (const auto& s : solution.snapshots) {
    curve.y.push_back(s.y);
    curve.theta.push_back(solution.moment(s, a) / base);
  }
  return curve;
}

ConservationReport conservation_report(const PdeSolution& solution, bool number_meaningful) {
  ConservationReport r;
  r.number_drift = max_drift(solution.number_density_trace());
  r.energy_drift = max_drift(solution.energy_trace());
  r.number_meaningful = number_meaningful;
  return r;
}

VerificationReport self_consistency(const PdeSolution& solution, const TemperatureFn& theta,
                                    double tolerance, bool number_meaningful) {
  VerificationReport report;
  report.tolerance = tolerance;
  report.temperature = theta.description();
  const TemperatureCurve out = output_temperature(solution);
  for (std::size_t s = 0; s < out.y.size(); ++s) {
    ConsistencyRow row;
    row.y = out.y[s];
    row.theta_in = theta(row.y);
    row.theta_out = out.theta[s];
    row.rel_dev = std::abs(row.theta_out - row.theta_in) / std::abs(row.theta_in);
    if (s == 0 || row.rel_dev > report.max_rel_dev) {
      report.max_rel_dev = row.rel_dev;
      report.worst_y = row.y;
    }
    report.rows.push_back(row);
  }
  report.pass = report.max_rel_dev <= tolerance;
  report.conservation = conservation_report(solution, number_meaningful);
  return report;
}

MomentOdeReport moment_ode_check(const PdeSolution& solution, const std::vector<double>& orders,
                                 double tolerance) {
  MomentOdeReport report;
  report.tolerance = tolerance;
  const double i = to_double(solution.params.i);
  const double j = to_double(solution.params.j);
  const double k = to_double(solution.params.k);
  const auto& trace = solution.trace;

  for (double n : orders) {
    const std::vector<double> lower = trace.series(n + k - 2.0);
    const std::vector<double> upper = trace.series(n + j - 1.0);
    auto terms = [&](std::size_t t) {
      const double a = (n - i) * (n + k - 1.0) * lower[t];
      const double b = (n - i) * upper[t] / trace.theta[t];
      return std::pair{a, b};
    };

    for (std::size_t s = 0; s + 1 < solution.snapshots.size(); ++s) {
      const auto& s0 = solution.snapshots[s];
      const auto& s1 = solution.snapshots[s + 1];
      const double dy = s1.y - s0.y;
      if (dy <= 0.0) continue;

      // Trapezoid over accepted steps inside [s0.y, s1.y].
      double rhs = 0.0;
      double scale = 0.0;
      for (std::size_t t = 0; t + 1 < trace.y.size(); ++t) {
        if (trace.y[t] < s0.y - 1e-12 || trace.y[t + 1] > s1.y + 1e-12) continue;
        const double h = trace.y[t + 1] - trace.y[t];
        const auto [a0, b0] = terms(t);
        const auto [a1, b1] = terms(t + 1);
        rhs += 0.5 * h * ((a0 - b0) + (a1 - b1));
        scale += 0.25 * h * (std::abs(a0) + std::abs(b0) + std::abs(a1) + std::abs(b1));
      }

      MomentResidual r;
      r.n = n;
      r.y_start = s0.y;
      r.y_end = s1.y;
      r.finite_difference = (solution.moment(s1, n) - solution.moment(s0, n)) / dy;
      r.rhs = rhs / dy;
      r.scale = scale / dy;
      r.residual = r.scale > 0.0 ? std::abs(r.finite_difference - r.rhs) / r.scale : 0.0;
      report.max_residual = std::max(report.max_residual, r.residual);
      report.residuals.push_back(r);
    }
  }
  report.pass = report.max_residual <= tolerance;
  return report;
}

}  // namespace tempsep::verify
