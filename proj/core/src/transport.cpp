#include "tempsep/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tempsep/error.hpp"

namespace tempsep::transport {

namespace {

constexpr double kSnapshotMatch = 1e-12;

// Bernoulli function z / (e^z - 1).
double bernoulli(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - 0.5 * z;
  if (z > 700.0) return z * std::exp(-z);
  return z / std::expm1(z);
}

std::string number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// Mass of a normal(mean, sd) between a and b.
double normal_mass(double mean, double sd, double a, double b) {
  const double s = sd * std::sqrt(2.0);
  return 0.5 * (std::erf((b - mean) / s) - std::erf((a - mean) / s));
}

std::vector<double> thomas(std::vector<double> lower, std::vector<double> diag,
                           std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t l = 1; l < n; ++l) {
    const double w = lower[l] / diag[l - 1];
    diag[l] -= w * upper[l - 1];
    rhs[l] -= w * rhs[l - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t l = n - 1; l-- > 0;) rhs[l] = (rhs[l] - upper[l] * rhs[l + 1]) / diag[l];
  return rhs;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double cell_moment(const Grid& grid, std::span<const double> F, double power) {
  double sum = 0.0;
  for (std::size_t l = 0; l < F.size(); ++l) {
    sum += F[l] * std::pow(grid.centers[l], power) * grid.widths[l];
  }
  return sum;
}

}  // namespace

void Grid::validate() const {
  if (centers.empty() || edges.size() != centers.size() + 1 || widths.size() != centers.size()) {
    throw Error(ErrorKind::kInvalidArgument, "grid arrays are inconsistent");
  }
  if (!(edges.front() > 0.0)) throw Error(ErrorKind::kInvalidArgument, "grid needs x_min > 0");
  for (std::size_t l = 0; l + 1 < edges.size(); ++l) {
    if (!(edges[l + 1] > edges[l])) {
      throw Error(ErrorKind::kInvalidArgument, "grid edges must be strictly increasing");
    }
  }
  if (!(y_end > 0.0)) throw Error(ErrorKind::kInvalidArgument, "y_end must be positive");
  if (!std::is_sorted(snapshots.begin(), snapshots.end())) {
    throw Error(ErrorKind::kInvalidArgument, "snapshot times must be sorted");
  }
  if (!snapshots.empty() && (snapshots.front() < 0.0 || snapshots.back() > y_end)) {
    throw Error(ErrorKind::kInvalidArgument, "snapshot times must lie in [0, y_end]");
  }
}

Grid make_log_grid(double x_min, double x_max, int cells, double y_end, int snapshot_count) {
  if (!(x_min > 0.0) || !(x_max > x_min)) {
    throw Error(ErrorKind::kInvalidArgument, "grid needs 0 < x_min < x_max");
  }
  if (cells < 2) throw Error(ErrorKind::kInvalidArgument, "grid needs at least 2 cells");
  if (snapshot_count < 2) throw Error(ErrorKind::kInvalidArgument, "need at least 2 snapshots");
  Grid g;
  const double ratio = std::log(x_max / x_min);
  g.edges.resize(static_cast<std::size_t>(cells) + 1);
  for (int l = 0; l <= cells; ++l) {
    g.edges[static_cast<std::size_t>(l)] = x_min * std::exp(ratio * l / cells);
  }
  g.edges.back() = x_max;
  for (int l = 0; l < cells; ++l) {
    const double a = g.edges[static_cast<std::size_t>(l)];
    const double b = g.edges[static_cast<std::size_t>(l) + 1];
    g.centers.push_back(0.5 * (a + b));
    g.widths.push_back(b - a);
  }
  g.y_end = y_end;
  for (int s = 0; s < snapshot_count; ++s) g.snapshots.push_back(y_end * s / (snapshot_count - 1));
  g.validate();
  return g;
}

TemperatureFn::TemperatureFn(Kind kind, std::function<double(double)> fn, std::string description)
    : kind_(kind), fn_(std::move(fn)), description_(std::move(description)) {}

TemperatureFn TemperatureFn::continued_fraction(contfrac::ContinuedFraction cf, int level) {
  if (level < 0 || level > cf.truncation()) {
    throw Error(ErrorKind::kInvalidArgument, "continued fraction level out of range");
  }
  std::string desc = "continued_fraction:N=" + std::to_string(level);
  return TemperatureFn(
      Kind::kContinuedFraction,
      [cf = std::move(cf), level](double y) { return contfrac::cf_eval(cf, level, y); },
      std::move(desc));
}

TemperatureFn TemperatureFn::taylor(moments::DerivativeTable table, int level) {
  if (level < 0 || level > table.max_order()) {
    throw Error(ErrorKind::kInvalidArgument, "Taylor level out of range");
  }
  // Coefficients rounded once; the sum itself runs in double for speed inside the solver.
  std::vector<double> coeff;
  Rational fact = 1;
  for (int n = 0; n <= level; ++n) {
    if (n > 0) fact *= n;
    coeff.push_back(to_double(table.values[static_cast<std::size_t>(n)] / fact));
  }
  return TemperatureFn(
      Kind::kTaylor,
      [coeff = std::move(coeff)](double y) {
        double s = 0.0;
        for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) s = s * y + *it;
        return s;
      },
      "taylor:N=" + std::to_string(level));
}

TemperatureFn TemperatureFn::constant(double value) {
  return TemperatureFn(Kind::kConstant, [value](double) { return value; },
                       "constant:" + number(value));
}

TemperatureFn TemperatureFn::callable(std::function<double(double)> fn, std::string description) {
  return TemperatureFn(Kind::kCallable, std::move(fn), std::move(description));
}

void TemperatureFn::check_positive(double y_end, int samples) const {
  if (samples < 2) samples = 2;
  for (int s = 0; s < samples; ++s) {
    const double y = y_end * s / (samples - 1);
    double v = 0.0;
    try {
      v = fn_(y);
    } catch (const Error& e) {
      throw Error(ErrorKind::kNonPositiveTemperature,
                  description_ + " cannot be evaluated at y = " + number(y) + " (" + e.what() + ")");
    }
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::kNonPositiveTemperature,
                  description_ + " gives theta = " + number(v) + " at y = " + number(y));
    }
  }
}

FokkerPlanck drift_diffusion(const TransportParams& params, double theta, double x) {
  const double i = to_double(params.i);
  const double j = to_double(params.j);
  const double k = to_double(params.k);
  return {(i + k) * std::pow(x, k - 1.0) - std::pow(x, j) / theta, 2.0 * std::pow(x, k)};
}

TransportOperator::TransportOperator(const TransportParams& params, const Grid& grid)
    : i_(to_double(params.i)), p_(to_double(params.p())), grid_(&grid) {
  grid.validate();
  const double ik = to_double(params.i + params.k);
  const std::size_t n = grid.cells();
  for (std::size_t l = 0; l + 1 < n; ++l) {
    interface_coeff_.push_back(std::pow(grid.edges[l + 1], ik) /
                               (grid.centers[l + 1] - grid.centers[l]));
  }
  for (std::size_t l = 0; l < n; ++l) {
    const double x = grid.centers[l];
    center_power_.push_back(p_ == 0.0 ? std::log(x) : std::pow(x, p_) / p_);
    inv_xi_.push_back(std::pow(x, -i_));
  }
}

TransportOperator::Bands TransportOperator::assemble(double theta) const {
  const std::size_t n = grid_->cells();
  Bands b{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const auto& w = grid_->widths;
  // Flux through l+1/2: J = a [ B(-dphi) f_{l+1} - B(dphi) f_l ], f = F x^-i,
  // dphi = (phi_{l+1} - phi_l) / theta.
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const double dphi = (center_power_[l + 1] - center_power_[l]) / theta;
    const double to_right = interface_coeff_[l] * bernoulli(-dphi) * inv_xi_[l + 1];
    const double to_left = interface_coeff_[l] * bernoulli(dphi) * inv_xi_[l];
    b.upper[l] += to_right / w[l];
    b.diag[l] -= to_left / w[l];
    b.diag[l + 1] -= to_right / w[l + 1];
    b.lower[l + 1] += to_left / w[l + 1];
  }
  return b;
}

std::vector<double> TransportOperator::apply(std::span<const double> F, double theta) const {
  const Bands b = assemble(theta);
  const std::size_t n = F.size();
  std::vector<double> out(n);
  for (std::size_t l = 0; l < n; ++l) {
    double v = b.diag[l] * F[l];
    if (l > 0) v += b.lower[l] * F[l - 1];
    if (l + 1 < n) v += b.upper[l] * F[l + 1];
    out[l] = v;
  }
  return out;
}

std::vector<double> TransportOperator::implicit_step(std::span<const double> F, double theta,
                                                     double h) const {
  Bands b = assemble(theta);
  for (auto& v : b.lower) v *= -h;
  for (auto& v : b.upper) v *= -h;
  for (auto& v : b.diag) v = 1.0 - h * v;
  return thomas(std::move(b.lower), std::move(b.diag), std::move(b.upper),
                std::vector<double>(F.begin(), F.end()));
}

std::vector<double> default_traced_moments(const TransportParams& params) {
  std::vector<double> out{to_double(params.i), to_double(params.alpha), 3.0};
  for (int n = 3; n <= 5; ++n) {
    out.push_back(n);
    out.push_back(to_double(n + params.k - 2));
    out.push_back(to_double(n + params.j - 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> MomentTrace::series(double index) const {
  const auto it = std::find(indices.begin(), indices.end(), index);
  if (it == indices.end()) {
    throw Error(ErrorKind::kInvalidArgument, "moment I_" + number(index) + " was not traced");
  }
  const auto m = static_cast<std::size_t>(it - indices.begin());
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row[m]);
  return out;
}

const Snapshot& PdeSolution::snapshot_at(double y) const {
  for (const auto& s : snapshots) {
    if (std::abs(s.y - y) <= kSnapshotMatch * std::max(1.0, std::abs(y))) return s;
  }
  throw Error(ErrorKind::kSnapshotMissing, "no snapshot stored at y = " + number(y));
}

double PdeSolution::moment(const Snapshot& snapshot, double n) const {
  return cell_moment(grid, snapshot.number_spectrum, n - to_double(params.i));
}

std::vector<double> PdeSolution::number_density_trace() const {
  return trace.series(to_double(params.i));
}

std::vector<double> PdeSolution::energy_trace() const { return trace.series(3.0); }

std::vector<double> initial_number_spectrum(const TransportParams& params,
                                            const InitialSpectrum& spectrum, const Grid& grid,
                                            const SolverOptions& options) {
  const double i = to_double(params.i);
  const std::size_t n = grid.cells();
  std::vector<double> F(n, 0.0);

  auto pulse = [&](double mean, double variance, double density) {
    const double sd = std::sqrt(variance);
    const double cutoff = std::max(0.0, mean - 8.0 * sd);
    const double kept = normal_mass(mean, sd, cutoff, std::numeric_limits<double>::infinity());
    for (std::size_t l = 0; l < n; ++l) {
      const double a = std::max(cutoff, grid.edges[l]);
      const double b = grid.edges[l + 1];
      if (b <= a) continue;
      // x^2 f0 is the pulse; F = x^i f0 = x^(i-2) * pulse.
      const double mass = density * normal_mass(mean, sd, a, b) / kept;
      F[l] = mass / grid.widths[l] * std::pow(grid.centers[l], i - 2.0);
    }
  };

  if (const auto* m = std::get_if<spectra::Monoenergetic>(&spectrum.kind())) {
    pulse(to_double(m->energy), options.delta_variance, to_double(m->density));
  } else if (const auto* g = std::get_if<spectra::GaussianPulse>(&spectrum.kind())) {
    pulse(to_double(g->mean), to_double(g->variance), to_double(g->density));
  } else {
    for (std::size_t l = 0; l < n; ++l) {
      const double x = grid.centers[l];
      F[l] = std::pow(x, i) * spectrum.density_at(x);
    }
  }
  for (double v : F) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::kInvalidSpectrum, "initial spectrum is not finite and non-negative on the grid");
    }
  }
  return F;
}

PdeSolution solve_transport(const TransportParams& params, const InitialSpectrum& spectrum,
                            const TemperatureFn& theta, const Grid& grid,
                            const SolverOptions& options) {
  std::string desc = spectrum.describe();
  if (spectrum.is_monoenergetic()) {
    desc += " as gaussian variance=" + number(options.delta_variance);
  }
  return solve_transport(params, initial_number_spectrum(params, spectrum, grid, options),
                         std::move(desc), theta, grid, options);
}

PdeSolution solve_transport(const TransportParams& params, std::vector<double> initial,
                            std::string initial_description, const TemperatureFn& theta,
                            const Grid& grid, const SolverOptions& options) {
  params.validate();
  grid.validate();
  if (initial.size() != grid.cells()) {
    throw Error(ErrorKind::kInvalidArgument, "initial spectrum does not match the grid");
  }
  if (!(options.rel_tol > 0.0) || !(options.min_step > 0.0) || !(options.max_step > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "solver tolerances must be positive");
  }
  theta.check_positive(grid.y_end);

  const TransportOperator op(params, grid);
  const double i = to_double(params.i);

  PdeSolution sol;
  sol.params = params;
  sol.grid = grid;
  sol.initial_description = std::move(initial_description);
  sol.temperature_description = theta.description();
  sol.options = options;
  sol.trace.indices = default_traced_moments(params);
  for (double extra : options.traced_moments) sol.trace.indices.push_back(extra);
  std::sort(sol.trace.indices.begin(), sol.trace.indices.end());
  sol.trace.indices.erase(std::unique(sol.trace.indices.begin(), sol.trace.indices.end()),
                          sol.trace.indices.end());

  std::vector<double> F = std::move(initial);
  double y = 0.0;

  auto record = [&] {
    sol.trace.y.push_back(y);
    sol.trace.theta.push_back(theta(y));
    std::vector<double> row;
    row.reserve(sol.trace.indices.size());
    for (double idx : sol.trace.indices) row.push_back(cell_moment(grid, F, idx - i));
    sol.trace.values.push_back(std::move(row));
  };

  std::size_t next_snapshot = 0;
  auto store_snapshots = [&] {
    while (next_snapshot < grid.snapshots.size() &&
           std::abs(grid.snapshots[next_snapshot] - y) <= kSnapshotMatch * std::max(1.0, y)) {
      sol.snapshots.push_back({grid.snapshots[next_snapshot], F});
      ++next_snapshot;
    }
  };

  auto clip = [&](std::vector<double>& v) {
    const double limit = options.negativity_tolerance * max_abs(v);
    for (double& x : v) {
      if (x >= 0.0) continue;
      if (-x > limit) {
        throw Error(ErrorKind::kPositivityViolation,
                    "F = " + number(x) + " at y = " + number(y) + " exceeds the clip tolerance");
      }
      x = 0.0;
      ++sol.stats.clipped_values;
    }
  };

  record();
  store_snapshots();

  double h = std::min(options.initial_step, options.max_step);
  while (y < grid.y_end) {
    double target = grid.y_end;
    if (next_snapshot < grid.snapshots.size()) target = grid.snapshots[next_snapshot];
    const double step = std::min(h, target - y);
    const bool lands = step == target - y;

    const std::vector<double> full = op.implicit_step(F, theta(y + step), step);
    const std::vector<double> half = op.implicit_step(F, theta(y + 0.5 * step), 0.5 * step);
    std::vector<double> two = op.implicit_step(half, theta(y + step), 0.5 * step);

    double diff = 0.0;
    for (std::size_t l = 0; l < F.size(); ++l) diff = std::max(diff, std::abs(two[l] - full[l]));
    const double scale = std::max(max_abs(two), std::numeric_limits<double>::min());
    const double err = diff / scale;

    if (err <= options.rel_tol) {
      clip(two);
      F = std::move(two);
      y = lands ? target : y + step;
      ++sol.stats.accepted_steps;
      sol.stats.smallest_step =
          sol.stats.accepted_steps == 1 ? step : std::min(sol.stats.smallest_step, step);
      sol.stats.largest_step = std::max(sol.stats.largest_step, step);
      record();
      store_snapshots();
    } else {
      ++sol.stats.rejected_steps;
      if (step <= options.min_step) {
        throw Error(ErrorKind::kStepSizeUnderflow,
                    "step " + number(step) + " at y = " + number(y) + " cannot meet tolerance");
      }
    }
    // Implicit Euler local error is O(h^2).
    const double factor = 0.9 * std::sqrt(options.rel_tol / std::max(err, 1e-300));
    const double grown = step * std::clamp(factor, 0.2, 4.0);
    h = std::clamp(lands && err <= options.rel_tol ? std::max(h, grown) : grown,
                   options.min_step * 0.5, options.max_step);
  }
  return sol;
}

SpectrumCurve photon_spectrum(const PdeSolution& solution, double y) {
  const Snapshot& s = solution.snapshot_at(y);
  if (!solution.params.is_comptonization()) {
    throw Error(ErrorKind::kUnsupportedParams, "photon_spectrum needs Comptonization parameters");
  }
  SpectrumCurve curve;
  curve.y = s.y;
  curve.x = solution.grid.centers;
  const double i = to_double(solution.params.i);
  for (std::size_t l = 0; l < s.number_spectrum.size(); ++l) {
    const double G = s.number_spectrum[l] * std::pow(curve.x[l], 3.0 - i);
    curve.energy_spectrum.push_back(G);
    curve.integral += G * solution.grid.widths[l];
  }
  return curve;
}

}  // namespace tempsep::transport
