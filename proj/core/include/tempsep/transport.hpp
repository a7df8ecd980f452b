#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tempsep/contfrac.hpp"
#include "tempsep/spectra.hpp"

namespace tempsep::transport {

// Cell-centred finite-volume mesh in x plus the y span and the snapshot times.
struct Grid {
  std::vector<double> edges;    // cells.size() + 1 entries, strictly increasing, edges[0] > 0
  std::vector<double> centers;  // arithmetic midpoints of the cells
  std::vector<double> widths;
  double y_end = 2.0;
  std::vector<double> snapshots;  // sorted, within [0, y_end]

  std::size_t cells() const { return centers.size(); }
  void validate() const;
};

// Logarithmically spaced cells on [x_min, x_max] and `snapshot_count` uniform snapshot
// times on [0, y_end] (both ends included).
Grid make_log_grid(double x_min, double x_max, int cells, double y_end, int snapshot_count);

// theta(y) handed to the linear solve.
class TemperatureFn {
 public:
  enum class Kind { kContinuedFraction, kTaylor, kConstant, kCallable };

  static TemperatureFn continued_fraction(contfrac::ContinuedFraction cf, int level);
  static TemperatureFn taylor(moments::DerivativeTable table, int level);
  static TemperatureFn constant(double value);
  static TemperatureFn callable(std::function<double(double)> fn, std::string description);

  double operator()(double y) const { return fn_(y); }
  Kind kind() const { return kind_; }
  const std::string& description() const { return description_; }

  // Dense sampling of [0, y_end]; throws NonPositiveTemperature on the first theta <= 0.
  void check_positive(double y_end, int samples = 4001) const;

 private:
  TemperatureFn(Kind kind, std::function<double(double)> fn, std::string description);

  Kind kind_;
  std::function<double(double)> fn_;
  std::string description_;
};

struct FokkerPlanck {
  double drift;      // d<x>/dy = (i+k) x^(k-1) - x^j / theta
  double diffusion;  // d sigma^2/dy = 2 x^k
};

FokkerPlanck drift_diffusion(const TransportParams& params, double theta, double x);

// Discrete spatial operator L(theta) with dF/dy = L F. Interface fluxes use exponential
// fitting (the Chang-Cooper / Scharfetter-Gummel weighting), so f ~ exp(-x^p/(p theta)) at
// the cell centres is an exact discrete steady state; zero flux at both boundaries.
class TransportOperator {
 public:
  TransportOperator(const TransportParams& params, const Grid& grid);

  // Tridiagonal coefficients of L at temperature theta: row l reads
  // lower[l] F_{l-1} + diag[l] F_l + upper[l] F_{l+1}.
  struct Bands {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
  };
  Bands assemble(double theta) const;

  std::vector<double> apply(std::span<const double> number_spectrum, double theta) const;

  // Solves (I - h L(theta)) F_new = F_old.
  std::vector<double> implicit_step(std::span<const double> number_spectrum, double theta,
                                    double h) const;

 private:
  double i_;
  double p_;
  const Grid* grid_;
  std::vector<double> interface_coeff_;  // x_{l+1/2}^(i+k) / (x_{l+1} - x_l)
  std::vector<double> center_power_;     // x_l^p / p  (or ln x_l when p = 0)
  std::vector<double> inv_xi_;           // x_l^-i
};

struct SolverOptions {
  double rel_tol = 1e-6;
  double initial_step = 1e-6;
  double min_step = 1e-14;
  double max_step = 0.05;
  // Negative values down to this fraction of max F are clipped to zero and counted.
  double negativity_tolerance = 1e-12;
  // Variance of the Gaussian that stands in for a monoenergetic delta on the mesh.
  double delta_variance = 0.01;
  // Moment indices recorded at every accepted step (besides N_r = I_i and I_3).
  std::vector<double> traced_moments = {2, 3, 4, 5, 6};
};

// Traced indices for the moment-equation check: n, n+k-2, n+j-1 for n in {3,4,5}, plus
// i, alpha and 3.
std::vector<double> default_traced_moments(const TransportParams& params);

struct Snapshot {
  double y = 0.0;
  std::vector<double> number_spectrum;  // F = x^i f, cell averages
};

struct MomentTrace {
  std::vector<double> y;
  std::vector<double> theta;
  std::vector<double> indices;
  std::vector<std::vector<double>> values;  // values[t][m] = I_{indices[m]}(y[t])

  std::vector<double> series(double index) const;
};

struct SolverStats {
  long accepted_steps = 0;
  long rejected_steps = 0;
  long clipped_values = 0;
  double smallest_step = 0.0;
  double largest_step = 0.0;
};

struct PdeSolution {
  TransportParams params;
  Grid grid;
  std::string initial_description;
  std::string temperature_description;
  std::vector<Snapshot> snapshots;
  MomentTrace trace;
  SolverStats stats;
  SolverOptions options;

  const Snapshot& snapshot_at(double y) const;  // throws SnapshotMissing
  // I_n by the same cell rule the solver traces: sum F_l x_l^(n-i) dx_l.
  double moment(const Snapshot& snapshot, double n) const;
  std::vector<double> number_density_trace() const;  // N_r = I_i
  std::vector<double> energy_trace() const;          // I_3
};

// Cell values of F = x^i f0 on the grid. Pulses (monoenergetic, Gaussian) are integrated
// over each cell so their photon number is exact; other spectra are sampled at centres.
std::vector<double> initial_number_spectrum(const TransportParams& params,
                                            const InitialSpectrum& spectrum, const Grid& grid,
                                            const SolverOptions& options = {});

PdeSolution solve_transport(const TransportParams& params, const InitialSpectrum& spectrum,
                            const TemperatureFn& theta, const Grid& grid,
                            const SolverOptions& options = {});

// Same solve from an explicit initial number spectrum.
PdeSolution solve_transport(const TransportParams& params, std::vector<double> initial,
                            std::string initial_description, const TemperatureFn& theta,
                            const Grid& grid, const SolverOptions& options = {});

struct SpectrumCurve {
  double y = 0.0;
  std::vector<double> x;
  std::vector<double> energy_spectrum;  // G = x^3 f
  double integral = 0.0;                // sum G dx over cells
};

// G(x, y) = x^3 f(x, y) at a stored snapshot; Comptonization parameters.
SpectrumCurve photon_spectrum(const PdeSolution& solution, double y);

}  // namespace tempsep::transport
