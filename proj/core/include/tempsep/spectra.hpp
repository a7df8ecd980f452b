#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tempsep/rational.hpp"

namespace tempsep {

// Exponents of the transport family
//   dF/dy = d/dx { x^i [ x^j f / theta + x^k df/dx ] },  theta(y) = I_alpha(y) / I_alpha(0).
// Comptonization (Kompaneets with a self-consistent electron temperature) is i=j=k=2, alpha=4.
struct TransportParams {
  Rational i{2};
  Rational j{2};
  Rational k{2};
  Rational alpha{4};

  static TransportParams comptonization() { return {}; }

  Rational p() const { return j - k + 1; }
  bool is_comptonization() const { return i == 2 && j == 2 && k == 2 && alpha == 4; }
  // alpha == i makes every derivative of theta beyond the zeroth vanish.
  bool alpha_degenerate() const { return alpha == i; }
  // Throws UnsupportedParams unless (i+1)/p > 0.
  void validate() const;

  std::string describe() const;
};

namespace spectra {

// Optically thin bremsstrahlung, f0 = x^-3 exp(-x/4).
struct Bremsstrahlung {};

// f0 = N0 x0^-2 delta(x - x0).
struct Monoenergetic {
  Rational energy{4};
  Rational density{1};
};

// Photon number spectrum x^2 f0 is a Gaussian of the given mean and variance carrying
// `density` photons. The pulse is cut at max(0, mean - 8 sigma) and renormalized.
struct GaussianPulse {
  Rational mean{4};
  Rational variance{Rational(1, 100)};
  Rational density{1};
};

// Wien form f0 = N_r / (2 T^3) exp(-x/T): the Comptonization equilibrium at temperature T.
struct Wien {
  Rational temperature{1};
  Rational density{1};
};

// Sampled f0(x) with strictly increasing abscissae; interpolated log-linearly where both
// neighbours are positive, linearly otherwise, and extrapolated past the last sample
// with an exponential or power-law tail fitted to the last two points.
struct Tabulated {
  std::vector<double> x;
  std::vector<double> f;
};

}  // namespace spectra

class InitialSpectrum {
 public:
  using Kind = std::variant<spectra::Bremsstrahlung, spectra::Monoenergetic,
                            spectra::GaussianPulse, spectra::Wien, spectra::Tabulated>;

  static InitialSpectrum bremsstrahlung();
  static InitialSpectrum monoenergetic(Rational energy = 4, Rational density = 1);
  static InitialSpectrum gaussian_pulse(Rational mean, Rational variance, Rational density = 1);
  static InitialSpectrum wien(Rational temperature, Rational density = 1);
  static InitialSpectrum tabulated(std::vector<double> x, std::vector<double> f);

  const Kind& kind() const { return kind_; }
  std::string name() const;
  std::string describe() const;

  bool is_monoenergetic() const { return std::holds_alternative<spectra::Monoenergetic>(kind_); }

  // Pointwise f0(x). Not defined for the monoenergetic delta.
  double density_at(double x) const;

 private:
  explicit InitialSpectrum(Kind kind);
  Kind kind_;
};

// Reads a two-column CSV with header "x,f0".
InitialSpectrum read_tabulated_csv(const std::string& path);

// I_n(0) of an initial spectrum. `exact` holds the exact rational whenever one exists;
// otherwise `value` is a quadrature or floating closed-form result and `exact` is the
// dyadic rational of that double.
struct Moment {
  Rational exact;
  bool is_exact = true;
  double value = 0.0;
  double abs_error = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-12;
  int max_depth = 15;
};

Moment initial_moment(const InitialSpectrum& spectrum, const Rational& n,
                      const QuadratureOptions& options = {});

struct NormalizationReport {
  bool applicable = false;  // only Comptonization carries a constraint on f0
  bool pass = true;
  Rational ratio{1};        // I_4(0) / (4 I_3(0))
  double ratio_value = 1.0;
};

NormalizationReport check_temperature_normalization(const InitialSpectrum& spectrum,
                                                    const TransportParams& params);

struct EquilibriumTemperature {
  double value = 0.0;
  std::optional<Rational> exact;
  // False when the photon number diverges (e.g. bremsstrahlung): theta_eq is then 0.
  bool meaningful_steady_state = true;
};

// theta_eq = I_3(0) / (3 I_2(0)); relies on photon number and energy conservation, so it is
// only available for Comptonization parameters.
EquilibriumTemperature equilibrium_temperature(
    const InitialSpectrum& spectrum,
    const TransportParams& params = TransportParams::comptonization());

// Normalized exponential steady state of the transport family:
//   f_eq(x) = N_r p / ((p T)^((i+1)/p) Gamma((i+1)/p)) exp(-x^p / (p T)).
class EquilibriumSpectrum {
 public:
  EquilibriumSpectrum(const TransportParams& params, double number_density, double temperature);

  double operator()(double x) const;
  double prefactor() const { return prefactor_; }
  double temperature() const { return temperature_; }

 private:
  double p_;
  double temperature_;
  double prefactor_;
};

EquilibriumSpectrum equilibrium_spectrum(const TransportParams& params, double number_density,
                                         double temperature);

}  // namespace tempsep
