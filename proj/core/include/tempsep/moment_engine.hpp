#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tempsep/expression.hpp"
#include "tempsep/rational.hpp"
#include "tempsep/spectra.hpp"

namespace tempsep::moments {

using symbolic::Symbol;
using symbolic::ThetaExpression;

enum class Route { kComptonization, kGeneral };
const char* to_string(Route route);

// Initial derivatives theta^(n)(0), n = 0..M.
struct DerivativeTable {
  std::vector<Rational> values;
  // False when some input moment came from quadrature or a non-rational closed form; the
  // values are then exact consequences of the rounded moments.
  bool exact = true;
  Route route = Route::kComptonization;
  TransportParams params;
  std::string spectrum;
  std::vector<std::string> diagnostics;

  int max_order() const { return static_cast<int>(values.size()) - 1; }
  double value(int n) const { return to_double(values.at(static_cast<std::size_t>(n))); }
  long double value_extended(int n) const {
    return to_long_double(values.at(static_cast<std::size_t>(n)));
  }
  std::string value_string(int n, int digits = 6) const {
    return to_scientific_string(values.at(static_cast<std::size_t>(n)), digits);
  }

  // Same table cut to orders 0..m.
  DerivativeTable truncated(int m) const;
};

// D_n = (2-n)^-1 [ d/dy - (n+1)(n-2) ], the Comptonization moment-raising operator:
// I_{n+1} = theta * D_n I_n. Throws DegenerateIndex for n = 2.
ThetaExpression apply_D(const ThetaExpression& expr, int n);

// I_n(y) / I_3(0) as a polynomial in theta, theta^(1), ..., theta^(n-4); n >= 3.
// Built once per n and shared through a process-wide cache.
ThetaExpression moment_expression(int n);

// I_alpha(0) * theta^(m)(y) as an expression in theta-derivatives and moments I_n(y),
// obtained by differentiating I_alpha m times under the moment equation.
ThetaExpression general_theta_expression(const TransportParams& params, int m);

// Exact theta^(n)(0), n = 0..M, by solving I_n(0)/I_3(0) = moment_expression(n)|_{y=0} for
// the highest derivative, which enters linearly. Comptonization parameters only.
DerivativeTable theta_derivatives_comptonization(const InitialSpectrum& spectrum, int max_order);

// Same table for arbitrary transport parameters via repeated differentiation of
// theta = I_alpha/I_alpha(0), evaluated at y = 0 with the initial moments.
DerivativeTable theta_derivatives_general(const TransportParams& params,
                                          const InitialSpectrum& spectrum, int max_order);

// Template cache shared by both routes. Expressions depend only on (params, order), so the
// same templates serve any number of spectra.
class ExpressionCache {
 public:
  static ExpressionCache& instance();

  ThetaExpression comptonization_moment(int n);
  ThetaExpression general_derivative(const TransportParams& params, int m);

  void clear();

 private:
  std::mutex mutex_;
  std::vector<ThetaExpression> comptonization_;  // index n-3
  std::map<std::string, std::vector<ThetaExpression>> general_;
};

}  // namespace tempsep::moments
