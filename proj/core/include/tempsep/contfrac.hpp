#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempsep/moment_engine.hpp"
#include "tempsep/rational.hpp"

namespace tempsep::contfrac {

using moments::DerivativeTable;

// Phi_N(y) = sum_{n<=N} theta^(n)(0) y^n / n!, summed exactly and rounded once.
double taylor_eval(const DerivativeTable& table, int level, double y);

// Psi_N(y) = c0 / (1 + c1 y / (1 + c2 y / (... / (1 + cN y)))).
struct ContinuedFraction {
  std::vector<Rational> coefficients;
  // Set when A_{n,0} vanished: the fraction terminates at level n-1 and is exact there.
  std::optional<int> zero_pivot;
  std::vector<std::string> diagnostics;

  int truncation() const { return static_cast<int>(coefficients.size()) - 1; }
  double coefficient(int n) const { return to_double(coefficients.at(static_cast<std::size_t>(n))); }
};

// Coefficients from the two-dimensional quotient-difference style table
//   A_{0,m} = theta^(m)(0)/m!,  A_{1,m} = -A_{0,m+1}/A_{0,0},
//   A_{n,m} = A_{n-2,m+1}/A_{n-2,0} - A_{n-1,m+1}/A_{n-1,0},   c_n = A_{n,0}.
ContinuedFraction cf_coefficients(const DerivativeTable& table);

struct EvalOptions {
  // |denominator| below this fraction of its term scale counts as a pole.
  double pole_tolerance = 1e-12;
  // Used by cf_eval_checked: relative disagreement with the exact value that gets flagged.
  double cross_check_tolerance = 1e-8;
};

// Backward recurrence from the innermost term. Throws PoleHit at a vanishing denominator.
double cf_eval(const ContinuedFraction& cf, int level, double y, const EvalOptions& options = {});

// Double evaluation cross-checked against exact rational evaluation at the same y.
struct CheckedValue {
  double value = 0.0;
  double exact_value = 0.0;
  bool disagreement = false;
};
CheckedValue cf_eval_checked(const ContinuedFraction& cf, int level, double y,
                             const EvalOptions& options = {});

// P(y)/Q(y) == Psi_N(y), coefficients in ascending powers of y; Q(0) = 1.
struct RationalForm {
  std::vector<Rational> numerator;
  std::vector<Rational> denominator;

  int numerator_degree() const { return static_cast<int>(numerator.size()) - 1; }
  int denominator_degree() const { return static_cast<int>(denominator.size()) - 1; }
  double eval(double y) const;
  // Maclaurin coefficients of P/Q through y^order, exact.
  std::vector<Rational> series(int order) const;
};

RationalForm to_rational(const ContinuedFraction& cf, int level);

struct Defect {
  double location = 0.0;
  int multiplicity = 1;
  double residual = 0.0;            // |Q| at the refined root, relative to the term scale
  double numerator_residual = 0.0;  // same for P
};

struct DefectReport {
  std::vector<Defect> defects;
  // Denominator roots matched by a numerator root (removable, not reported as defects).
  std::vector<Defect> cancelled;

  bool empty() const { return defects.empty(); }
};

struct DefectOptions {
  int panels = 4096;
  double root_tolerance = 1e-12;
  double cancel_tolerance = 1e-8;
  // |Q| below this fraction of its scale at a local minimum is a touching (even) root.
  double touch_tolerance = 1e-12;
};

// Real roots of Q in (0, y_max] located by a sign scan and refined by bisection.
DefectReport find_defects(const RationalForm& form, double y_max, const DefectOptions& options = {});

struct LevelDiagnostics {
  int level = 0;
  DefectReport defects;
  bool positive = true;          // Psi_N > 0 on the scan
  double tail_value = 0.0;       // Psi_N(y_max), NaN if a defect prevents evaluation
  bool within_asymptote = true;  // |Psi_N(y_max) - theta_eq| <= tol * theta_eq
};

struct SelectionOptions {
  DefectOptions defects;
  // Admissible levels must end within this relative distance of a positive theta_eq.
  double asymptote_tolerance = 0.05;
  int jobs = 1;
};

struct Selection {
  int level = 0;
  // True when no N >= 1 survived and the constant Psi_0 was returned.
  bool no_admissible = false;
  // True when no defect-free level met the asymptote tolerance and the closest was taken.
  bool asymptote_fallback = false;
  std::vector<LevelDiagnostics> levels;
};

// Largest defect-free, positive level; when theta_eq > 0 is supplied, restricted to levels
// whose value at y_max lies within the asymptote tolerance. Levels <= 0 for theta_eq mean
// "no usable asymptote" (e.g. theta_eq = 0 when the photon number diverges).
Selection select_approximant(const ContinuedFraction& cf, double y_max,
                             std::optional<double> theta_eq, const SelectionOptions& options = {});

}  // namespace tempsep::contfrac
