#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tempsep/rational.hpp"
#include "tempsep/spectra.hpp"

namespace tempsep::symbolic {

// Indeterminate of a temperature expression: a derivative theta^(m)(y) or a power moment
// I_n(y). Moment indices are kept as exact fractions so non-integer shifts are representable.
struct Symbol {
  enum class Kind : std::uint8_t { kTheta = 0, kMoment = 1 };

  Kind kind = Kind::kTheta;
  int order = 0;
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Symbol theta(int order);
  static Symbol moment(const Rational& index);

  bool is_theta() const { return kind == Kind::kTheta; }
  bool is_moment() const { return kind == Kind::kMoment; }
  Rational index() const;
  std::string to_string() const;

  auto operator<=>(const Symbol&) const = default;
};

// Sorted (symbol, exponent) pairs with nonzero exponents. theta^(0) may carry a negative
// exponent, which is how the formal inverse 1/theta is tracked.
using Monomial = std::vector<std::pair<Symbol, int>>;

Monomial multiply(const Monomial& a, const Monomial& b);

class Derivation;

// Sparse multivariate polynomial with exact rational coefficients.
class ThetaExpression {
 public:
  using Terms = std::map<Monomial, Rational>;

  ThetaExpression() = default;
  static ThetaExpression constant(const Rational& value);
  static ThetaExpression variable(const Symbol& symbol, int exponent = 1);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& monomial, const Rational& coefficient);

  ThetaExpression& operator+=(const ThetaExpression& other);
  ThetaExpression& operator-=(const ThetaExpression& other);
  ThetaExpression& operator*=(const Rational& factor);
  friend ThetaExpression operator+(ThetaExpression a, const ThetaExpression& b) { return a += b; }
  friend ThetaExpression operator-(ThetaExpression a, const ThetaExpression& b) { return a -= b; }
  friend ThetaExpression operator*(ThetaExpression a, const Rational& s) { return a *= s; }
  friend ThetaExpression operator*(const ThetaExpression& a, const ThetaExpression& b);
  friend bool operator==(const ThetaExpression& a, const ThetaExpression& b) {
    return a.terms_ == b.terms_;
  }

  // d/dy under the given rule: product rule over every factor, each symbol replaced by
  // the rule's expression for its derivative.
  ThetaExpression derivative(const Derivation& rule) const;

  // Highest theta derivative order present, or -1 when none.
  int max_theta_order() const;
  std::set<Symbol> symbols() const;
  std::set<Symbol> moment_symbols() const;

  Rational evaluate(const std::function<Rational(const Symbol&)>& value_of) const;

  std::string to_string() const;

 private:
  Terms terms_;
};

// Split expr = a * s + b for a symbol s that enters linearly, with every other symbol
// substituted. Throws NonlinearSolveImpossible when s appears with exponent other than 1.
struct LinearSplit {
  Rational slope;
  Rational offset;
};
LinearSplit split_linear(const ThetaExpression& expr, const Symbol& unknown,
                         const std::function<Rational(const Symbol&)>& value_of);

// Derivative of a single symbol with respect to y.
class Derivation {
 public:
  // theta^(m) -> theta^(m+1); moment symbols are rejected.
  static Derivation theta_only();
  // theta^(m) -> theta^(m+1) and the moment equation
  //   dI_n/dy = (n-i) [ (n+k-1) I_{n+k-2} - I_{n+j-1} / theta ].
  static Derivation moment_equation(const TransportParams& params);

  ThetaExpression of(const Symbol& symbol) const;

 private:
  bool with_moments_ = false;
  TransportParams params_;
};

}  // namespace tempsep::symbolic
