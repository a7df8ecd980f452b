#include "tempsep/expression.hpp"

#include <limits>
#include <sstream>

#include "tempsep/error.hpp"

namespace tempsep::symbolic {

Symbol Symbol::theta(int order) {
  if (order < 0) throw Error(ErrorKind::kInvalidArgument, "negative derivative order");
  Symbol s;
  s.kind = Kind::kTheta;
  s.order = order;
  return s;
}

Symbol Symbol::moment(const Rational& index) {
  Rational canonical = index;
  canonical.canonicalize();
  if (!canonical.get_num().fits_slong_p() || !canonical.get_den().fits_slong_p()) {
    throw Error(ErrorKind::kInvalidArgument, "moment index too large: " + to_exact_string(index));
  }
  Symbol s;
  s.kind = Kind::kMoment;
  s.num = canonical.get_num().get_si();
  s.den = canonical.get_den().get_si();
  return s;
}

Rational Symbol::index() const {
  Rational r(static_cast<long>(num), static_cast<long>(den));
  r.canonicalize();
  return r;
}

std::string Symbol::to_string() const {
  if (is_theta()) return order == 0 ? "theta" : "theta^(" + std::to_string(order) + ")";
  return "I_" + to_exact_string(index());
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == a.end() || ib->first < ia->first) {
      out.push_back(*ib++);
    } else {
      const int e = ia->second + ib->second;
      if (e != 0) out.emplace_back(ia->first, e);
      ++ia;
      ++ib;
    }
  }
  return out;
}

ThetaExpression ThetaExpression::constant(const Rational& value) {
  ThetaExpression e;
  e.add_term({}, value);
  return e;
}

ThetaExpression ThetaExpression::variable(const Symbol& symbol, int exponent) {
  ThetaExpression e;
  if (exponent == 0) {
    e.add_term({}, 1);
  } else {
    e.add_term({{symbol, exponent}}, 1);
  }
  return e;
}

void ThetaExpression::add_term(const Monomial& monomial, const Rational& coefficient) {
  Rational c = coefficient;
  c.canonicalize();
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(monomial, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

ThetaExpression& ThetaExpression::operator+=(const ThetaExpression& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

ThetaExpression& ThetaExpression::operator-=(const ThetaExpression& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

ThetaExpression& ThetaExpression::operator*=(const Rational& factor) {
  Rational f = factor;
  f.canonicalize();
  if (f == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= f;
  return *this;
}

ThetaExpression operator*(const ThetaExpression& a, const ThetaExpression& b) {
  ThetaExpression out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
  }
  return out;
}

ThetaExpression ThetaExpression::derivative(const Derivation& rule) const {
  ThetaExpression out;
  std::map<Symbol, ThetaExpression> cache;
  for (const auto& [mono, coeff] : terms_) {
    for (std::size_t f = 0; f < mono.size(); ++f) {
      const auto& [symbol, exponent] = mono[f];
      auto it = cache.find(symbol);
      if (it == cache.end()) it = cache.emplace(symbol, rule.of(symbol)).first;
      // d(s^e) = e s^(e-1) ds
      Monomial rest = mono;
      if (exponent == 1) {
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(f));
      } else {
        rest[f].second -= 1;
      }
      const Rational scale = coeff * exponent;
      for (const auto& [dm, dc] : it->second.terms_) out.add_term(multiply(rest, dm), scale * dc);
    }
  }
  return out;
}

int ThetaExpression::max_theta_order() const {
  int best = -1;
  for (const auto& [mono, c] : terms_) {
    for (const auto& [s, e] : mono) {
      if (s.is_theta() && s.order > best) best = s.order;
    }
  }
  return best;
}

std::set<Symbol> ThetaExpression::symbols() const {
  std::set<Symbol> out;
  for (const auto& [mono, c] : terms_) {
    for (const auto& [s, e] : mono) out.insert(s);
  }
  return out;
}

std::set<Symbol> ThetaExpression::moment_symbols() const {
  std::set<Symbol> out;
  for (const auto& s : symbols()) {
    if (s.is_moment()) out.insert(s);
  }
  return out;
}

Rational ThetaExpression::evaluate(const std::function<Rational(const Symbol&)>& value_of) const {
  std::map<Symbol, Rational> values;
  Rational total = 0;
  for (const auto& [mono, coeff] : terms_) {
    Rational term = coeff;
    for (const auto& [s, e] : mono) {
      auto it = values.find(s);
      if (it == values.end()) it = values.emplace(s, value_of(s)).first;
      term *= pow(it->second, e);
    }
    total += term;
  }
  return total;
}

std::string ThetaExpression::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, coeff] : terms_) {
    if (!first) os << (coeff < 0 ? " - " : " + ");
    else if (coeff < 0) os << "-";
    first = false;
    const Rational mag = abs(coeff);
    const bool unit = mag == 1 && !mono.empty();
    if (!unit) os << to_exact_string(mag);
    bool first_factor = unit;
    for (const auto& [s, e] : mono) {
      if (!first_factor) os << "*";
      first_factor = false;
      os << s.to_string();
      if (e != 1) os << "^" << e;
    }
  }
  return os.str();
}

LinearSplit split_linear(const ThetaExpression& expr, const Symbol& unknown,
                         const std::function<Rational(const Symbol&)>& value_of) {
  LinearSplit out{0, 0};
  std::map<Symbol, Rational> values;
  for (const auto& [mono, coeff] : expr.terms()) {
    Rational term = coeff;
    bool linear = false;
    for (const auto& [s, e] : mono) {
      if (s == unknown) {
        if (e != 1) {
          throw Error(ErrorKind::kNonlinearSolveImpossible,
                      unknown.to_string() + " enters with exponent " + std::to_string(e));
        }
        linear = true;
        continue;
      }
      auto it = values.find(s);
      if (it == values.end()) it = values.emplace(s, value_of(s)).first;
      term *= pow(it->second, e);
    }
    (linear ? out.slope : out.offset) += term;
  }
  return out;
}

Derivation Derivation::theta_only() { return Derivation(); }

Derivation Derivation::moment_equation(const TransportParams& params) {
  Derivation d;
  d.with_moments_ = true;
  d.params_ = params;
  return d;
}

ThetaExpression Derivation::of(const Symbol& symbol) const {
  if (symbol.is_theta()) return ThetaExpression::variable(Symbol::theta(symbol.order + 1));
  if (!with_moments_) {
    throw Error(ErrorKind::kInvalidArgument,
                "no derivative rule for " + symbol.to_string() + " in a theta-only expression");
  }
  const Rational n = symbol.index();
  const TransportParams& p = params_;
  ThetaExpression gain = ThetaExpression::variable(Symbol::moment(n + p.k - 2)) * ((n - p.i) * (n + p.k - 1));
  ThetaExpression loss;
  loss.add_term({{Symbol::theta(0), -1}, {Symbol::moment(n + p.j - 1), 1}}, -(n - p.i));
  // Monomial keys must be sorted: theta sorts before moments by Kind.
  return gain + loss;
}

}  // namespace tempsep::symbolic
