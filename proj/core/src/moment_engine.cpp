#include "tempsep/moment_engine.hpp"

#include "tempsep/error.hpp"

namespace tempsep::moments {

namespace {

constexpr int kDocumentedMaxOrder = 24;

std::string cache_key(const TransportParams& p) { return p.describe(); }

void check_order(int max_order) {
  if (max_order < 0) throw Error(ErrorKind::kInvalidArgument, "M must be non-negative");
}

}  // namespace

const char* to_string(Route route) {
  return route == Route::kComptonization ? "comptonization" : "general";
}

DerivativeTable DerivativeTable::truncated(int m) const {
  if (m < 0 || m > max_order()) throw Error(ErrorKind::kInvalidArgument, "truncation out of range");
  DerivativeTable out = *this;
  out.values.resize(static_cast<std::size_t>(m) + 1);
  return out;
}

ThetaExpression apply_D(const ThetaExpression& expr, int n) {
  if (n == 2) throw Error(ErrorKind::kDegenerateIndex, "D_n divides by 2-n; n = 2 is excluded");
  ThetaExpression out = expr.derivative(symbolic::Derivation::theta_only());
  out -= expr * Rational((n + 1) * (n - 2));
  Rational scale(1, 2 - n);
  scale.canonicalize();
  out *= scale;
  return out;
}

ExpressionCache& ExpressionCache::instance() {
  static ExpressionCache cache;
  return cache;
}

void ExpressionCache::clear() {
  std::lock_guard lock(mutex_);
  comptonization_.clear();
  general_.clear();
}

ThetaExpression ExpressionCache::comptonization_moment(int n) {
  if (n < 3) throw Error(ErrorKind::kInvalidArgument, "moment expressions start at n = 3");
  std::lock_guard lock(mutex_);
  if (comptonization_.empty()) comptonization_.push_back(ThetaExpression::constant(1));
  const ThetaExpression theta = ThetaExpression::variable(Symbol::theta(0));
  while (static_cast<int>(comptonization_.size()) <= n - 3) {
    const int m = static_cast<int>(comptonization_.size()) + 2;  // index of the last entry
    comptonization_.push_back(theta * apply_D(comptonization_.back(), m));
  }
  return comptonization_[static_cast<std::size_t>(n - 3)];
}

ThetaExpression ExpressionCache::general_derivative(const TransportParams& params, int m) {
  if (m < 0) throw Error(ErrorKind::kInvalidArgument, "negative derivative order");
  std::lock_guard lock(mutex_);
  auto& chain = general_[cache_key(params)];
  if (chain.empty()) chain.push_back(ThetaExpression::variable(Symbol::moment(params.alpha)));
  const auto rule = symbolic::Derivation::moment_equation(params);
  while (static_cast<int>(chain.size()) <= m) chain.push_back(chain.back().derivative(rule));
  return chain[static_cast<std::size_t>(m)];
}

ThetaExpression moment_expression(int n) { return ExpressionCache::instance().comptonization_moment(n); }

ThetaExpression general_theta_expression(const TransportParams& params, int m) {
  return ExpressionCache::instance().general_derivative(params, m);
}

DerivativeTable theta_derivatives_comptonization(const InitialSpectrum& spectrum, int max_order) {
  check_order(max_order);
  const TransportParams params = TransportParams::comptonization();
  const NormalizationReport norm = check_temperature_normalization(spectrum, params);
  if (!norm.pass) {
    throw Error(ErrorKind::kNormalizationViolated,
                "I_4(0)/(4 I_3(0)) = " + to_exact_string(norm.ratio) + ", expected 1");
  }

  DerivativeTable table;
  table.route = Route::kComptonization;
  table.params = params;
  table.spectrum = spectrum.describe();
  if (max_order > kDocumentedMaxOrder) {
    table.diagnostics.push_back("M > 24: expression size grows quickly; expect long runtimes");
  }

  const Moment i3 = initial_moment(spectrum, 3);
  table.exact = i3.is_exact;
  for (int n = 4; n <= max_order + 4; ++n) {
    const Moment in = initial_moment(spectrum, n);
    table.exact = table.exact && in.is_exact;
    const Rational target = in.exact / i3.exact;

    const int top = n - 4;
    const ThetaExpression expr = moment_expression(n);
    const auto split = symbolic::split_linear(expr, Symbol::theta(top), [&](const Symbol& s) {
      return table.values.at(static_cast<std::size_t>(s.order));
    });
    if (split.slope == 0) {
      throw Error(ErrorKind::kNonlinearSolveImpossible,
                  "coefficient of theta^(" + std::to_string(top) + ") vanishes in I_" +
                      std::to_string(n));
    }
    table.values.push_back((target - split.offset) / split.slope);
  }
  return table;
}

DerivativeTable theta_derivatives_general(const TransportParams& params,
                                          const InitialSpectrum& spectrum, int max_order) {
  check_order(max_order);
  DerivativeTable table;
  table.route = Route::kGeneral;
  table.params = params;
  table.spectrum = spectrum.describe();
  if (params.alpha_degenerate()) {
    table.diagnostics.push_back("DegenerateAlpha: alpha == i, theta is constant");
  }
  if (max_order > kDocumentedMaxOrder) {
    table.diagnostics.push_back("M > 24: expression size grows quickly; expect long runtimes");
  }

  std::map<Symbol, Moment> moment_cache;
  auto moment_of = [&](const Symbol& s) -> const Moment& {
    auto it = moment_cache.find(s);
    if (it == moment_cache.end()) {
      it = moment_cache.emplace(s, initial_moment(spectrum, s.index())).first;
      table.exact = table.exact && it->second.is_exact;
    }
    return it->second;
  };

  const Rational i_alpha = moment_of(Symbol::moment(params.alpha)).exact;
  if (i_alpha == 0) {
    throw Error(ErrorKind::kNonlinearSolveImpossible, "I_alpha(0) = 0, theta is undefined");
  }

  table.values.push_back(1);
  for (int m = 1; m <= max_order; ++m) {
    const ThetaExpression expr = general_theta_expression(params, m);
    const Rational scaled = expr.evaluate([&](const Symbol& s) -> Rational {
      if (s.is_moment()) return moment_of(s).exact;
      return table.values.at(static_cast<std::size_t>(s.order));
    });
    table.values.push_back(scaled / i_alpha);
  }
  return table;
}

}  // namespace tempsep::moments
