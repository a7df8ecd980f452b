#include "tempsep/contfrac.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "tempsep/error.hpp"

namespace tempsep::contfrac {

namespace {

void check_level(const ContinuedFraction& cf, int level) {
  if (level < 0 || level > cf.truncation()) {
    throw Error(ErrorKind::kInvalidArgument, "level " + std::to_string(level) +
                                                 " outside 0.." + std::to_string(cf.truncation()));
  }
}

using Poly = std::vector<Rational>;

Poly add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), Rational(0));
  for (std::size_t n = 0; n < a.size(); ++n) out[n] += a[n];
  for (std::size_t n = 0; n < b.size(); ++n) out[n] += b[n];
  return out;
}

// c * y * a(y)
Poly shift_scale(const Poly& a, const Rational& c) {
  Poly out(a.size() + 1, Rational(0));
  for (std::size_t n = 0; n < a.size(); ++n) out[n + 1] = c * a[n];
  return out;
}

void trim(Poly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

struct LongPoly {
  std::vector<long double> c;

  explicit LongPoly(const std::vector<Rational>& exact) {
    c.reserve(exact.size());
    for (const auto& v : exact) c.push_back(to_long_double(v));
  }
  long double value(long double y) const {
    long double acc = 0.0L;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * y + *it;
    return acc;
  }
  // sum |c_k| y^k, the magnitude against which cancellation is judged
  long double scale(long double y) const {
    long double acc = 0.0L;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * y + std::fabs(*it);
    return acc;
  }
  long double derivative(long double y, int order) const {
    long double acc = 0.0L;
    const int deg = static_cast<int>(c.size()) - 1;
    for (int k = deg; k >= order; --k) {
      long double falling = 1.0L;
      for (int q = 0; q < order; ++q) falling *= static_cast<long double>(k - q);
      acc = acc * y + c[static_cast<std::size_t>(k)] * falling;
    }
    return acc;
  }
  int degree() const { return static_cast<int>(c.size()) - 1; }
};

int estimate_multiplicity(const LongPoly& q, long double root, long double span) {
  const long double s = std::max(q.scale(root), std::numeric_limits<long double>::min());
  int m = 1;
  long double factorial = 1.0L;
  while (m < q.degree()) {
    factorial *= m;
    const long double d = std::fabs(q.derivative(root, m)) * std::pow(span, m) / factorial;
    if (d > 1e-6L * s) break;
    ++m;
  }
  return m;
}

Defect make_defect(const LongPoly& p, const LongPoly& q, long double root, long double span) {
  Defect d;
  d.location = static_cast<double>(root);
  d.multiplicity = estimate_multiplicity(q, root, span);
  const long double sq = std::max(q.scale(root), std::numeric_limits<long double>::min());
  const long double sp = std::max(p.scale(root), std::numeric_limits<long double>::min());
  d.residual = static_cast<double>(std::fabs(q.value(root)) / sq);
  d.numerator_residual = static_cast<double>(std::fabs(p.value(root)) / sp);
  return d;
}

LevelDiagnostics diagnose_level(const ContinuedFraction& cf, int level, double y_max,
                                std::optional<double> theta_eq, const SelectionOptions& options) {
  LevelDiagnostics diag;
  diag.level = level;
  const RationalForm form = to_rational(cf, level);
  diag.defects = find_defects(form, y_max, options.defects);

  const LongPoly p(form.numerator);
  for (int s = 1; s <= options.defects.panels; ++s) {
    const long double y = static_cast<long double>(y_max) * s / options.defects.panels;
    if (p.value(y) <= 0.0L) {
      diag.positive = false;
      break;
    }
  }
  if (p.c.front() <= 0.0L) diag.positive = false;

  try {
    diag.tail_value = cf_eval(cf, level, y_max);
  } catch (const Error&) {
    diag.tail_value = std::numeric_limits<double>::quiet_NaN();
  }
  if (theta_eq && *theta_eq > 0.0) {
    diag.within_asymptote = std::isfinite(diag.tail_value) &&
                            std::abs(diag.tail_value - *theta_eq) <= options.asymptote_tolerance * *theta_eq;
  }
  return diag;
}

}  // namespace

double taylor_eval(const DerivativeTable& table, int level, double y) {
  if (level < 0 || level > table.max_order()) {
    throw Error(ErrorKind::kInvalidArgument, "Taylor level " + std::to_string(level) +
                                                 " exceeds table order " + std::to_string(table.max_order()));
  }
  const Rational yy = rational_from_double(y);
  Rational total = 0;
  Rational power = 1;
  Rational factorial = 1;
  for (int n = 0; n <= level; ++n) {
    if (n > 0) {
      power *= yy;
      factorial *= n;
    }
    total += table.values[static_cast<std::size_t>(n)] * power / factorial;
  }
  return to_double(total);
}

ContinuedFraction cf_coefficients(const DerivativeTable& table) {
  const int order = table.max_order();
  if (order < 0) throw Error(ErrorKind::kInvalidArgument, "empty derivative table");

  std::vector<Rational> prev2;
  std::vector<Rational> prev;
  Rational factorial = 1;
  prev.reserve(static_cast<std::size_t>(order) + 1);
  for (int m = 0; m <= order; ++m) {
    if (m > 0) factorial *= m;
    prev.push_back(table.values[static_cast<std::size_t>(m)] / factorial);
  }
  if (prev[0] == 0) {
    throw Error(ErrorKind::kZeroPivot, "A_{0,0} = theta(0) = 0; no continued fraction exists");
  }

  ContinuedFraction cf;
  cf.coefficients.push_back(prev[0]);
  for (int n = 1; n <= order; ++n) {
    std::vector<Rational> row(static_cast<std::size_t>(order - n + 1));
    for (int m = 0; m <= order - n; ++m) {
      const auto mm = static_cast<std::size_t>(m);
      if (n == 1) {
        row[mm] = -prev[mm + 1] / prev[0];
      } else {
        row[mm] = prev2[mm + 1] / prev2[0] - prev[mm + 1] / prev[0];
      }
    }
    if (row[0] == 0) {
      cf.zero_pivot = n;
      cf.diagnostics.push_back("ZeroPivot at n=" + std::to_string(n) +
                               ": fraction terminates at level " + std::to_string(n - 1));
      break;
    }
    cf.coefficients.push_back(row[0]);
    prev2 = std::move(prev);
    prev = std::move(row);
  }
  return cf;
}

double cf_eval(const ContinuedFraction& cf, int level, double y, const EvalOptions& options) {
  check_level(cf, level);
  const auto c = [&](int n) { return cf.coefficient(n); };
  if (level == 0) return c(0);
  const auto pole = [&] {
    return Error(ErrorKind::kPoleHit,
                 "Psi_" + std::to_string(level) + " has a pole near y=" + std::to_string(y));
  };
  double t = 1.0 + c(level) * y;
  for (int n = level - 1; n >= 1; --n) {
    if (std::abs(t) < options.pole_tolerance * std::max(1.0, std::abs(c(n + 1) * y))) throw pole();
    t = 1.0 + c(n) * y / t;
  }
  if (std::abs(t) < options.pole_tolerance * std::max(1.0, std::abs(c(1) * y))) throw pole();
  return c(0) / t;
}

CheckedValue cf_eval_checked(const ContinuedFraction& cf, int level, double y,
                             const EvalOptions& options) {
  CheckedValue out;
  out.value = cf_eval(cf, level, y, options);
  const Rational yy = rational_from_double(y);
  Rational t = 1;
  for (int n = level; n >= 1; --n) {
    t = 1 + cf.coefficients[static_cast<std::size_t>(n)] * yy / t;
    if (t == 0) throw Error(ErrorKind::kPoleHit, "exact pole of Psi_" + std::to_string(level));
  }
  out.exact_value = to_double(cf.coefficients[0] / t);
  const double scale = std::max(std::abs(out.exact_value), std::numeric_limits<double>::min());
  out.disagreement = std::abs(out.value - out.exact_value) > options.cross_check_tolerance * scale;
  return out;
}

double RationalForm::eval(double y) const {
  const LongPoly p(numerator);
  const LongPoly q(denominator);
  const long double qy = q.value(y);
  if (qy == 0.0L) throw Error(ErrorKind::kPoleHit, "denominator vanishes");
  return static_cast<double>(p.value(y) / qy);
}

std::vector<Rational> RationalForm::series(int order) const {
  std::vector<Rational> s(static_cast<std::size_t>(order) + 1, Rational(0));
  for (int k = 0; k <= order; ++k) {
    Rational v = k < static_cast<int>(numerator.size()) ? numerator[static_cast<std::size_t>(k)] : Rational(0);
    for (int j = 1; j <= k && j < static_cast<int>(denominator.size()); ++j) {
      v -= denominator[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(k - j)];
    }
    s[static_cast<std::size_t>(k)] = v / denominator[0];
  }
  return s;
}

RationalForm to_rational(const ContinuedFraction& cf, int level) {
  check_level(cf, level);
  // Convergents of 0 + c0/(1 + c1 y/(1 + ...)): X_n = X_{n-1} + c_{n-1} y X_{n-2}.
  Poly p_prev{Rational(0)};
  Poly q_prev{Rational(1)};
  Poly p_cur{cf.coefficients[0]};
  Poly q_cur{Rational(1)};
  for (int n = 1; n <= level; ++n) {
    const Rational& c = cf.coefficients[static_cast<std::size_t>(n)];
    Poly p_next = add(p_cur, shift_scale(p_prev, c));
    Poly q_next = add(q_cur, shift_scale(q_prev, c));
    p_prev = std::move(p_cur);
    q_prev = std::move(q_cur);
    p_cur = std::move(p_next);
    q_cur = std::move(q_next);
  }
  trim(p_cur);
  trim(q_cur);
  return RationalForm{std::move(p_cur), std::move(q_cur)};
}

DefectReport find_defects(const RationalForm& form, double y_max, const DefectOptions& options) {
  if (!(y_max > 0.0)) throw Error(ErrorKind::kInvalidArgument, "y_max must be positive");
  DefectReport report;
  const LongPoly p(form.numerator);
  const LongPoly q(form.denominator);
  if (q.degree() < 1) return report;

  const int panels = std::max(options.panels, 1);
  const long double ymax = y_max;
  const long double span = ymax;
  std::vector<long double> ys(static_cast<std::size_t>(panels) + 1);
  std::vector<long double> qs(ys.size());
  std::vector<long double> rel(ys.size());
  for (int s = 0; s <= panels; ++s) {
    ys[static_cast<std::size_t>(s)] = ymax * s / panels;
    qs[static_cast<std::size_t>(s)] = q.value(ys[static_cast<std::size_t>(s)]);
    rel[static_cast<std::size_t>(s)] =
        std::fabs(qs[static_cast<std::size_t>(s)]) /
        std::max(q.scale(ys[static_cast<std::size_t>(s)]), std::numeric_limits<long double>::min());
  }

  auto record = [&](long double root) {
    Defect d = make_defect(p, q, root, span);
    if (d.numerator_residual < options.cancel_tolerance) {
      report.cancelled.push_back(d);
    } else {
      report.defects.push_back(d);
    }
  };

  for (int s = 1; s <= panels; ++s) {
    const auto a = static_cast<std::size_t>(s - 1);
    const auto b = static_cast<std::size_t>(s);
    if (qs[b] == 0.0L) {
      record(ys[b]);
      continue;
    }
    if (qs[a] == 0.0L) continue;  // recorded on the previous panel (or y = 0, excluded)
    if ((qs[a] < 0.0L) != (qs[b] < 0.0L)) {
      long double lo = ys[a];
      long double hi = ys[b];
      long double qlo = qs[a];
      while (hi - lo > options.root_tolerance) {
        const long double mid = 0.5L * (lo + hi);
        const long double qm = q.value(mid);
        if (qm == 0.0L) {
          lo = hi = mid;
          break;
        }
        if ((qm < 0.0L) == (qlo < 0.0L)) {
          lo = mid;
          qlo = qm;
        } else {
          hi = mid;
        }
      }
      record(0.5L * (lo + hi));
      continue;
    }
    // Touching roots leave no sign change; catch them at local minima of |Q|/scale.
    if (s < panels && rel[b] <= rel[a] && rel[b] <= rel[b + 1] &&
        (qs[b] < 0.0L) == (qs[b + 1] < 0.0L)) {
      long double lo = ys[a];
      long double hi = ys[b + 1];
      const long double g = 0.5L * (std::sqrt(5.0L) - 1.0L);
      auto f = [&](long double y) {
        return std::fabs(q.value(y)) / std::max(q.scale(y), std::numeric_limits<long double>::min());
      };
      for (int it = 0; it < 200 && hi - lo > options.root_tolerance; ++it) {
        const long double x1 = hi - g * (hi - lo);
        const long double x2 = lo + g * (hi - lo);
        if (f(x1) < f(x2)) {
          hi = x2;
        } else {
          lo = x1;
        }
      }
      const long double root = 0.5L * (lo + hi);
      if (f(root) < options.touch_tolerance) {
        Defect d = make_defect(p, q, root, span);
        d.multiplicity = std::max(d.multiplicity, 2);
        if (d.numerator_residual < options.cancel_tolerance) {
          report.cancelled.push_back(d);
        } else {
          report.defects.push_back(d);
        }
      }
    }
  }
  return report;
}

Selection select_approximant(const ContinuedFraction& cf, double y_max,
                             std::optional<double> theta_eq, const SelectionOptions& options) {
  if (cf.coefficients.empty()) throw Error(ErrorKind::kInvalidArgument, "empty continued fraction");
  Selection sel;
  const int top = cf.truncation();
  sel.levels.resize(static_cast<std::size_t>(top) + 1);

  if (options.jobs > 1) {
    std::vector<std::future<LevelDiagnostics>> pending;
    pending.reserve(sel.levels.size());
    for (int n = 0; n <= top; ++n) {
      pending.push_back(std::async(std::launch::async, [&, n] {
        return diagnose_level(cf, n, y_max, theta_eq, options);
      }));
      if (static_cast<int>(pending.size()) >= options.jobs) {
        for (auto& f : pending) {
          LevelDiagnostics d = f.get();
          sel.levels[static_cast<std::size_t>(d.level)] = std::move(d);
        }
        pending.clear();
      }
    }
    for (auto& f : pending) {
      LevelDiagnostics d = f.get();
      sel.levels[static_cast<std::size_t>(d.level)] = std::move(d);
    }
  } else {
    for (int n = 0; n <= top; ++n) {
      sel.levels[static_cast<std::size_t>(n)] = diagnose_level(cf, n, y_max, theta_eq, options);
    }
  }

  std::vector<int> admissible;
  for (int n = 1; n <= top; ++n) {
    const auto& d = sel.levels[static_cast<std::size_t>(n)];
    if (d.defects.empty() && d.positive && std::isfinite(d.tail_value)) admissible.push_back(n);
  }
  if (admissible.empty()) {
    sel.level = 0;
    sel.no_admissible = top >= 1;
    return sel;
  }

  const bool use_asymptote = theta_eq && *theta_eq > 0.0;
  if (!use_asymptote) {
    sel.level = admissible.back();
    return sel;
  }
  for (auto it = admissible.rbegin(); it != admissible.rend(); ++it) {
    if (sel.levels[static_cast<std::size_t>(*it)].within_asymptote) {
      sel.level = *it;
      return sel;
    }
  }
  // Nothing within tolerance: take the closest, ties to even N and then to larger N.
  sel.asymptote_fallback = true;
  int best = admissible.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (int n : admissible) {
    const double score = std::abs(sel.levels[static_cast<std::size_t>(n)].tail_value - *theta_eq);
    const bool better = score < best_score - 1e-15 ||
                        (std::abs(score - best_score) <= 1e-15 &&
                         ((n % 2 == 0 && best % 2 != 0) || (n % 2 == best % 2 && n > best)));
    if (better) {
      best = n;
      best_score = score;
    }
  }
  sel.level = best;
  return sel;
}

}  // namespace tempsep::contfrac
