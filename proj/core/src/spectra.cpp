#include "tempsep/spectra.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tempsep/error.hpp"

namespace tempsep {

namespace {

constexpr double kGaussianCutoffSigmas = 8.0;

std::string fmt(const Rational& r) { return to_exact_string(r); }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Moment exact_moment(Rational v) {
  Moment m;
  m.exact = std::move(v);
  m.is_exact = true;
  m.value = to_double(m.exact);
  return m;
}

Moment float_moment(double v, double err) {
  Moment m;
  m.exact = rational_from_double(v);
  m.is_exact = false;
  m.value = v;
  m.abs_error = err;
  return m;
}

void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

Rational factorial(long n) {
  mpz_class out;
  mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(out);
}

// Adaptive Gauss-Kronrod over [a, b]; accumulates the error estimate.
template <class F>
double integrate(F f, double a, double b, const QuadratureOptions& opt, double& err) {
  double e = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, static_cast<unsigned>(opt.max_depth), opt.rel_tol, &e);
  err += e;
  return v;
}

template <class F>
double integrate_to_infinity(F f, double a, const QuadratureOptions& opt, double& err) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double e = 0.0;
  double l1 = 0.0;
  const double v = integrator.integrate([&](double t) { return f(a + t); }, opt.rel_tol, &e, &l1);
  err += e;
  return v;
}

void check_converged(double value, double err, const QuadratureOptions& opt,
                     const std::string& what) {
  if (!std::isfinite(value) || err > 100.0 * opt.rel_tol * std::max(std::abs(value), 1e-300)) {
    std::ostringstream os;
    os << what << " (estimate " << value << ", error " << err << ")";
    throw Error(ErrorKind::kNonConvergedQuadrature, os.str());
  }
}

// ---- Gaussian pulse --------------------------------------------------------------------

struct GaussianShape {
  double mean;
  double sigma;
  double cutoff;
  double mass;  // fraction of the untruncated Gaussian above the cutoff
};

GaussianShape gaussian_shape(const spectra::GaussianPulse& g) {
  GaussianShape s;
  s.mean = to_double(g.mean);
  s.sigma = std::sqrt(to_double(g.variance));
  s.cutoff = std::max(0.0, s.mean - kGaussianCutoffSigmas * s.sigma);
  s.mass = 0.5 * std::erfc((s.cutoff - s.mean) / (s.sigma * std::sqrt(2.0)));
  return s;
}

double gaussian_pdf(const GaussianShape& s, double x) {
  const double z = (x - s.mean) / s.sigma;
  return std::exp(-0.5 * z * z) / (s.sigma * std::sqrt(2.0 * M_PI));
}

// E[X^m] for an untruncated normal, exact: sum_k C(m,2k) mu^(m-2k) var^k (2k-1)!!.
Rational gaussian_raw_moment(const Rational& mean, const Rational& variance, long m) {
  Rational total = 0;
  mpz_class binom;
  Rational double_factorial = 1;
  for (long k = 0; 2 * k <= m; ++k) {
    if (k > 0) double_factorial *= (2 * k - 1);
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(2 * k));
    total += Rational(binom) * pow(mean, m - 2 * k) * pow(variance, k) * double_factorial;
  }
  return total;
}

Moment gaussian_moment(const spectra::GaussianPulse& g, const Rational& n,
                       const QuadratureOptions& opt) {
  const GaussianShape s = gaussian_shape(g);
  const Rational m = n - 2;
  // Above the cutoff the pulse is the untruncated Gaussian to within exp(-32) of its mass,
  // so integer moments take the exact closed form.
  if (s.cutoff > 0.0 && is_integer(m) && m >= 0) {
    return exact_moment(g.density * gaussian_raw_moment(g.mean, g.variance, m.get_num().get_si()));
  }
  const double md = to_double(m);
  if (s.cutoff == 0.0 && md <= -1.0) {
    throw Error(ErrorKind::kDivergentMoment,
                "Gaussian pulse touching x=0 has divergent moment I_" + fmt(n));
  }
  double err = 0.0;
  const double lo = s.cutoff;
  const double hi = s.mean + 40.0 * s.sigma;
  auto integrand = [&](double x) { return x <= 0.0 ? 0.0 : std::pow(x, md) * gaussian_pdf(s, x); };
  // Split at the mean so the peak is resolved even for narrow pulses.
  double v = 0.0;
  if (lo < s.mean) v += integrate(integrand, lo, s.mean, opt, err);
  v += integrate(integrand, std::max(lo, s.mean), hi, opt, err);
  check_converged(v, err, opt, "Gaussian pulse moment I_" + fmt(n));
  const double scale = to_double(g.density) / s.mass;
  return float_moment(v * scale, err * scale);
}

// ---- Tabulated -------------------------------------------------------------------------

double tabulated_eval(const spectra::Tabulated& t, double x) {
  const auto& xs = t.x;
  const auto& fs = t.f;
  const std::size_t n = xs.size();
  if (x < xs.front()) {
    // Power-law continuation of the first segment towards the origin.
    if (fs[0] > 0.0 && fs[1] > 0.0 && xs[0] > 0.0 && x > 0.0) {
      const double s = std::log(fs[1] / fs[0]) / std::log(xs[1] / xs[0]);
      return fs[0] * std::pow(x / xs[0], s);
    }
    return 0.0;
  }
  if (x >= xs.back()) {
    if (fs[n - 1] > 0.0 && fs[n - 2] > fs[n - 1]) {
      const double lambda = std::log(fs[n - 2] / fs[n - 1]) / (xs[n - 1] - xs[n - 2]);
      return fs[n - 1] * std::exp(-lambda * (x - xs[n - 1]));
    }
    return x == xs.back() ? fs.back() : 0.0;
  }
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t b = static_cast<std::size_t>(it - xs.begin());
  const std::size_t a = b - 1;
  const double xa = xs[a], xb = xs[b], fa = fs[a], fb = fs[b];
  if (fa > 0.0 && fb > 0.0 && xa > 0.0) {
    const double s = std::log(fb / fa) / std::log(xb / xa);
    return fa * std::pow(x / xa, s);
  }
  return fa + (fb - fa) * (x - xa) / (xb - xa);
}

// Integral of x^n f over one interpolation segment, matching tabulated_eval.
double segment_moment(double xa, double xb, double fa, double fb, double n) {
  if (fa > 0.0 && fb > 0.0 && xa > 0.0) {
    const double s = std::log(fb / fa) / std::log(xb / xa);
    const double q = n + s + 1.0;
    if (std::abs(q) < 1e-12) return fa * std::pow(xa, n + 1.0) * std::log(xb / xa);
    // fa xa^(n+1) ((xb/xa)^q - 1) / q, written to keep precision for small q.
    return fa * std::pow(xa, n + 1.0) * std::expm1(q * std::log(xb / xa)) / q;
  }
  // Linear piece: f = fa + m (x - xa).
  const double m = (fb - fa) / (xb - xa);
  const double c = fa - m * xa;
  auto prim = [&](double x) {
    if (x <= 0.0) return 0.0;
    return c * std::pow(x, n + 1.0) / (n + 1.0) + m * std::pow(x, n + 2.0) / (n + 2.0);
  };
  return prim(xb) - prim(xa);
}

Moment tabulated_moment(const spectra::Tabulated& t, const Rational& n,
                        const QuadratureOptions& opt) {
  const double nd = to_double(n);
  const auto& xs = t.x;
  const auto& fs = t.f;
  const std::size_t count = xs.size();
  double err = 0.0;
  double total = 0.0;

  // Head: power law from 0 to the first sample.
  if (xs[0] > 0.0 && fs[0] > 0.0) {
    if (fs[1] <= 0.0) {
      throw Error(ErrorKind::kInvalidSpectrum, "cannot extrapolate tabulated head");
    }
    const double s = std::log(fs[1] / fs[0]) / std::log(xs[1] / xs[0]);
    const double q = nd + s + 1.0;
    if (q <= 0.0) {
      throw Error(ErrorKind::kDivergentMoment,
                  "tabulated head ~x^" + std::to_string(s) + " makes I_" + fmt(n) + " diverge");
    }
    total += fs[0] * std::pow(xs[0], nd + 1.0) / q;
  }
  auto integrand = [&](double x) {
    const double fx = tabulated_eval(t, x);
    if (fx == 0.0) return 0.0;
    return x <= 0.0 ? (nd == 0.0 ? fx : 0.0) : std::pow(x, nd) * fx;
  };
  for (std::size_t a = 0; a + 1 < count; ++a) {
    total += segment_moment(xs[a], xs[a + 1], fs[a], fs[a + 1], nd);
  }
  // Tail: exponential continuation beyond the last sample.
  if (fs[count - 1] > 0.0) {
    if (!(fs[count - 2] > fs[count - 1])) {
      throw Error(ErrorKind::kDivergentMoment,
                  "tabulated spectrum does not decay at its last sample; I_" + fmt(n) +
                      " cannot be extrapolated");
    }
    total += integrate_to_infinity(integrand, xs[count - 1], opt, err);
  }
  check_converged(total, err, opt, "tabulated moment I_" + fmt(n));
  return float_moment(total, err);
}

}  // namespace

// ---- TransportParams -------------------------------------------------------------------

void TransportParams::validate() const {
  const Rational pp = p();
  if (pp == 0) {
    throw Error(ErrorKind::kUnsupportedParams, "p = j - k + 1 must be nonzero");
  }
  if ((i + 1) / pp <= 0) {
    throw Error(ErrorKind::kUnsupportedParams,
                "(i+1)/p must be positive, got " + to_exact_string((i + 1) / pp));
  }
}

std::string TransportParams::describe() const {
  return "i=" + fmt(i) + " j=" + fmt(j) + " k=" + fmt(k) + " alpha=" + fmt(alpha);
}

// ---- InitialSpectrum -------------------------------------------------------------------

InitialSpectrum::InitialSpectrum(Kind kind) : kind_(std::move(kind)) {}

InitialSpectrum InitialSpectrum::bremsstrahlung() { return InitialSpectrum(spectra::Bremsstrahlung{}); }

InitialSpectrum InitialSpectrum::monoenergetic(Rational energy, Rational density) {
  require(energy > 0, ErrorKind::kInvalidSpectrum, "monoenergetic x0 must be positive");
  require(density > 0, ErrorKind::kInvalidSpectrum, "monoenergetic N0 must be positive");
  return InitialSpectrum(spectra::Monoenergetic{std::move(energy), std::move(density)});
}

InitialSpectrum InitialSpectrum::gaussian_pulse(Rational mean, Rational variance, Rational density) {
  require(mean > 0, ErrorKind::kInvalidSpectrum, "Gaussian mean must be positive");
  require(variance > 0, ErrorKind::kInvalidSpectrum, "Gaussian variance must be positive");
  require(density > 0, ErrorKind::kInvalidSpectrum, "Gaussian N0 must be positive");
  return InitialSpectrum(
      spectra::GaussianPulse{std::move(mean), std::move(variance), std::move(density)});
}

InitialSpectrum InitialSpectrum::wien(Rational temperature, Rational density) {
  require(temperature > 0, ErrorKind::kInvalidSpectrum, "Wien temperature must be positive");
  require(density > 0, ErrorKind::kInvalidSpectrum, "Wien N_r must be positive");
  return InitialSpectrum(spectra::Wien{std::move(temperature), std::move(density)});
}

InitialSpectrum InitialSpectrum::tabulated(std::vector<double> x, std::vector<double> f) {
  require(x.size() == f.size(), ErrorKind::kInvalidSpectrum, "x and f0 columns differ in length");
  require(x.size() >= 2, ErrorKind::kInvalidSpectrum, "need at least two samples");
  for (std::size_t n = 0; n < x.size(); ++n) {
    require(std::isfinite(x[n]) && std::isfinite(f[n]), ErrorKind::kInvalidSpectrum,
            "non-finite sample at row " + std::to_string(n + 1));
    require(x[n] >= 0.0, ErrorKind::kInvalidSpectrum,
            "negative abscissa at row " + std::to_string(n + 1));
    require(f[n] >= 0.0, ErrorKind::kInvalidSpectrum,
            "negative f0 at row " + std::to_string(n + 1));
    if (n > 0) {
      require(x[n] > x[n - 1], ErrorKind::kInvalidSpectrum,
              "abscissae not strictly increasing at row " + std::to_string(n + 1));
    }
  }
  return InitialSpectrum(spectra::Tabulated{std::move(x), std::move(f)});
}

std::string InitialSpectrum::name() const {
  return std::visit(Overloaded{
                        [](const spectra::Bremsstrahlung&) { return std::string("bremsstrahlung"); },
                        [](const spectra::Monoenergetic&) { return std::string("monoenergetic"); },
                        [](const spectra::GaussianPulse&) { return std::string("gaussian"); },
                        [](const spectra::Wien&) { return std::string("wien"); },
                        [](const spectra::Tabulated&) { return std::string("tabulated"); },
                    },
                    kind_);
}

std::string InitialSpectrum::describe() const {
  return std::visit(
      Overloaded{
          [](const spectra::Bremsstrahlung&) { return std::string("bremsstrahlung f0=x^-3 exp(-x/4)"); },
          [](const spectra::Monoenergetic& m) {
            return "monoenergetic x0=" + fmt(m.energy) + " N0=" + fmt(m.density);
          },
          [](const spectra::GaussianPulse& g) {
            return "gaussian mean=" + fmt(g.mean) + " variance=" + fmt(g.variance) +
                   " N0=" + fmt(g.density);
          },
          [](const spectra::Wien& w) {
            return "wien T=" + fmt(w.temperature) + " N_r=" + fmt(w.density);
          },
          [](const spectra::Tabulated& t) {
            return "tabulated " + std::to_string(t.x.size()) + " samples";
          },
      },
      kind_);
}

double InitialSpectrum::density_at(double x) const {
  return std::visit(
      Overloaded{
          [x](const spectra::Bremsstrahlung&) { return std::exp(-x / 4.0) / (x * x * x); },
          [](const spectra::Monoenergetic&) -> double {
            throw Error(ErrorKind::kInvalidSpectrum,
                        "the monoenergetic delta has no pointwise density");
          },
          [x](const spectra::GaussianPulse& g) {
            const GaussianShape s = gaussian_shape(g);
            if (x < s.cutoff || x <= 0.0) return 0.0;
            return to_double(g.density) * gaussian_pdf(s, x) / (s.mass * x * x);
          },
          [x](const spectra::Wien& w) {
            const double t = to_double(w.temperature);
            return to_double(w.density) / (2.0 * t * t * t) * std::exp(-x / t);
          },
          [x](const spectra::Tabulated& t) { return tabulated_eval(t, x); },
      },
      kind_);
}

InitialSpectrum read_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kInvalidSpectrum, path + " is empty");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "x,f0") {
    throw Error(ErrorKind::kInvalidSpectrum, path + ": expected header 'x,f0', got '" + line + "'");
  }
  std::vector<double> xs;
  std::vector<double> fs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::kInvalidSpectrum, path + ":" + std::to_string(row) + ": missing comma");
    }
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      xs.push_back(std::stod(a, &used));
      fs.push_back(std::stod(b, &used));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidSpectrum, path + ":" + std::to_string(row) + ": bad number");
    }
  }
  return InitialSpectrum::tabulated(std::move(xs), std::move(fs));
}

// ---- Moments ---------------------------------------------------------------------------

Moment initial_moment(const InitialSpectrum& spectrum, const Rational& n,
                      const QuadratureOptions& options) {
  return std::visit(
      Overloaded{
          [&](const spectra::Bremsstrahlung&) {
            // I_n = Gamma(n-2) 4^(n-2); the x^(n-3) integrand is not integrable at 0 for n <= 2.
            if (n <= 2) {
              throw Error(ErrorKind::kDivergentMoment,
                          "bremsstrahlung moment I_" + fmt(n) + " is infinite (needs n > 2)");
            }
            if (is_integer(n)) {
              const long ni = n.get_num().get_si();
              return exact_moment(factorial(ni - 3) * pow(Rational(4), ni - 2));
            }
            const double nd = to_double(n);
            const double v = std::exp(std::lgamma(nd - 2.0) + (nd - 2.0) * std::log(4.0));
            return float_moment(v, 4.0 * std::numeric_limits<double>::epsilon() * v);
          },
          [&](const spectra::Monoenergetic& m) {
            const Rational shift = n - 2;
            if (is_integer(shift)) {
              return exact_moment(m.density * pow(m.energy, shift.get_num().get_si()));
            }
            const double v = to_double(m.density) * std::pow(to_double(m.energy), to_double(shift));
            return float_moment(v, 4.0 * std::numeric_limits<double>::epsilon() * v);
          },
          [&](const spectra::GaussianPulse& g) { return gaussian_moment(g, n, options); },
          [&](const spectra::Wien& w) {
            // N_r/(2T^3) * Gamma(n+1) T^(n+1)
            if (n <= -1) {
              throw Error(ErrorKind::kDivergentMoment, "Wien moment I_" + fmt(n) + " is infinite");
            }
            if (is_integer(n)) {
              const long ni = n.get_num().get_si();
              if (ni >= 0) {
                return exact_moment(w.density * factorial(ni) * pow(w.temperature, ni - 2) / 2);
              }
            }
            const double nd = to_double(n);
            const double t = to_double(w.temperature);
            const double v =
                to_double(w.density) / 2.0 * std::exp(std::lgamma(nd + 1.0) + (nd - 2.0) * std::log(t));
            return float_moment(v, 4.0 * std::numeric_limits<double>::epsilon() * v);
          },
          [&](const spectra::Tabulated& t) { return tabulated_moment(t, n, options); },
      },
      spectrum.kind());
}

NormalizationReport check_temperature_normalization(const InitialSpectrum& spectrum,
                                                    const TransportParams& params) {
  NormalizationReport report;
  if (!params.is_comptonization()) {
    // theta(0) = I_alpha(0)/I_alpha(0) = 1 holds identically for the general family.
    return report;
  }
  report.applicable = true;
  const Moment i3 = initial_moment(spectrum, 3);
  const Moment i4 = initial_moment(spectrum, 4);
  if (i3.is_exact && i4.is_exact) {
    report.ratio = i4.exact / (4 * i3.exact);
    report.ratio_value = to_double(report.ratio);
    report.pass = report.ratio == 1;
  } else {
    report.ratio_value = i4.value / (4.0 * i3.value);
    report.ratio = rational_from_double(report.ratio_value);
    report.pass = std::abs(report.ratio_value - 1.0) <= 1e-10;
  }
  return report;
}

EquilibriumTemperature equilibrium_temperature(const InitialSpectrum& spectrum,
                                               const TransportParams& params) {
  if (!params.is_comptonization()) {
    throw Error(ErrorKind::kUnsupportedParams,
                "equilibrium temperature needs photon number and energy conservation "
                "(Comptonization parameters)");
  }
  EquilibriumTemperature out;
  Moment i2;
  try {
    i2 = initial_moment(spectrum, 2);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDivergentMoment) throw;
    out.value = 0.0;
    out.exact = Rational(0);
    out.meaningful_steady_state = false;
    return out;
  }
  const Moment i3 = initial_moment(spectrum, 3);
  if (i2.is_exact && i3.is_exact) {
    out.exact = i3.exact / (3 * i2.exact);
    out.value = to_double(*out.exact);
  } else {
    out.value = i3.value / (3.0 * i2.value);
  }
  return out;
}

EquilibriumSpectrum::EquilibriumSpectrum(const TransportParams& params, double number_density,
                                         double temperature)
    : p_(to_double(params.p())), temperature_(temperature) {
  params.validate();
  if (!(temperature > 0.0)) {
    throw Error(ErrorKind::kUnsupportedParams, "equilibrium temperature must be positive");
  }
  if (p_ < 0.0) {
    // exp(-x^p/(pT)) then grows towards x=0 and has no finite number density.
    throw Error(ErrorKind::kUnsupportedParams, "equilibrium spectrum needs p > 0");
  }
  const double a = (to_double(params.i) + 1.0) / p_;
  prefactor_ = number_density * p_ / (std::pow(p_ * temperature, a) * std::tgamma(a));
}

double EquilibriumSpectrum::operator()(double x) const {
  return prefactor_ * std::exp(-std::pow(x, p_) / (p_ * temperature_));
}

EquilibriumSpectrum equilibrium_spectrum(const TransportParams& params, double number_density,
                                         double temperature) {
  return EquilibriumSpectrum(params, number_density, temperature);
}

}  // namespace tempsep
