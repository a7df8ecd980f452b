#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>

#include "tempsep/error.hpp"
#include "tempsep/spectra.hpp"

namespace tempsep {
namespace {

double reference_integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13);
}

TEST(TransportParams, ComptonizationDefaults) {
  const auto p = TransportParams::comptonization();
  EXPECT_TRUE(p.is_comptonization());
  EXPECT_EQ(p.p(), 1);
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.describe(), "i=2 j=2 k=2 alpha=4");
}

TEST(TransportParams, RejectsZeroOrWrongSignP) {
  TransportParams p;
  p.j = 1;  // p = j - k + 1 = 0
  EXPECT_THROW(p.validate(), Error);
  p.j = 0;
  p.k = 3;  // p = -2, (i+1)/p < 0
  EXPECT_THROW(p.validate(), Error);
}

TEST(Spectra, BremsstrahlungMomentsMatchQuadrature) {
  const auto s = InitialSpectrum::bremsstrahlung();
  for (int n = 3; n <= 8; ++n) {
    const Moment m = initial_moment(s, n);
    ASSERT_TRUE(m.is_exact);
    double err = 0.0;
    const double ref = boost::math::quadrature::exp_sinh<double>().integrate(
        [n](double x) {
          const double e = std::exp(-x / 4.0);
          return e == 0.0 ? 0.0 : std::pow(x, n - 3) * e;
        },
        0.0,
        std::numeric_limits<double>::infinity(), 1e-13, &err);
    EXPECT_NEAR(m.value / ref, 1.0, 1e-10) << "n=" << n;
  }
  EXPECT_EQ(initial_moment(s, 3).exact, 4);
  EXPECT_EQ(initial_moment(s, 4).exact, 16);
  EXPECT_THROW(initial_moment(s, 2), Error);
}

TEST(Spectra, BremsstrahlungFractionalMoment) {
  const Moment m = initial_moment(InitialSpectrum::bremsstrahlung(), Rational(7, 2));
  EXPECT_FALSE(m.is_exact);
  EXPECT_NEAR(m.value, std::tgamma(1.5) * std::pow(4.0, 1.5), 1e-12);
}

TEST(Spectra, MonoenergeticMoments) {
  const auto s = InitialSpectrum::monoenergetic();
  EXPECT_EQ(initial_moment(s, 2).exact, 1);
  EXPECT_EQ(initial_moment(s, 3).exact, 4);
  EXPECT_EQ(initial_moment(s, 4).exact, 16);
  EXPECT_EQ(initial_moment(s, 10).exact, 65536);
  EXPECT_THROW(InitialSpectrum::monoenergetic(0), Error);
  EXPECT_THROW(s.density_at(4.0), Error);
}

TEST(Spectra, GaussianExactMomentsAgreeWithQuadrature) {
  const auto s = InitialSpectrum::gaussian_pulse(4, Rational(1, 100), 1);
  const Moment m3 = initial_moment(s, 3);
  EXPECT_TRUE(m3.is_exact);
  EXPECT_EQ(m3.exact, 4);
  EXPECT_EQ(initial_moment(s, 4).exact, Rational(1601, 100));
  const double ref = reference_integral([&](double x) { return std::pow(x, 5) * s.density_at(x); },
                                        3.0, 5.0);
  EXPECT_NEAR(initial_moment(s, 5).value / ref, 1.0, 1e-9);
  const Moment frac = initial_moment(s, Rational(5, 2));
  EXPECT_FALSE(frac.is_exact);
  const double ref_frac = reference_integral(
      [&](double x) { return std::pow(x, 2.5) * s.density_at(x); }, 3.0, 5.0);
  EXPECT_NEAR(frac.value / ref_frac, 1.0, 1e-9);
}

// Narrowing the pulse moves every moment monotonically towards the line value.
TEST(Spectra, GaussianMomentsApproachMonoenergetic) {
  const auto line = InitialSpectrum::monoenergetic(4, 1);
  const auto wide = InitialSpectrum::gaussian_pulse(4, Rational(1, 100), 1);
  const auto narrow = InitialSpectrum::gaussian_pulse(4, Rational(1, 10000), 1);
  for (int n = 2; n <= 8; ++n) {
    const Rational target = initial_moment(line, n).exact;
    const Rational d_wide = abs(initial_moment(wide, n).exact - target);
    const Rational d_narrow = abs(initial_moment(narrow, n).exact - target);
    EXPECT_LE(d_narrow, d_wide) << "n=" << n;
    if (n > 3) EXPECT_LT(d_narrow * 50, d_wide) << "n=" << n;
  }
}

TEST(Spectra, WienMoments) {
  const auto s = InitialSpectrum::wien(Rational(4, 3), 1);
  EXPECT_EQ(initial_moment(s, 2).exact, 1);
  EXPECT_EQ(initial_moment(s, 3).exact, 4);
  const double ref = reference_integral([&](double x) { return x * x * x * s.density_at(x); }, 0, 80);
  EXPECT_NEAR(ref, 4.0, 1e-10);
}

TEST(Spectra, TabulatedWienReproducesMoments) {
  std::vector<double> x;
  std::vector<double> f;
  const auto w = InitialSpectrum::wien(1, 1);
  for (int n = 0; n <= 4000; ++n) {
    const double xn = 1e-4 * std::pow(60.0 / 1e-4, n / 4000.0);
    x.push_back(xn);
    f.push_back(w.density_at(xn));
  }
  const auto t = InitialSpectrum::tabulated(x, f);
  for (int n : {2, 3, 4, 6}) {
    const Moment m = initial_moment(t, n);
    EXPECT_FALSE(m.is_exact);
    EXPECT_NEAR(m.value / initial_moment(w, n).value, 1.0, 1e-5) << "n=" << n;
  }
}

TEST(Spectra, TabulatedValidation) {
  EXPECT_THROW(InitialSpectrum::tabulated({1, 1}, {1, 1}), Error);
  EXPECT_THROW(InitialSpectrum::tabulated({1, 2}, {1, -1}), Error);
  EXPECT_THROW(InitialSpectrum::tabulated({1}, {1}), Error);
}

TEST(Spectra, ReadsTabulatedCsv) {
  const auto path = std::filesystem::temp_directory_path() / "tempsep_tab.csv";
  {
    std::ofstream out(path);
    out << "x,f0\n0.5,2\n1,1\n2,0.25\n";
  }
  const auto s = read_tabulated_csv(path.string());
  EXPECT_EQ(s.name(), "tabulated");
  EXPECT_NEAR(s.density_at(1.0), 1.0, 1e-14);
  {
    std::ofstream out(path);
    out << "energy,f\n1,1\n";
  }
  EXPECT_THROW(read_tabulated_csv(path.string()), Error);
  std::filesystem::remove(path);
}

TEST(Spectra, TemperatureNormalization) {
  const auto params = TransportParams::comptonization();
  EXPECT_TRUE(check_temperature_normalization(InitialSpectrum::monoenergetic(), params).pass);
  EXPECT_TRUE(check_temperature_normalization(InitialSpectrum::bremsstrahlung(), params).pass);
  const auto off = check_temperature_normalization(InitialSpectrum::monoenergetic(5), params);
  EXPECT_FALSE(off.pass);
  EXPECT_EQ(off.ratio, Rational(5, 4));
  TransportParams general;
  general.alpha = 3;
  EXPECT_FALSE(check_temperature_normalization(InitialSpectrum::monoenergetic(5), general).applicable);
}

TEST(Spectra, EquilibriumTemperature) {
  const auto mono = equilibrium_temperature(InitialSpectrum::monoenergetic());
  ASSERT_TRUE(mono.exact.has_value());
  EXPECT_EQ(*mono.exact, Rational(4, 3));
  EXPECT_TRUE(mono.meaningful_steady_state);
  const auto brems = equilibrium_temperature(InitialSpectrum::bremsstrahlung());
  EXPECT_EQ(brems.value, 0.0);
  EXPECT_FALSE(brems.meaningful_steady_state);
  TransportParams general;
  general.alpha = 3;
  EXPECT_THROW(equilibrium_temperature(InitialSpectrum::monoenergetic(), general), Error);
}

TEST(Spectra, EquilibriumSpectrumIsNormalized) {
  TransportParams p;
  p.i = 1;
  p.j = 3;
  p.k = 2;  // p = 2
  const auto eq = equilibrium_spectrum(p, 2.5, 0.7);
  const double number =
      reference_integral([&](double x) { return std::pow(x, 1.0) * eq(x); }, 0.0, 30.0);
  EXPECT_NEAR(number, 2.5, 1e-10);
  const auto wien = equilibrium_spectrum(TransportParams::comptonization(), 1.0, 4.0 / 3.0);
  EXPECT_NEAR(wien(1.0), InitialSpectrum::wien(Rational(4, 3)).density_at(1.0), 1e-15);
  EXPECT_THROW(equilibrium_spectrum(p, 1.0, 0.0), Error);
}

}  // namespace
}  // namespace tempsep
