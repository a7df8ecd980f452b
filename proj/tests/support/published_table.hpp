#pragma once

#include <array>
#include <cmath>

// Published initial derivatives and continued fraction coefficients for the monoenergetic
// (x0 = 4) and bremsstrahlung initial spectra, n = 0..24, as printed (3 significant
// figures for derivatives, 2 decimals for coefficients).
namespace tempsep::testing {

struct TableRow {
  double mono_theta;
  double mono_c;
  double brems_theta;
  double brems_c;
};

inline constexpr std::array<TableRow, 25> kPublished = {{
    {1.00e0, 1.00, 1.00e0, 1.00},
    {2.00e0, -2.00, -6.00e0, 6.00},
    {-1.20e1, 5.00, 1.32e2, 5.00},
    {8.00e0, -1.67, -6.36e3, 11.13},
    {1.87e3, 3.59, 5.29e5, 8.99},
    {-2.99e4, -2.56, -6.68e7, 15.43},
    {-6.85e5, 4.69, 1.18e10, 12.28},
    {4.07e7, -3.56, -2.76e12, 19.62},
    {3.65e8, 4.13, 8.24e14, 15.72},
    {-9.25e10, -3.33, -3.04e17, 23.44},
    {3.42e11, 5.03, 1.36e20, 19.48},
    {3.56e14, -4.77, -7.19e22, 26.87},
    {-6.36e15, 4.53, 4.47e25, 23.51},
    {-2.20e18, -4.30, -3.22e28, 30.09},
    {7.14e19, 5.17, 2.66e31, 27.62},
    {2.10e22, -5.67, -2.49e34, 33.35},
    {-9.31e23, 4.97, 2.64e37, 31.59},
    {-2.96e26, -5.33, -3.13e40, 36.81},
    {1.48e28, 5.20, 4.13e43, 35.34},
    {5.90e30, -6.36, -6.04e46, 40.52},
    {-2.70e32, 6.06, 9.73e49, 38.88},
    {-1.60e35, -10.63, -1.72e53, 44.40},
    {4.98e36, -7.69, 3.32e56, 42.26},
    {5.87e39, -32.83, -6.99e59, 48.45},
    {9.03e40, 23.42, 1.59e63, 45.34},
}};

// True when `value` rounds to the printed 3-significant-figure entry: the difference is
// at most half a unit in the third significant digit of the printed value.
inline bool matches_three_figures(double value, double printed) {
  if (printed == 0.0) return value == 0.0;
  const double unit = std::pow(10.0, std::floor(std::log10(std::abs(printed))) - 2.0);
  return std::abs(value - printed) <= 0.5 * unit * (1.0 + 1e-9);
}

}  // namespace tempsep::testing
