#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempsep/spectra.hpp"
#include "tempsep/transport.hpp"

namespace CLI {
class App;
}

namespace tempsep::cli {

// Every field maps to a long option of the same name (underscores become hyphens) and to
// a key of the flat config file; command-line flags override the file.
struct RunConfig {
  std::string spectrum = "monoenergetic";
  std::string energy = "4";
  std::string density = "1";
  std::string mean = "4";
  std::string variance = "1/100";
  std::string temperature = "1";
  std::string table;

  std::string i = "2";
  std::string j = "2";
  std::string k = "2";
  std::string alpha = "4";
  std::string route = "auto";

  int M = 24;
  double y_max = 2.0;
  std::string N = "auto";
  std::string theta = "auto";
  std::vector<int> taylor_N;
  std::vector<int> cf_N;
  int curve_points = 201;
  double asymptote_tolerance = 0.05;

  double x_min = 1e-3;
  double x_max = 50.0;
  int cells = 400;
  int snapshots = 21;
  double rel_tol = 1e-6;
  double delta_variance = 0.01;

  double tolerance = 0.02;
  double ode_tolerance = 0.03;

  std::string output = "out";
  int jobs = 1;
};

void register_options(CLI::App& app, RunConfig& config);

// Reads a flat key = value file with the same keys as the long options.
RunConfig load_config(const std::string& path);

// Checks ranges and formats; throws Error(InvalidArgument) naming the offending field.
void validate(const RunConfig& config);

TransportParams make_params(const RunConfig& config);
InitialSpectrum make_spectrum(const RunConfig& config);
transport::Grid make_grid(const RunConfig& config);
transport::SolverOptions make_solver_options(const RunConfig& config);

// "auto", "cf:N", "taylor:N" or "constant:V".
struct ThetaChoice {
  enum class Kind { kAuto, kContinuedFraction, kTaylor, kConstant } kind = Kind::kAuto;
  int level = 0;
  double value = 0.0;
};
ThetaChoice parse_theta(const std::string& text);

// "auto" or a non-negative integer.
std::optional<int> parse_level(const std::string& text);

}  // namespace tempsep::cli
