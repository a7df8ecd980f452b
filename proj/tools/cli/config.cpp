#include "config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>

#include "tempsep/error.hpp"

namespace tempsep::cli {

namespace {

[[noreturn]] void reject(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::kInvalidArgument, "config field '" + field + "': " + why);
}

Rational rational_field(const std::string& field, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const Error&) {
    reject(field, "'" + text + "' is not a rational number");
  }
}

int int_after_colon(const std::string& text, std::size_t colon) {
  int value = -1;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || value < 0) reject("theta", "bad level in '" + text + "'");
  return value;
}

}  // namespace

void register_options(CLI::App& app, RunConfig& c) {
  app.add_option("--spectrum", c.spectrum,
                 "monoenergetic, bremsstrahlung, gaussian, wien or tabulated")
      ->capture_default_str();
  app.add_option("--energy", c.energy, "monoenergetic photon energy x0")->capture_default_str();
  app.add_option("--density", c.density, "photon number density N0")->capture_default_str();
  app.add_option("--mean", c.mean, "gaussian pulse mean")->capture_default_str();
  app.add_option("--variance", c.variance, "gaussian pulse variance")->capture_default_str();
  app.add_option("--temperature", c.temperature, "wien temperature")->capture_default_str();
  app.add_option("--table", c.table, "CSV file with header x,f0 for the tabulated spectrum");

  app.add_option("--i", c.i, "exponent i")->capture_default_str();
  app.add_option("--j", c.j, "exponent j")->capture_default_str();
  app.add_option("--k", c.k, "exponent k")->capture_default_str();
  app.add_option("--alpha", c.alpha, "temperature moment index")->capture_default_str();
  app.add_option("--route", c.route, "auto, comptonization or general")->capture_default_str();

  app.add_option("--M", c.M, "highest derivative order")->capture_default_str();
  app.add_option("--y-max", c.y_max, "end of the y range")->capture_default_str();
  app.add_option("--N", c.N, "continued fraction level, or auto")->capture_default_str();
  app.add_option("--theta", c.theta, "auto, cf:N, taylor:N or constant:V")->capture_default_str();
  app.add_option("--taylor-N", c.taylor_N, "Taylor levels to sample")->delimiter(',');
  app.add_option("--cf-N", c.cf_N, "continued fraction levels to sample (default: all)")
      ->delimiter(',');
  app.add_option("--curve-points", c.curve_points, "samples per curve")->capture_default_str();
  app.add_option("--asymptote-tolerance", c.asymptote_tolerance,
                 "relative window around theta_eq for automatic level selection")
      ->capture_default_str();

  app.add_option("--x-min", c.x_min, "lower grid edge")->capture_default_str();
  app.add_option("--x-max", c.x_max, "upper grid edge")->capture_default_str();
  app.add_option("--cells", c.cells, "number of grid cells")->capture_default_str();
  app.add_option("--snapshots", c.snapshots, "uniform snapshot count on [0, y-max]")
      ->capture_default_str();
  app.add_option("--rel-tol", c.rel_tol, "step-doubling tolerance")->capture_default_str();
  app.add_option("--delta-variance", c.delta_variance,
                 "variance of the pulse replacing a monoenergetic line")
      ->capture_default_str();

  app.add_option("--tolerance", c.tolerance, "self-consistency tolerance")->capture_default_str();
  app.add_option("--ode-tolerance", c.ode_tolerance, "moment equation residual tolerance")
      ->capture_default_str();

  app.add_option("--output", c.output, "output directory")->capture_default_str();
  app.add_option("--jobs", c.jobs, "worker threads for level sweeps")->capture_default_str();
}

RunConfig load_config(const std::string& path) {
  RunConfig config;
  CLI::App app;
  app.set_config("--config");
  app.allow_config_extras(CLI::config_extras_mode::error);
  register_options(app, config);
  try {
    app.parse(std::vector<std::string>{path, "--config"});
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::kInvalidArgument, path + ": " + e.what());
  }
  return config;
}

void validate(const RunConfig& c) {
  static const std::vector<std::string> spectra = {"monoenergetic", "bremsstrahlung", "gaussian",
                                                   "wien", "tabulated"};
  if (std::find(spectra.begin(), spectra.end(), c.spectrum) == spectra.end()) {
    reject("spectrum", "unknown spectrum '" + c.spectrum + "'");
  }
  if (c.spectrum == "tabulated" && c.table.empty()) reject("table", "required for tabulated");
  if (c.route != "auto" && c.route != "comptonization" && c.route != "general") {
    reject("route", "expected auto, comptonization or general");
  }
  if (c.M < 0) reject("M", "must be non-negative");
  if (!(c.y_max > 0.0)) reject("y-max", "must be positive");
  if (const auto n = parse_level(c.N); n && *n > c.M) reject("N", "exceeds M");
  parse_theta(c.theta);
  for (int n : c.taylor_N) {
    if (n < 0 || n > c.M) reject("taylor-N", "levels must lie in [0, M]");
  }
  for (int n : c.cf_N) {
    if (n < 0 || n > c.M) reject("cf-N", "levels must lie in [0, M]");
  }
  if (c.curve_points < 2) reject("curve-points", "need at least 2");
  if (!(c.asymptote_tolerance > 0.0)) reject("asymptote-tolerance", "must be positive");
  if (!(c.x_min > 0.0)) reject("x-min", "must be positive");
  if (!(c.x_max > c.x_min)) reject("x-max", "must exceed x-min");
  if (c.cells < 2) reject("cells", "need at least 2");
  if (c.snapshots < 2) reject("snapshots", "need at least 2");
  if (!(c.rel_tol > 0.0)) reject("rel-tol", "must be positive");
  if (!(c.delta_variance > 0.0)) reject("delta-variance", "must be positive");
  if (!(c.tolerance > 0.0)) reject("tolerance", "must be positive");
  if (!(c.ode_tolerance > 0.0)) reject("ode-tolerance", "must be positive");
  if (c.jobs < 1) reject("jobs", "must be at least 1");
  if (c.output.empty()) reject("output", "must not be empty");

  for (const auto& [name, text] : {std::pair{"energy", &c.energy}, {"density", &c.density},
                                   {"mean", &c.mean}, {"variance", &c.variance},
                                   {"temperature", &c.temperature}, {"i", &c.i}, {"j", &c.j},
                                   {"k", &c.k}, {"alpha", &c.alpha}}) {
    rational_field(name, *text);
  }
  try {
    make_params(c).validate();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("config fields 'i', 'j', 'k': ") + e.what());
  }
}

TransportParams make_params(const RunConfig& c) {
  TransportParams p;
  p.i = rational_field("i", c.i);
  p.j = rational_field("j", c.j);
  p.k = rational_field("k", c.k);
  p.alpha = rational_field("alpha", c.alpha);
  return p;
}

InitialSpectrum make_spectrum(const RunConfig& c) {
  if (c.spectrum == "monoenergetic") {
    return InitialSpectrum::monoenergetic(rational_field("energy", c.energy),
                                          rational_field("density", c.density));
  }
  if (c.spectrum == "bremsstrahlung") return InitialSpectrum::bremsstrahlung();
  if (c.spectrum == "gaussian") {
    return InitialSpectrum::gaussian_pulse(rational_field("mean", c.mean),
                                           rational_field("variance", c.variance),
                                           rational_field("density", c.density));
  }
  if (c.spectrum == "wien") {
    return InitialSpectrum::wien(rational_field("temperature", c.temperature),
                                 rational_field("density", c.density));
  }
  if (c.spectrum == "tabulated") return read_tabulated_csv(c.table);
  reject("spectrum", "unknown spectrum '" + c.spectrum + "'");
}

transport::Grid make_grid(const RunConfig& c) {
  return transport::make_log_grid(c.x_min, c.x_max, c.cells, c.y_max, c.snapshots);
}

transport::SolverOptions make_solver_options(const RunConfig& c) {
  transport::SolverOptions o;
  o.rel_tol = c.rel_tol;
  o.delta_variance = c.delta_variance;
  return o;
}

ThetaChoice parse_theta(const std::string& text) {
  ThetaChoice t;
  if (text == "auto") return t;
  const auto colon = text.find(':');
  if (colon == std::string::npos) reject("theta", "expected auto, cf:N, taylor:N or constant:V");
  const std::string head = text.substr(0, colon);
  if (head == "cf") {
    t.kind = ThetaChoice::Kind::kContinuedFraction;
    t.level = int_after_colon(text, colon);
  } else if (head == "taylor") {
    t.kind = ThetaChoice::Kind::kTaylor;
    t.level = int_after_colon(text, colon);
  } else if (head == "constant") {
    t.kind = ThetaChoice::Kind::kConstant;
    try {
      t.value = to_double(parse_rational(text.substr(colon + 1)));
    } catch (const Error&) {
      reject("theta", "bad constant in '" + text + "'");
    }
    if (!(t.value > 0.0)) reject("theta", "constant temperature must be positive");
  } else {
    reject("theta", "unknown form '" + head + "'");
  }
  return t;
}

std::optional<int> parse_level(const std::string& text) {
  if (text == "auto") return std::nullopt;
  int value = -1;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    reject("N", "expected auto or a non-negative integer");
  }
  return value;
}

}  // namespace tempsep::cli
