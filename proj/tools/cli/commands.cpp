#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <future>
#include <optional>
#include <ostream>

#include "tempsep/contfrac.hpp"
#include "tempsep/error.hpp"
#include "tempsep/io.hpp"
#include "tempsep/verify.hpp"

namespace tempsep::cli {

namespace {

using contfrac::ContinuedFraction;
using contfrac::Selection;
using moments::DerivativeTable;
using transport::PdeSolution;
using transport::TemperatureFn;

std::string path(const RunConfig& c, const std::string& name) { return c.output + "/" + name; }

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Lazily built stages shared by the commands.
class Pipeline {
 public:
  explicit Pipeline(const RunConfig& config)
      : config_(config), params_(make_params(config)), spectrum_(make_spectrum(config)) {}

  const RunConfig& config() const { return config_; }
  const TransportParams& params() const { return params_; }
  const InitialSpectrum& spectrum() const { return spectrum_; }

  const DerivativeTable& table() {
    if (!table_) {
      const bool compton = config_.route == "comptonization" ||
                           (config_.route == "auto" && params_.is_comptonization());
      if (compton && !params_.is_comptonization()) {
        throw Error(ErrorKind::kUnsupportedParams,
                    "route comptonization needs i=j=k=2, alpha=4; got " + params_.describe());
      }
      table_ = compton ? moments::theta_derivatives_comptonization(spectrum_, config_.M)
                       : moments::theta_derivatives_general(params_, spectrum_, config_.M);
    }
    return *table_;
  }

  const ContinuedFraction& fraction() {
    if (!cf_) cf_ = contfrac::cf_coefficients(table());
    return *cf_;
  }

  std::optional<double> theta_eq() const {
    if (!params_.is_comptonization()) return std::nullopt;
    const auto eq = equilibrium_temperature(spectrum_, params_);
    if (!eq.meaningful_steady_state || !(eq.value > 0.0)) return std::nullopt;
    return eq.value;
  }

  const Selection& selection() {
    if (!selection_) {
      contfrac::SelectionOptions opts;
      opts.asymptote_tolerance = config_.asymptote_tolerance;
      opts.jobs = config_.jobs;
      selection_ = contfrac::select_approximant(fraction(), config_.y_max, theta_eq(), opts);
    }
    return *selection_;
  }

  int level() {
    if (const auto n = parse_level(config_.N)) {
      if (*n > fraction().truncation()) {
        throw Error(ErrorKind::kZeroPivot, "continued fraction terminates at level " +
                                               std::to_string(fraction().truncation()));
      }
      return *n;
    }
    return selection().level;
  }

  const TemperatureFn& theta() {
    if (!theta_) {
      const ThetaChoice choice = parse_theta(config_.theta);
      switch (choice.kind) {
        case ThetaChoice::Kind::kAuto:
          theta_ = TemperatureFn::continued_fraction(fraction(), level());
          break;
        case ThetaChoice::Kind::kContinuedFraction:
          theta_ = TemperatureFn::continued_fraction(fraction(), choice.level);
          break;
        case ThetaChoice::Kind::kTaylor:
          theta_ = TemperatureFn::taylor(table(), choice.level);
          break;
        case ThetaChoice::Kind::kConstant:
          theta_ = TemperatureFn::constant(choice.value);
          break;
      }
    }
    return *theta_;
  }

  const PdeSolution& solution() {
    if (!solution_) {
      solution_ = transport::solve_transport(params_, spectrum_, theta(), make_grid(config_),
                                             make_solver_options(config_));
    }
    return *solution_;
  }

  // Photon number is not a meaningful conserved quantity when it diverges initially.
  bool number_meaningful() const {
    if (!params_.is_comptonization()) return true;
    return equilibrium_temperature(spectrum_, params_).meaningful_steady_state;
  }

 private:
  RunConfig config_;
  TransportParams params_;
  InitialSpectrum spectrum_;
  std::optional<DerivativeTable> table_;
  std::optional<ContinuedFraction> cf_;
  std::optional<Selection> selection_;
  std::optional<TemperatureFn> theta_;
  std::optional<PdeSolution> solution_;
};

std::vector<double> sample_points(const RunConfig& c) {
  std::vector<double> y;
  for (int s = 0; s < c.curve_points; ++s) y.push_back(c.y_max * s / (c.curve_points - 1));
  return y;
}

std::vector<io::CurvePoint> sample_levels(const std::vector<int>& levels, int jobs,
                                          const std::vector<double>& ys,
                                          const std::function<double(int, double)>& eval) {
  auto one = [&](int level) {
    std::vector<io::CurvePoint> out;
    for (double y : ys) {
      double v = std::nan("");
      try {
        v = eval(level, y);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kPoleHit) throw;
      }
      out.push_back({y, v, level});
    }
    return out;
  };
  std::vector<std::vector<io::CurvePoint>> parts(levels.size());
  if (jobs <= 1) {
    for (std::size_t l = 0; l < levels.size(); ++l) parts[l] = one(levels[l]);
  } else {
    std::vector<std::future<std::vector<io::CurvePoint>>> futures;
    for (std::size_t start = 0; start < levels.size(); start += static_cast<std::size_t>(jobs)) {
      futures.clear();
      const std::size_t end = std::min(levels.size(), start + static_cast<std::size_t>(jobs));
      for (std::size_t l = start; l < end; ++l) {
        futures.push_back(std::async(std::launch::async, one, levels[l]));
      }
      for (std::size_t l = start; l < end; ++l) parts[l] = futures[l - start].get();
    }
  }
  std::vector<io::CurvePoint> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

void write_derivs(Pipeline& p, std::ostream& log) {
  const auto& table = p.table();
  const auto& c = p.config();
  io::write_text(path(c, "derivatives.json"), io::to_json(table).dump(2) + "\n");
  std::string csv = "n,theta_n\n";
  for (int n = 0; n <= table.max_order(); ++n) {
    csv += std::to_string(n) + "," + table.value_string(n, 6) + "\n";
  }
  io::write_text(path(c, "derivatives.csv"), csv);
  log << "derivs: " << table.spectrum << ", route " << moments::to_string(table.route)
      << ", orders 0.." << table.max_order() << (table.exact ? " (exact)" : " (from rounded moments)")
      << "\n";
  for (const auto& d : table.diagnostics) log << "  note: " << d << "\n";
}

void write_cf(Pipeline& p, std::ostream& log) {
  const auto& c = p.config();
  const auto& table = p.table();
  const auto& cf = p.fraction();
  const auto& sel = p.selection();
  io::write_text(path(c, "continued_fraction.json"), io::to_json(cf).dump(2) + "\n");
  io::write_text(path(c, "table.csv"), io::table_csv(table, cf));
  io::write_text(path(c, "selection.json"), io::to_json(sel).dump(2) + "\n");

  const auto ys = sample_points(c);
  std::vector<int> cf_levels = c.cf_N;
  if (cf_levels.empty()) {
    for (int n = 0; n <= cf.truncation(); ++n) cf_levels.push_back(n);
  }
  for (int n : cf_levels) {
    if (n > cf.truncation()) {
      throw Error(ErrorKind::kZeroPivot,
                  "continued fraction terminates at level " + std::to_string(cf.truncation()));
    }
  }
  io::write_text(path(c, "cf_curves.csv"),
                 io::curve_csv(sample_levels(cf_levels, c.jobs, ys, [&](int n, double y) {
                   return contfrac::cf_eval(cf, n, y);
                 })));
  if (!c.taylor_N.empty()) {
    io::write_text(path(c, "taylor_curves.csv"),
                   io::curve_csv(sample_levels(c.taylor_N, c.jobs, ys, [&](int n, double y) {
                     return contfrac::taylor_eval(table, n, y);
                   })));
  }
  log << "cf: c_0..c_" << cf.truncation() << ", selected N = " << sel.level;
  if (sel.no_admissible) log << " (no admissible level)";
  if (sel.asymptote_fallback) log << " (closest to theta_eq)";
  log << "\n";
  std::string defective;
  for (const auto& l : sel.levels) {
    if (!l.defects.empty()) defective += " " + std::to_string(l.level);
  }
  if (!defective.empty()) log << "  levels with defects on (0, " << c.y_max << "]:" << defective << "\n";
}

void write_solve(Pipeline& p, std::ostream& log) {
  const auto& c = p.config();
  const auto& sol = p.solution();
  auto manifest = io::manifest_json(sol);
  manifest["created_utc"] = utc_now();
  io::write_text(path(c, "manifest.json"), manifest.dump(2) + "\n");
  for (const auto& s : sol.snapshots) {
    io::write_text(path(c, "snapshots/snapshot_y" + fixed(s.y, 4) + ".csv"), io::snapshot_csv(sol, s));
  }
  const auto cons = verify::conservation_report(sol, p.number_meaningful());
  log << "solve: " << sol.temperature_description << ", " << sol.stats.accepted_steps
      << " steps, " << sol.snapshots.size() << " snapshots, N_r drift "
      << io::format_short(cons.number_drift, 3) << ", I_3 drift "
      << io::format_short(cons.energy_drift, 3) << "\n";
}

bool write_verify(Pipeline& p, std::ostream& log) {
  const auto& c = p.config();
  const auto report =
      verify::self_consistency(p.solution(), p.theta(), c.tolerance, p.number_meaningful());
  const auto ode = verify::moment_ode_check(p.solution(), {3, 4, 5}, c.ode_tolerance);
  io::write_text(path(c, "verification.json"), io::to_json(report).dump(2) + "\n");
  io::write_text(path(c, "verification.csv"), io::verification_csv(report));
  io::write_text(path(c, "moment_ode.json"), io::to_json(ode).dump(2) + "\n");
  log << "verify: max |theta_out - theta_in| / theta_in = "
      << io::format_short(report.max_rel_dev, 3) << " at y = " << report.worst_y << " ("
      << (report.pass ? "pass" : "FAIL") << " at " << c.tolerance << "); moment equation residual "
      << io::format_short(ode.max_residual, 3) << " (" << (ode.pass ? "pass" : "FAIL") << " at "
      << c.ode_tolerance << ")\n";
  return report.pass && ode.pass;
}

}  // namespace

int cmd_derivs(const RunConfig& config, std::ostream& log) {
  validate(config);
  Pipeline p(config);
  write_derivs(p, log);
  return kExitOk;
}

int cmd_cf(const RunConfig& config, std::ostream& log) {
  validate(config);
  Pipeline p(config);
  write_cf(p, log);
  return kExitOk;
}

int cmd_solve(const RunConfig& config, std::ostream& log) {
  validate(config);
  Pipeline p(config);
  write_solve(p, log);
  return kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& log) {
  validate(config);
  Pipeline p(config);
  return write_verify(p, log) ? kExitOk : kExitVerification;
}

int cmd_reproduce(const RunConfig& config, std::ostream& log) {
  validate(config);
  Pipeline p(config);
  write_derivs(p, log);
  write_cf(p, log);
  write_solve(p, log);
  return write_verify(p, log) ? kExitOk : kExitVerification;
}

int run_guarded(Command command, const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    return command(config, log);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation_error(e.kind()) ? kExitValidation : kExitNumerical;
  }
}

}  // namespace tempsep::cli
