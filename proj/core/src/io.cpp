#include "tempsep/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tempsep/error.hpp"

namespace tempsep::io {

namespace {

std::string printf_double(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

ordered_json doubles(const std::vector<double>& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(x);
  return out;
}

ordered_json defect_json(const contfrac::Defect& d) {
  return {{"location", d.location},
          {"multiplicity", d.multiplicity},
          {"residual", d.residual},
          {"numerator_residual", d.numerator_residual}};
}

}  // namespace

std::string format_double(double value) { return printf_double("%.17g", value); }

std::string format_short(double value, int digits) {
  char fmt[16];
  std::snprintf(fmt, sizeof fmt, "%%.%de", digits - 1);
  return printf_double(fmt, value);
}

ordered_json rational_json(const Rational& value) {
  return {{"numerator", value.get_num().get_str()},
          {"denominator", value.get_den().get_str()},
          {"value", to_double(value)}};
}

Rational rational_from_json(const ordered_json& node) {
  Rational r(mpz_class(node.at("numerator").get<std::string>()),
             mpz_class(node.at("denominator").get<std::string>()));
  r.canonicalize();
  return r;
}

ordered_json to_json(const moments::DerivativeTable& table) {
  ordered_json values = ordered_json::array();
  for (int n = 0; n <= table.max_order(); ++n) {
    ordered_json row = rational_json(table.values[static_cast<std::size_t>(n)]);
    row["n"] = n;
    row["display"] = table.value_string(n, 6);
    values.push_back(std::move(row));
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "derivative_table"},
          {"spectrum", table.spectrum},
          {"params", table.params.describe()},
          {"route", moments::to_string(table.route)},
          {"exact", table.exact},
          {"max_order", table.max_order()},
          {"diagnostics", table.diagnostics},
          {"derivatives", std::move(values)}};
}

moments::DerivativeTable derivative_table_from_json(const ordered_json& node) {
  if (node.value("schema_version", 0) != kSchemaVersion ||
      node.value("kind", std::string()) != "derivative_table") {
    throw Error(ErrorKind::kIo, "not a derivative table of schema version " +
                                    std::to_string(kSchemaVersion));
  }
  moments::DerivativeTable table;
  table.spectrum = node.at("spectrum").get<std::string>();
  table.exact = node.at("exact").get<bool>();
  table.route = node.at("route").get<std::string>() == "general" ? moments::Route::kGeneral
                                                                  : moments::Route::kComptonization;
  table.diagnostics = node.at("diagnostics").get<std::vector<std::string>>();
  for (const auto& row : node.at("derivatives")) table.values.push_back(rational_from_json(row));
  return table;
}

ordered_json to_json(const contfrac::ContinuedFraction& cf) {
  ordered_json coeffs = ordered_json::array();
  for (std::size_t n = 0; n < cf.coefficients.size(); ++n) {
    ordered_json row = rational_json(cf.coefficients[n]);
    row["n"] = n;
    row["display"] = to_scientific_string(cf.coefficients[n], 6);
    coeffs.push_back(std::move(row));
  }
  ordered_json out = {{"schema_version", kSchemaVersion},
                      {"kind", "continued_fraction"},
                      {"truncation", cf.truncation()},
                      {"coefficients", std::move(coeffs)},
                      {"diagnostics", cf.diagnostics}};
  out["zero_pivot"] = cf.zero_pivot ? ordered_json(*cf.zero_pivot) : ordered_json(nullptr);
  return out;
}

ordered_json to_json(const contfrac::DefectReport& report) {
  ordered_json defects = ordered_json::array();
  for (const auto& d : report.defects) defects.push_back(defect_json(d));
  ordered_json cancelled = ordered_json::array();
  for (const auto& d : report.cancelled) cancelled.push_back(defect_json(d));
  return {{"defects", std::move(defects)}, {"cancelled", std::move(cancelled)}};
}

ordered_json to_json(const contfrac::Selection& selection) {
  ordered_json levels = ordered_json::array();
  for (const auto& l : selection.levels) {
    ordered_json tail = std::isfinite(l.tail_value) ? ordered_json(l.tail_value) : ordered_json(nullptr);
    levels.push_back({{"N", l.level},
                      {"positive", l.positive},
                      {"tail_value", std::move(tail)},
                      {"within_asymptote", l.within_asymptote},
                      {"report", to_json(l.defects)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "approximant_selection"},
          {"selected_N", selection.level},
          {"no_admissible", selection.no_admissible},
          {"asymptote_fallback", selection.asymptote_fallback},
          {"levels", std::move(levels)}};
}

std::string table_csv(const moments::DerivativeTable& table, const contfrac::ContinuedFraction& cf) {
  std::ostringstream out;
  out << "n,theta_n,c_n\n";
  for (int n = 0; n <= table.max_order(); ++n) {
    out << n << ',' << table.value_string(n, 6) << ',';
    if (n <= cf.truncation()) out << to_scientific_string(cf.coefficients[static_cast<std::size_t>(n)], 6);
    out << '\n';
  }
  return out.str();
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::ostringstream out;
  out << "y,value,N\n";
  for (const auto& p : points) {
    out << format_double(p.y) << ',' << (std::isfinite(p.value) ? format_double(p.value) : "nan")
        << ',' << p.level << '\n';
  }
  return out.str();
}

std::string snapshot_csv(const transport::PdeSolution& solution, const transport::Snapshot& snapshot) {
  const double i = to_double(solution.params.i);
  std::ostringstream out;
  out << "x,F,f,G\n";
  for (std::size_t l = 0; l < snapshot.number_spectrum.size(); ++l) {
    const double x = solution.grid.centers[l];
    const double F = snapshot.number_spectrum[l];
    const double f = F * std::pow(x, -i);
    out << format_double(x) << ',' << format_double(F) << ',' << format_double(f) << ','
        << format_double(f * x * x * x) << '\n';
  }
  return out.str();
}

ordered_json manifest_json(const transport::PdeSolution& solution) {
  const auto& g = solution.grid;
  const auto& o = solution.options;
  ordered_json traces = {{"y", doubles(solution.trace.y)}, {"theta", doubles(solution.trace.theta)}};
  ordered_json moments = ordered_json::object();
  for (double idx : solution.trace.indices) {
    moments["I_" + format_double(idx)] = doubles(solution.trace.series(idx));
  }
  traces["moments"] = std::move(moments);

  ordered_json snapshots = ordered_json::array();
  for (const auto& s : solution.snapshots) snapshots.push_back(s.y);

  return {{"schema_version", kSchemaVersion},
          {"kind", "pde_manifest"},
          {"params", solution.params.describe()},
          {"initial_spectrum", solution.initial_description},
          {"temperature", solution.temperature_description},
          {"grid",
           {{"x_min", g.edges.front()},
            {"x_max", g.edges.back()},
            {"cells", g.cells()},
            {"spacing", "logarithmic"},
            {"y_end", g.y_end},
            {"snapshots", std::move(snapshots)}}},
          {"solver",
           {{"scheme", "finite volume, exponentially fitted flux, implicit Euler"},
            {"rel_tol", o.rel_tol},
            {"initial_step", o.initial_step},
            {"min_step", o.min_step},
            {"max_step", o.max_step},
            {"negativity_tolerance", o.negativity_tolerance},
            {"delta_variance", o.delta_variance}}},
          {"stats",
           {{"accepted_steps", solution.stats.accepted_steps},
            {"rejected_steps", solution.stats.rejected_steps},
            {"clipped_values", solution.stats.clipped_values},
            {"smallest_step", solution.stats.smallest_step},
            {"largest_step", solution.stats.largest_step}}},
          {"traces", std::move(traces)}};
}

ordered_json to_json(const verify::VerificationReport& report) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"y", r.y}, {"theta_in", r.theta_in}, {"theta_out", r.theta_out}, {"rel_dev", r.rel_dev}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "verification_report"},
          {"temperature", report.temperature},
          {"tolerance", report.tolerance},
          {"max_rel_dev", report.max_rel_dev},
          {"worst_y", report.worst_y},
          {"pass", report.pass},
          {"conservation",
           {{"number_drift", report.conservation.number_drift},
            {"number_meaningful", report.conservation.number_meaningful},
            {"energy_drift", report.conservation.energy_drift}}},
          {"rows", std::move(rows)}};
}

ordered_json to_json(const verify::MomentOdeReport& report) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.residuals) {
    rows.push_back({{"n", r.n},
                    {"y_start", r.y_start},
                    {"y_end", r.y_end},
                    {"finite_difference", r.finite_difference},
                    {"rhs", r.rhs},
                    {"scale", r.scale},
                    {"residual", r.residual}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "moment_ode_report"},
          {"tolerance", report.tolerance},
          {"max_residual", report.max_residual},
          {"pass", report.pass},
          {"residuals", std::move(rows)}};
}

std::string verification_csv(const verify::VerificationReport& report) {
  std::ostringstream out;
  out << "y,theta_in,theta_out,rel_dev\n";
  for (const auto& r : report.rows) {
    out << format_double(r.y) << ',' << format_double(r.theta_in) << ','
        << format_double(r.theta_out) << ',' << format_double(r.rel_dev) << '\n';
  }
  return out.str();
}

void write_text(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

ordered_json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kIo, path + ": " + e.what());
  }
}

}  // namespace tempsep::io
