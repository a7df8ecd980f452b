#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "tempsep/contfrac.hpp"
#include "tempsep/moment_engine.hpp"
#include "tempsep/transport.hpp"
#include "tempsep/verify.hpp"

namespace tempsep::io {

inline constexpr int kSchemaVersion = 1;

using nlohmann::ordered_json;

// Fixed formatting so identical runs give byte-identical files.
std::string format_double(double value);               // 17 significant digits
std::string format_short(double value, int digits = 6);  // %.{digits-1}e

ordered_json rational_json(const Rational& value);
// Reads the exact "numerator"/"denominator" pair written by rational_json.
Rational rational_from_json(const ordered_json& node);

ordered_json to_json(const moments::DerivativeTable& table);
moments::DerivativeTable derivative_table_from_json(const ordered_json& node);

ordered_json to_json(const contfrac::ContinuedFraction& cf);
ordered_json to_json(const contfrac::DefectReport& report);
ordered_json to_json(const contfrac::Selection& selection);

// Table-I style CSV: n,theta_n,c_n with 6 significant digits; c_n blank past truncation.
std::string table_csv(const moments::DerivativeTable& table, const contfrac::ContinuedFraction& cf);

struct CurvePoint {
  double y;
  double value;
  int level;
};
// y,value,N
std::string curve_csv(const std::vector<CurvePoint>& points);

// x,F,f,G for one snapshot.
std::string snapshot_csv(const transport::PdeSolution& solution, const transport::Snapshot& snapshot);

// Grid, tolerances, theta description, solver stats and conservation traces.
ordered_json manifest_json(const transport::PdeSolution& solution);

ordered_json to_json(const verify::VerificationReport& report);
ordered_json to_json(const verify::MomentOdeReport& report);
// y,theta_in,theta_out,rel_dev
std::string verification_csv(const verify::VerificationReport& report);

void write_text(const std::string& path, const std::string& content);
ordered_json read_json(const std::string& path);

}  // namespace tempsep::io
