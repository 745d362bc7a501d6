#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace htlab {

/// A measured quantity over one independent variable, with an ordinary
/// least-squares fit of log2(value) against the variable.
struct ScanReport {
  std::string variable;
  std::string quantity;
  std::vector<double> x;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;
  double residual_max = 0.0;
  bool fitted = false;
  /// Set when a fit was requested but impossible (fewer than 4 points, or a value <= 0).
  bool degenerate = false;
  nlohmann::json metadata = nlohmann::json::object();

  void add(double xv, double value);
  /// Fits log2(values) = slope * x + intercept; marks the report degenerate instead of throwing.
  void fit();

  nlohmann::json to_json() const;
  static ScanReport from_json(const nlohmann::json& j);
  /// RFC 4180 CSV with columns variable, value, log2value (17 significant digits).
  std::string to_csv() const;
  /// Two whitespace-separated columns for gnuplot.
  std::string to_gnuplot() const;
};

/// OLS fit y = a x + b; returns {a, b, max |residual|}. Needs at least two distinct x.
struct LineFit {
  double slope, intercept, residual_max;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

/// Round-trip decimal form of a double (17 significant digits).
std::string format_double(double v);

}  // namespace htlab
