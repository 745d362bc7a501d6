#include "htlab/scan_report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "htlab/errors.hpp"

namespace htlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m != y.size() || m < 2) throw DomainError("least_squares: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("least_squares: abscissae coincide");
  LineFit f{sxy / sxx, 0.0, 0.0};
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < m; ++i)
    f.residual_max = std::max(f.residual_max, std::abs(y[i] - f.slope * x[i] - f.intercept));
  return f;
}

void ScanReport::add(double xv, double value) {
  x.push_back(xv);
  values.push_back(value);
}

void ScanReport::fit() {
  fitted = false;
  degenerate = x.size() < 4;
  for (double v : values) degenerate = degenerate || !(v > 0) || !std::isfinite(v);
  if (degenerate) return;
  std::vector<double> ly(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) ly[i] = std::log2(values[i]);
  const LineFit f = least_squares(x, ly);
  slope = f.slope;
  intercept = f.intercept;
  residual_max = f.residual_max;
  fitted = true;
}

nlohmann::json ScanReport::to_json() const {
  nlohmann::json j;
  j["variable"] = variable;
  j["quantity"] = quantity;
  j["x"] = x;
  j["values"] = values;
  j["fitted"] = fitted;
  j["degenerate"] = degenerate;
  if (fitted) {
    j["slope"] = slope;
    j["intercept"] = intercept;
    j["residual_max"] = residual_max;
  }
  j["metadata"] = metadata;
  return j;
}

ScanReport ScanReport::from_json(const nlohmann::json& j) {
  ScanReport r;
  r.variable = j.at("variable").get<std::string>();
  r.quantity = j.value("quantity", std::string());
  r.x = j.at("x").get<std::vector<double>>();
  r.values = j.at("values").get<std::vector<double>>();
  if (r.x.size() != r.values.size()) throw StructuralError("scan report: x and values differ in length");
  r.fitted = j.value("fitted", false);
  r.degenerate = j.value("degenerate", false);
  if (r.fitted) {
    r.slope = j.at("slope").get<double>();
    r.intercept = j.at("intercept").get<double>();
    r.residual_max = j.at("residual_max").get<double>();
  }
  r.metadata = j.value("metadata", nlohmann::json::object());
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string ScanReport::to_csv() const {
  std::ostringstream os;
  os << csv_field(variable.empty() ? "variable" : variable) << ",value,log2value\r\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    os << format_double(x[i]) << ',' << format_double(values[i]) << ',';
    if (values[i] > 0) os << format_double(std::log2(values[i]));
    os << "\r\n";
  }
  return os.str();
}

std::string ScanReport::to_gnuplot() const {
  std::ostringstream os;
  os << "# " << variable << ' ' << quantity << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) os << format_double(x[i]) << ' ' << format_double(values[i]) << '\n';
  return os.str();
}

}  // namespace htlab
