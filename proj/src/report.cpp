#include "lightcone/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lightcone {

std::string format_real(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvTable::to_string() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) os << ',';
    os << columns[c];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      os << format_real(row[c]);
    }
    os << '\n';
  }
  return os.str();
}

bool ExperimentReport::all_pass() const {
  for (const auto& [name, ok] : flags)
    if (!ok) return false;
  return true;
}

void ExperimentReport::validate() const {
  for (const auto& [name, value] : metrics)
    if (!std::isfinite(value))
      throw std::runtime_error("report metric is not finite: " + name);
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["params"] = params;
  j["metrics"] = metrics;
  j["flags"] = flags;
  j["runtime_s"] = runtime_s;
  return j;
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.params = j.at("params");
  r.metrics = j.at("metrics").get<std::map<std::string, Real>>();
  r.flags = j.at("flags").get<std::map<std::string, bool>>();
  r.runtime_s = j.at("runtime_s").get<Real>();
  return r;
}

void ExperimentReport::write(const std::filesystem::path& out_dir) const {
  validate();
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir / "report.json");
    if (!os) throw std::runtime_error("cannot write report.json");
    os << to_json().dump(2) << '\n';
  }
  for (const auto& table : tables) {
    std::ofstream os(out_dir / (table.name + ".csv"), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + table.name + ".csv");
    os << table.to_string();
  }
}

std::string ExperimentReport::summary() const {
  std::ostringstream os;
  for (const auto& [name, value] : metrics)
    os << experiment << " metric " << name << " = " << format_real(value)
       << '\n';
  for (const auto& [name, ok] : flags)
    os << experiment << " flag " << name << " = " << (ok ? "pass" : "FAIL")
       << '\n';
  return os.str();
}

LineFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need at least two points");
  const Real n = Real(x.size());
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const Real denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

}  // namespace lightcone
