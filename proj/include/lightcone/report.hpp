#ifndef LIGHTCONE_REPORT_HPP
#define LIGHTCONE_REPORT_HPP

#include "lightcone/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lightcone {

// Shortest text that parses back to the same double.
std::string format_real(Real v);

struct CsvTable {
  std::string name = "samples";
  std::vector<std::string> columns;
  std::vector<std::vector<Real>> rows;

  std::string to_string() const;
};

// Structured experiment result: the full parameter set needed to reproduce
// the run, scalar metrics, pass/fail flags and per-sample CSV rows.
struct ExperimentReport {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();
  std::map<std::string, Real> metrics;
  std::map<std::string, bool> flags;
  std::vector<CsvTable> tables;
  Real runtime_s = 0.0;

  bool all_pass() const;

  // every metric must be finite
  void validate() const;

  nlohmann::json to_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);

  // report.json plus one <table name>.csv per table
  void write(const std::filesystem::path& out_dir) const;

  // one line per metric and per flag
  std::string summary() const;
};

// Least-squares slope and intercept of y against x.
struct LineFit {
  Real slope = 0.0;
  Real intercept = 0.0;
};
LineFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y);

}  // namespace lightcone

#endif
