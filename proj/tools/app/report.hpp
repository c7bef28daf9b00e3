#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "colombeau/eps_calculus.hpp"
#include "colombeau/errors.hpp"

namespace colombeau::app {

inline constexpr int kReportSchemaVersion = 1;

enum class Format { Csv, Json };

/// Long-format table; the first two columns are always eps and value.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  Table(std::string name, std::vector<std::string> extra = {});
  void add(double eps, double value, const std::vector<double>& extra = {});
  /// One row per grid index with a finite sample.
  static Table from_net(std::string name, const NumberNet& net);
};

struct Report {
  nlohmann::ordered_json doc;
  std::vector<Table> tables;
  std::vector<std::string> summary;
  int exit_code = 0;

  Report(const std::string& scenario, const std::string& kind);
  void set_status(const std::string& status, int exit_code);
  void set_error(const Error& e);
  void classify(const std::string& name, const GrowthClass& g);
  void fit(const std::string& name, const LogLogFit& f);
  void fit(const std::string& name, const LinearFit& f);
  void verdict(const std::string& name, bool ok);
  void value(const std::string& name, nlohmann::ordered_json v);
  void note(const std::string& line) { summary.push_back(line); }
};

std::string format_double(double v);
nlohmann::ordered_json box_json(const Box& b);
nlohmann::ordered_json growth_json(const GrowthClass& g);

/// Writes report.json and one file per table into dir; returns the paths.
std::vector<std::string> write_report(Report& report, const std::string& dir, Format format);
std::string table_csv(const Table& t);

}  // namespace colombeau::app
