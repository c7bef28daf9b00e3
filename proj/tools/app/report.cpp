#include "app/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace colombeau::app {

using nlohmann::ordered_json;

Table::Table(std::string n, std::vector<std::string> extra) : name(std::move(n)) {
  columns = {"eps", "value"};
  columns.insert(columns.end(), extra.begin(), extra.end());
}

void Table::add(double eps, double value, const std::vector<double>& extra) {
  std::vector<double> row{eps, value};
  row.insert(row.end(), extra.begin(), extra.end());
  rows.push_back(std::move(row));
}

Table Table::from_net(std::string name, const NumberNet& net) {
  Table t(std::move(name));
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (std::isfinite(net[i])) t.add(net.grid()[i], net[i]);
  }
  return t;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
// JSON has no inf/nan; they become strings.
ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}
}  // namespace

ordered_json box_json(const Box& b) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i < b.dim(); ++i) a.push_back({num(b.lower(i)), num(b.upper(i))});
  return a;
}

ordered_json growth_json(const GrowthClass& g) {
  return {{"kind", to_string(g.kind)},
          {"order", g.order},
          {"constant", num(g.constant)},
          {"fit", {{"slope", num(g.fit.slope)}, {"intercept", num(g.fit.intercept)},
                   {"residual", num(g.fit.residual)}, {"points", g.fit.points}}},
          {"floor_points", g.floor_points},
          {"description", g.describe()}};
}

Report::Report(const std::string& scenario, const std::string& kind) {
  doc["schema_version"] = kReportSchemaVersion;
  doc["scenario"] = scenario;
  doc["kind"] = kind;
  doc["status"] = "ok";
  doc["exit_code"] = 0;
  doc["error"] = nullptr;
  doc["certificate"] = nullptr;
  doc["classifications"] = ordered_json::object();
  doc["fits"] = ordered_json::object();
  doc["verdicts"] = ordered_json::object();
  doc["values"] = ordered_json::object();
}

void Report::set_status(const std::string& status, int code) {
  doc["status"] = status;
  doc["exit_code"] = code;
  exit_code = code;
}

void Report::set_error(const Error& e) {
  ordered_json err{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (const auto* u = dynamic_cast<const UnboundedRhsError*>(&e)) err["growth_order"] = num(u->growth_order());
  if (const auto* x = dynamic_cast<const EscapeError*>(&e)) {
    err["eps"] = num(x->eps());
    err["time"] = num(x->time());
  }
  doc["error"] = err;
  if (is_hypothesis_failure(e.code())) {
    set_status("hypothesis-failure", 2);
  } else {
    set_status("error", 1);
  }
}

void Report::classify(const std::string& name, const GrowthClass& g) { doc["classifications"][name] = growth_json(g); }

void Report::fit(const std::string& name, const LogLogFit& f) {
  doc["fits"][name] = {{"model", "log|value| = slope log(eps) + intercept"}, {"slope", num(f.slope)},
                       {"intercept", num(f.intercept)}, {"residual", num(f.residual)}, {"points", f.points}};
}

void Report::fit(const std::string& name, const LinearFit& f) {
  doc["fits"][name] = {{"model", "value = slope log(1/eps) + intercept"}, {"slope", num(f.slope)},
                       {"intercept", num(f.intercept)}, {"residual", num(f.residual)}, {"points", f.points}};
}

void Report::verdict(const std::string& name, bool ok) { doc["verdicts"][name] = ok; }

void Report::value(const std::string& name, ordered_json v) {
  if (v.is_number_float()) v = num(v.get<double>());
  doc["values"][name] = std::move(v);
}

std::string table_csv(const Table& t) {
  std::string s;
  for (std::size_t c = 0; c < t.columns.size(); ++c) s += (c ? "," : "") + t.columns[c];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) s += (c ? "," : "") + format_double(row[c]);
    s += '\n';
  }
  return s;
}

std::vector<std::string> write_report(Report& report, const std::string& dir, Format format) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  ordered_json list = ordered_json::array();
  for (const auto& t : report.tables) {
    const std::string file = t.name + (format == Format::Csv ? ".csv" : ".json");
    const fs::path path = fs::path(dir) / file;
    std::ofstream out(path, std::ios::binary);
    if (format == Format::Csv) {
      out << table_csv(t);
    } else {
      ordered_json rows = ordered_json::array();
      for (const auto& r : t.rows) {
        ordered_json row = ordered_json::array();
        for (double v : r) row.push_back(num(v));
        rows.push_back(std::move(row));
      }
      out << ordered_json{{"name", t.name}, {"columns", t.columns}, {"rows", rows}}.dump() << '\n';
    }
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    written.push_back(path.string());
    list.push_back({{"name", t.name}, {"file", file}, {"columns", t.columns}, {"rows", t.rows.size()}});
  }
  report.doc["tables"] = list;
  report.doc["summary"] = report.summary;
  const fs::path rp = fs::path(dir) / "report.json";
  std::ofstream out(rp, std::ios::binary);
  out << report.doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + rp.string());
  written.push_back(rp.string());
  return written;
}

}  // namespace colombeau::app
