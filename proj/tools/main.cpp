#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "app/gallery.hpp"
#include "app/runner.hpp"

using namespace colombeau;
using namespace colombeau::app;

namespace {

struct Common {
  std::string config;
  std::string grid;
  std::string method;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "Scenario file or gallery name")->required();
  sub->add_option("--grid", c.grid, "eps = 2^-k for k = k0..k1");
  sub->add_option("--method", c.method, "rk or picard")->check(CLI::IsMember({"rk", "picard"}));
  sub->add_option("--out", c.out, "Output directory (default out/<name>)");
  sub->add_option("--format", c.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
}

RunOptions options(const Common& c) {
  RunOptions o;
  if (!c.grid.empty()) o.grid = parse_grid_range(c.grid);
  if (c.method == "rk") o.method = Method::AdaptiveRK;
  if (c.method == "picard") o.method = Method::Picard;
  o.format = c.format == "json" ? Format::Json : Format::Csv;
  o.out_dir = c.out;
  return o;
}

int finish(Report& r, const std::string& dir, Format format) {
  const auto files = write_report(r, dir, format);
  std::printf("%s [%s]: %s\n", r.doc["scenario"].get<std::string>().c_str(),
              r.doc["kind"].get<std::string>().c_str(), r.doc["status"].get<std::string>().c_str());
  for (const auto& line : r.summary) std::printf("  %s\n", line.c_str());
  std::printf("wrote %zu files to %s\n", files.size(), dir.c_str());
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized solutions of ODEs and total differential equations on eps-grids"};
  app.require_subcommand(1);

  auto* examples = app.add_subcommand("examples", "List the bundled scenarios");
  Common run_c, cert_c, solve_c, frob_c, sweep_c;
  auto* run = app.add_subcommand("run", "Certify, solve and diagnose a scenario");
  add_common(run, run_c);
  auto* certify = app.add_subcommand("certify", "Check the hypotheses only");
  add_common(certify, cert_c);
  auto* solve = app.add_subcommand("solve", "Solve an IVP scenario");
  add_common(solve, solve_c);
  auto* frob = app.add_subcommand("frobenius", "Solve a total differential equation scenario");
  add_common(frob, frob_c);
  auto* sw = app.add_subcommand("sweep", "Tabulate one quantity over the eps grid with fits");
  add_common(sw, sweep_c);
  std::string quantity;
  std::vector<std::string> deriv;
  sw->add_option("--quantity", quantity, "sup-norm, escape-time, gap or asymmetry")
      ->required()
      ->check(CLI::IsMember({"sup-norm", "escape-time", "gap", "asymmetry"}));
  sw->add_option("--deriv", deriv, "Variables of d^alpha F for sup-norm (e.g. x or x1,x1)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors share the internal-error exit code; --help stays 0
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (examples->parsed()) {
      for (const auto& e : list_examples()) std::printf("%-26s %s\n", e.name.c_str(), e.description.c_str());
      return 0;
    }
    auto run_with = [&](const Common& c, Stage stage, const char* require) {
      const RunOptions o = options(c);
      const Scenario sc = apply_overrides(load_scenario(c.config), o);
      if (std::string(require) == "ivp" && !sc.is_ivp()) {
        throw Error(ErrorCode::ConfigError, "'" + sc.name + "' is a frobenius scenario; use the frobenius command");
      }
      if (std::string(require) == "frobenius" && sc.is_ivp()) {
        throw Error(ErrorCode::ConfigError, "'" + sc.name + "' is not a frobenius scenario");
      }
      Report r = run_scenario(sc, stage);
      return finish(r, output_dir(sc, o), o.format);
    };
    if (run->parsed()) return run_with(run_c, Stage::Full, "");
    if (certify->parsed()) return run_with(cert_c, Stage::Certify, "");
    if (solve->parsed()) return run_with(solve_c, Stage::Full, "ivp");
    if (frob->parsed()) return run_with(frob_c, Stage::Full, "frobenius");
    if (sw->parsed()) {
      const RunOptions o = options(sweep_c);
      const Scenario sc = apply_overrides(load_scenario(sweep_c.config), o);
      const Quantity q = parse_quantity(quantity);
      Report r = sweep(sc, q, deriv);
      return finish(r, output_dir(sc, o, "sweep-" + to_string(q)), o.format);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return is_hypothesis_failure(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 1;
}
