#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "app/report.hpp"
#include "app/scenario.hpp"

namespace colombeau::app {

enum class Stage { Certify, Full };

struct RunOptions {
  std::optional<std::pair<int, int>> grid;
  std::optional<Method> method;
  Format format = Format::Csv;
  std::string out_dir;
};

/// "k0..k1"; throws ConfigError.
std::pair<int, int> parse_grid_range(const std::string& s);
Scenario apply_overrides(Scenario sc, const RunOptions& opt);

/// certify -> solve -> diagnose. Module errors end up in the report; the
/// exit code is 0, 2 (hypothesis failure) or 1.
Report run_scenario(const Scenario& sc, Stage stage = Stage::Full);

enum class Quantity { SupNorm, EscapeTime, Gap, Asymmetry };
Quantity parse_quantity(const std::string& s);
std::string to_string(Quantity q);

/// (eps, value) table of the quantity with a log-log fit and a fit against
/// log(1/eps). `deriv` names the variables of d^alpha F for sup-norm.
Report sweep(const Scenario& sc, Quantity q, const std::vector<std::string>& deriv = {});

std::string output_dir(const Scenario& sc, const RunOptions& opt, const std::string& sub = "");

}  // namespace colombeau::app
