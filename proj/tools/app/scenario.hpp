#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "colombeau/frobenius.hpp"
#include "colombeau/ivp.hpp"
#include "colombeau/param.hpp"
#include "colombeau/rhs_dsl.hpp"

namespace colombeau::app {

inline constexpr int kSchemaVersion = 1;

enum class Kind { Ivp, IvpParam, IvpInitialFamily, Frobenius };
std::string to_string(Kind k);

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string description;
  Kind kind = Kind::Ivp;
  int k0 = 0, k1 = 24;
  double eps0 = 0.125;
  Method method = Method::AdaptiveRK;
  std::vector<std::pair<std::string, std::string>> definitions;
  std::vector<std::string> rhs;

  // ODE geometry
  Box I, U, P;
  double t0 = 0.0;
  std::string t0_net;
  std::vector<std::string> x0;
  // Frobenius geometry (U is shared)
  Box V;
  std::vector<std::string> y0;
  double lambda = 0.9, r_fraction = 0.9;

  double alpha = 0.0, beta = 0.0;
  Box L;

  std::vector<double> evaluate_t;
  std::optional<double> escape_horizon;
  std::string escape_scale;
  std::optional<double> classical_t_end;
  std::vector<std::string> perturb_x0, perturb_rhs;
  double h_target = 0.0;
  std::vector<std::vector<double>> p_samples;
  std::size_t p_per_axis = 9;
  std::string out;

  EpsGrid grid() const { return EpsGrid::dyadic(k0, k1, eps0); }
  bool is_ivp() const { return kind != Kind::Frobenius; }
};

/// Throws Error(ConfigError) with a JSON path such as "$.grid.k1".
Scenario parse_scenario(const nlohmann::json& j);
Scenario parse_scenario_text(const std::string& text, const std::string& origin);
/// A file path, or the name of a bundled gallery scenario.
Scenario load_scenario(const std::string& path_or_name);

dsl::Definitions definitions(const Scenario& sc);

/// Problems built from the scenario. `rhs` and `x0` override the scenario's
/// sources (used for the perturbed problem of a gap sweep).
IvpProblem build_ivp(const Scenario& sc, const dsl::Definitions& defs,
                     const std::vector<std::string>* rhs = nullptr, const std::vector<std::string>* x0 = nullptr);
ParamIvpProblem build_param(const Scenario& sc, const dsl::Definitions& defs);
FrobeniusProblem build_frobenius(const Scenario& sc, const dsl::Definitions& defs);

}  // namespace colombeau::app
