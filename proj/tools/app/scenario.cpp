#include "app/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "app/gallery.hpp"

namespace colombeau::app {

using nlohmann::json;

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Ivp: return "ivp";
    case Kind::IvpParam: return "ivp-param";
    case Kind::IvpInitialFamily: return "ivp-initial-family";
    case Kind::Frobenius: return "frobenius";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

double number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(path, "expected a number (or \"inf\", \"-inf\")");
}

double finite_number(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

// Expressions may be written as numbers too.
std::string expression(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    return buf;
  }
  fail(path, "expected an expression string");
}

std::vector<std::string> expressions(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of expressions");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(expression(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(finite_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// [lo, hi] for an interval, [[lo, hi], ...] per axis otherwise.
Box box(const json& j, const std::string& path, bool interval_ok) {
  if (!j.is_array()) fail(path, "expected an array of [lo, hi] pairs");
  std::vector<double> lo, hi;
  if (interval_ok && j.size() == 2 && !j[0].is_array()) {
    lo.push_back(number(j[0], path + "[0]"));
    hi.push_back(number(j[1], path + "[1]"));
  } else {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      if (!j[i].is_array() || j[i].size() != 2) fail(p, "expected [lo, hi]");
      lo.push_back(number(j[i][0], p + "[0]"));
      hi.push_back(number(j[i][1], p + "[1]"));
    }
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) fail(path, "lower bound above upper bound on axis " + std::to_string(i));
  }
  return Box(lo, hi);
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing");
  return j.at(key);
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) fail(path + "." + k, "unknown key");
  }
}

template <class F>
auto with_context(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

}  // namespace

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) fail("$", "expected an object");
  check_keys(j, "$",
             {"schema_version", "name", "description", "kind", "grid", "method", "definitions", "rhs", "I", "U",
              "P", "V", "t0", "t0_net", "x0", "y0", "alpha", "L", "beta", "lambda", "r_fraction", "evaluate",
              "escape", "classical", "perturbation", "h", "p_samples", "p_per_axis", "out"});
  Scenario sc;
  sc.schema_version = integer(need(j, "schema_version", "$"), "$.schema_version");
  if (sc.schema_version != kSchemaVersion) {
    fail("$.schema_version", "unsupported version " + std::to_string(sc.schema_version));
  }
  sc.name = string(need(j, "name", "$"), "$.name");
  if (sc.name.empty()) fail("$.name", "must not be empty");
  if (j.contains("description")) sc.description = string(j["description"], "$.description");

  const std::string kind = string(need(j, "kind", "$"), "$.kind");
  if (kind == "ivp") sc.kind = Kind::Ivp;
  else if (kind == "ivp-param") sc.kind = Kind::IvpParam;
  else if (kind == "ivp-initial-family") sc.kind = Kind::IvpInitialFamily;
  else if (kind == "frobenius") sc.kind = Kind::Frobenius;
  else fail("$.kind", "expected ivp, ivp-param, ivp-initial-family or frobenius");

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) fail("$.grid", "expected an object");
    check_keys(g, "$.grid", {"k0", "k1", "eps0"});
    if (g.contains("k0")) sc.k0 = integer(g["k0"], "$.grid.k0");
    if (g.contains("k1")) sc.k1 = integer(g["k1"], "$.grid.k1");
    if (g.contains("eps0")) sc.eps0 = finite_number(g["eps0"], "$.grid.eps0");
  }
  if (sc.k0 < 0 || sc.k1 < sc.k0 || sc.k1 > 60) fail("$.grid", "need 0 <= k0 <= k1 <= 60");
  if (!(sc.eps0 > 0.0 && sc.eps0 <= 1.0)) fail("$.grid.eps0", "must lie in (0, 1]");

  if (j.contains("method")) {
    const std::string m = string(j["method"], "$.method");
    if (m == "rk") sc.method = Method::AdaptiveRK;
    else if (m == "picard") sc.method = Method::Picard;
    else fail("$.method", "expected rk or picard");
  }

  if (j.contains("definitions")) {
    const json& d = j["definitions"];
    if (!d.is_array()) fail("$.definitions", "expected an array of [name, expression]");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string p = "$.definitions[" + std::to_string(i) + "]";
      if (!d[i].is_array() || d[i].size() != 2) fail(p, "expected [name, expression]");
      sc.definitions.emplace_back(string(d[i][0], p + "[0]"), expression(d[i][1], p + "[1]"));
    }
  }

  sc.rhs = expressions(need(j, "rhs", "$"), "$.rhs");
  sc.U = box(need(j, "U", "$"), "$.U", false);
  sc.alpha = finite_number(need(j, "alpha", "$"), "$.alpha");
  sc.beta = finite_number(need(j, "beta", "$"), "$.beta");
  sc.L = box(need(j, "L", "$"), "$.L", false);
  sc.x0 = expressions(need(j, "x0", "$"), "$.x0");
  const std::size_t n = sc.U.dim();
  if (n == 0) fail("$.U", "needs at least one axis");
  if (sc.x0.size() != n) fail("$.x0", "expected " + std::to_string(n) + " components");

  if (sc.kind == Kind::Frobenius) {
    for (const char* k : {"I", "P", "t0", "t0_net", "evaluate", "escape", "classical", "perturbation", "h",
                          "p_samples", "p_per_axis", "method"}) {
      if (j.contains(k)) fail(std::string("$.") + k, "not used by frobenius scenarios");
    }
    sc.V = box(need(j, "V", "$"), "$.V", false);
    sc.y0 = expressions(need(j, "y0", "$"), "$.y0");
    if (sc.L.dim() != sc.V.dim()) fail("$.L", "expected " + std::to_string(sc.V.dim()) + " axes (L lives in V)");
    if (sc.y0.size() != sc.V.dim()) fail("$.y0", "expected " + std::to_string(sc.V.dim()) + " components");
    if (sc.rhs.size() != n * sc.V.dim()) {
      fail("$.rhs", "expected m*n = " + std::to_string(n * sc.V.dim()) + " components (row-major)");
    }
    if (j.contains("lambda")) sc.lambda = finite_number(j["lambda"], "$.lambda");
    if (j.contains("r_fraction")) sc.r_fraction = finite_number(j["r_fraction"], "$.r_fraction");
  } else {
    for (const char* k : {"V", "y0", "lambda", "r_fraction"}) {
      if (j.contains(k)) fail(std::string("$.") + k, "only used by frobenius scenarios");
    }
    if (sc.L.dim() != n) fail("$.L", "expected " + std::to_string(n) + " axes");
    sc.I = box(need(j, "I", "$"), "$.I", true);
    if (sc.I.dim() != 1) fail("$.I", "must be an interval");
    if (sc.rhs.size() != n) fail("$.rhs", "expected " + std::to_string(n) + " components");
    sc.t0 = finite_number(need(j, "t0", "$"), "$.t0");
    if (j.contains("t0_net")) {
      sc.t0_net = expression(j["t0_net"], "$.t0_net");
    } else {
      sc.t0_net = expression(j["t0"], "$.t0");
    }
    if (j.contains("P")) sc.P = box(j["P"], "$.P", false);
    if (sc.kind == Kind::IvpParam && sc.P.dim() == 0) fail("$.P", "ivp-param scenarios need a parameter box");
    if (sc.kind == Kind::Ivp && sc.P.dim() != 0) fail("$.P", "use kind ivp-param for parameters");
    if (sc.kind == Kind::IvpInitialFamily) {
      sc.h_target = finite_number(need(j, "h", "$"), "$.h");
      if (!(sc.h_target > 0.0)) fail("$.h", "must be positive");
    } else if (j.contains("h")) {
      fail("$.h", "only used by ivp-initial-family scenarios");
    }
    if (j.contains("p_samples")) {
      const json& ps = j["p_samples"];
      if (!ps.is_array()) fail("$.p_samples", "expected an array of points");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string p = "$.p_samples[" + std::to_string(i) + "]";
        sc.p_samples.push_back(numbers(ps[i], p));
        if (sc.p_samples.back().size() != sc.P.dim()) fail(p, "wrong dimension");
      }
    }
    if (j.contains("p_per_axis")) {
      const int k = integer(j["p_per_axis"], "$.p_per_axis");
      if (k < 1 || k > 65) fail("$.p_per_axis", "must lie in 1..65");
      sc.p_per_axis = static_cast<std::size_t>(k);
    }
    if (j.contains("evaluate")) {
      const json& e = j["evaluate"];
      if (!e.is_object()) fail("$.evaluate", "expected an object");
      check_keys(e, "$.evaluate", {"t"});
      sc.evaluate_t = numbers(need(e, "t", "$.evaluate"), "$.evaluate.t");
    }
    if (j.contains("escape")) {
      const json& e = j["escape"];
      if (!e.is_object()) fail("$.escape", "expected an object");
      check_keys(e, "$.escape", {"horizon", "scale"});
      sc.escape_horizon = finite_number(need(e, "horizon", "$.escape"), "$.escape.horizon");
      if (!(*sc.escape_horizon > 0.0)) fail("$.escape.horizon", "must be positive");
      if (e.contains("scale")) sc.escape_scale = expression(e["scale"], "$.escape.scale");
    }
    if (j.contains("classical")) {
      const json& e = j["classical"];
      if (!e.is_object()) fail("$.classical", "expected an object");
      check_keys(e, "$.classical", {"t_end"});
      sc.classical_t_end = finite_number(need(e, "t_end", "$.classical"), "$.classical.t_end");
      if (!(*sc.classical_t_end > 0.0)) fail("$.classical.t_end", "must be positive");
    }
    if (j.contains("perturbation")) {
      const json& e = j["perturbation"];
      if (!e.is_object()) fail("$.perturbation", "expected an object");
      check_keys(e, "$.perturbation", {"x0", "rhs"});
      if (e.contains("x0")) {
        sc.perturb_x0 = expressions(e["x0"], "$.perturbation.x0");
        if (sc.perturb_x0.size() != n) fail("$.perturbation.x0", "expected " + std::to_string(n) + " components");
      }
      if (e.contains("rhs")) {
        sc.perturb_rhs = expressions(e["rhs"], "$.perturbation.rhs");
        if (sc.perturb_rhs.size() != n) fail("$.perturbation.rhs", "expected " + std::to_string(n) + " components");
      }
    }
  }
  if (j.contains("out")) sc.out = string(j["out"], "$.out");
  return sc;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, origin + ": " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, origin + ": " + std::string(e.what()).substr(std::string("ConfigError: ").size()));
  }
}

Scenario load_scenario(const std::string& path_or_name) {
  // a directory named like a gallery scenario (e.g. an earlier --out) is not a config
  std::error_code ec;
  std::ifstream in;
  if (std::filesystem::is_regular_file(path_or_name, ec)) in.open(path_or_name);
  if (in.is_open()) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str(), path_or_name);
  }
  if (const auto* e = find_gallery(path_or_name)) return parse_scenario_text(std::string(e->json), path_or_name);
  throw Error(ErrorCode::ConfigError, path_or_name + ": no such file or gallery scenario");
}

dsl::Definitions definitions(const Scenario& sc) {
  return with_context("$.definitions", [&] { return parse_definitions(sc.definitions); });
}

IvpProblem build_ivp(const Scenario& sc, const dsl::Definitions& defs, const std::vector<std::string>* rhs,
                     const std::vector<std::string>* x0) {
  const EpsGrid grid = sc.grid();
  const std::size_t n = sc.U.dim();
  const auto sig = dsl::Signature::ode(n, sc.P.dim());
  Box domain = product(sc.I, sc.U);
  if (sc.P.dim() > 0) domain = product(domain, sc.P);
  IvpProblem prob;
  prob.I = sc.I;
  prob.U = sc.U;
  prob.F = with_context(rhs ? "$.perturbation.rhs" : "$.rhs",
                        [&] { return parse_net(rhs ? *rhs : sc.rhs, sig, grid, domain, defs); });
  prob.t0 = sc.t0;
  prob.t0_net = with_context("$.t0_net", [&] { return point_net({sc.t0_net}, grid, defs); });
  prob.x0_net = with_context(x0 ? "$.perturbation.x0" : "$.x0", [&] { return point_net(x0 ? *x0 : sc.x0, grid, defs); });
  prob.alpha = sc.alpha;
  prob.L = sc.L;
  prob.beta = sc.beta;
  return prob;
}

ParamIvpProblem build_param(const Scenario& sc, const dsl::Definitions& defs) {
  return ParamIvpProblem{build_ivp(sc, defs), sc.P};
}

FrobeniusProblem build_frobenius(const Scenario& sc, const dsl::Definitions& defs) {
  const EpsGrid grid = sc.grid();
  const auto sig = dsl::Signature::frobenius(sc.U.dim(), sc.V.dim());
  FrobeniusProblem prob;
  prob.U = sc.U;
  prob.V = sc.V;
  prob.F = with_context("$.rhs", [&] { return parse_net(sc.rhs, sig, grid, product(sc.U, sc.V), defs); });
  prob.x0_net = with_context("$.x0", [&] { return point_net(sc.x0, grid, defs); });
  prob.y0_net = with_context("$.y0", [&] { return point_net(sc.y0, grid, defs); });
  prob.alpha = sc.alpha;
  prob.L = sc.L;
  prob.beta = sc.beta;
  prob.lambda = sc.lambda;
  prob.r_fraction = sc.r_fraction;
  return prob;
}

}  // namespace colombeau::app
