#include "app/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "colombeau/gf_core.hpp"
#include "colombeau/integrator.hpp"

namespace colombeau::app {

using nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

void record_certificate(Report& r, const HypothesisCertificate& c) {
  ordered_json j{{"a", c.a},
                 {"h", c.h},
                 {"t0", c.t0},
                 {"alpha", c.alpha},
                 {"beta", c.beta},
                 {"J", box_json(c.J)},
                 {"W", box_json(c.W)},
                 {"L", box_json(c.L)},
                 {"Q", box_json(c.Q)},
                 {"eps0", c.grid.eps0()},
                 {"lattice_max", c.lattice_max},
                 {"interval_bound", c.interval_bound ? num(*c.interval_bound) : ordered_json(nullptr)}};
  if (c.log_bound) {
    j["log_bound"] = {{"C1", num(c.log_bound->C1)}};
  } else {
    j["log_bound"] = nullptr;
  }
  r.doc["certificate"] = j;
  r.note("certified: a = " + format_double(c.a) + ", h = min(alpha, beta/a) = " + format_double(c.h) +
         ", eps0 = " + format_double(c.grid.eps0()));
  if (c.log_bound) r.note("log bound: sup|d_x F| <= C1 log(1/eps) with C1 = " + format_double(c.log_bound->C1));
}

void growth(Report& r, const std::string& name, const NumberNet& net, const GrowthOptions& go = {}) {
  const auto orders = default_orders();
  const GrowthClass g = classify_growth(net, orders, go);
  r.classify(name, g);
  r.note(name + ": " + g.describe());
}

// Per-eps sup |u| of the classical solution on [t0~, t0 + t_end], no certificate.
// The net lives on the eps values with a finite result; `blown_up` counts the
// others (overflow or failure inside the window).
std::optional<NumberNet> classical_sup(const IvpProblem& prob, double t_end, int& blown_up) {
  const EpsGrid& grid = prob.grid();
  std::vector<double> eps, out;
  for (std::size_t i : grid.active_indices()) {
    const auto x0 = prob.x0_net[i];
    const double ts = prob.t0_net[i][0];
    double s = 0.0;
    try {
      const OdeSystem sys = ode_system(prob.F, grid[i], prob.dim(), {}, x0);
      const auto tr = integrate(sys, ts, x0, prob.t0 + t_end);
      std::vector<double> x(prob.dim());
      for (std::size_t k = 0; k <= 256; ++k) {
        tr->eval(tr->t_lo() + (tr->t_hi() - tr->t_lo()) * k / 256.0, x);
        s = std::max(s, sup_norm(x));
      }
    } catch (const Error&) {
      s = kNaN;
    }
    if (std::isfinite(s)) {
      eps.push_back(grid[i]);
      out.push_back(s);
    } else {
      ++blown_up;
    }
  }
  if (eps.size() < EpsGrid::kMinActivePoints) return std::nullopt;
  return NumberNet(EpsGrid(eps, grid.eps0()), out);
}

struct EscapeSweep {
  Table table{"escape_time", {"scaled"}};
  NumberNet times;
  double max_deviation = kNaN;  // max |t* scale - 1| over eps <= 2^-8
};

EscapeSweep escape_sweep(const Scenario& sc, const dsl::Definitions& defs, const IvpProblem& prob) {
  EscapeSweep es;
  const EpsGrid& grid = prob.grid();
  const double horizon = sc.escape_horizon.value_or(sc.alpha);
  std::optional<NumberNet> scale;
  if (!sc.escape_scale.empty()) scale = number_net(sc.escape_scale, grid, defs);
  std::vector<double> times(grid.size(), kNaN);
  for (std::size_t i : grid.active_indices()) {
    const auto t = escape_time(prob, i, sc.t0 + horizon);
    if (!t) continue;
    const double rel = *t - prob.t0_net[i][0];
    times[i] = rel;
    const double scaled = scale ? rel * (*scale)[i] : kNaN;
    es.table.add(grid[i], rel, {scaled});
    if (scale && grid[i] <= std::ldexp(1.0, -8)) {
      const double d = std::abs(scaled - 1.0);
      es.max_deviation = std::isnan(es.max_deviation) ? d : std::max(es.max_deviation, d);
    }
  }
  es.times = NumberNet(grid, times);
  return es;
}

// Tables that explain a failed certification.
void failure_tables(const Scenario& sc, const dsl::Definitions& defs, const IvpProblem& prob, Report& r) {
  if (sc.escape_horizon) {
    auto es = escape_sweep(sc, defs, prob);
    r.tables.push_back(es.table);
    r.fit("escape_time", fit_loglog(es.times));
    if (!std::isnan(es.max_deviation)) {
      r.value("escape_time_scaled_max_deviation", es.max_deviation);
      r.note("escape time: max |t* scale - 1| for eps <= 2^-8 = " + format_double(es.max_deviation));
    }
  }
  if (sc.classical_t_end) {
    int blown_up = 0;
    const auto s = classical_sup(prob, *sc.classical_t_end, blown_up);
    if (blown_up > 0) {
      r.value("classical_sup_blown_up", blown_up);
      r.note("classical_sup: no finite value for " + std::to_string(blown_up) + " eps (overflow)");
    }
    if (s) {
      r.tables.push_back(Table::from_net("classical_sup", *s));
      growth(r, "classical_sup", *s);
    } else {
      r.note("classical_sup: too few finite values to classify");
    }
  }
}

std::vector<double> evaluation_times(const Scenario& sc, const Box& J, Report& r) {
  std::vector<double> ts;
  if (sc.evaluate_t.empty()) {
    const double c = 0.5 * (J.lower(0) + J.upper(0)), w = 0.5 * J.width(0);
    return {c - 0.5 * w, c, c + 0.5 * w};
  }
  for (double t : sc.evaluate_t) {
    if (J.contains(std::span<const double>(&t, 1))) {
      ts.push_back(t);
    } else {
      r.note("evaluate: t = " + format_double(t) + " lies outside J = " + J.to_string() + ", skipped");
    }
  }
  return ts;
}

std::vector<std::string> component_columns(std::size_t n, std::vector<std::string> cols) {
  if (n > 1) cols.push_back("component");
  return cols;
}

void add_components(Table& t, double eps, const std::vector<double>& u, std::vector<double> extra) {
  for (std::size_t c = 0; c < u.size(); ++c) {
    auto e = extra;
    if (u.size() > 1) e.push_back(static_cast<double>(c + 1));
    t.add(eps, u[c], e);
  }
}

NumberNet sup_F_table(const IvpProblem& prob, const std::optional<Box>& P, Report& r) {
  Box Q = prob.Q();
  if (P) Q = product(Q, *P);
  const NumberNet s = sup_on_compact(prob.F, Q);
  r.tables.push_back(Table::from_net("sup_F", s));
  const auto b = check_bounded(s);
  r.fit("sup_F", b.fit);
  r.value("sup_F_growth_order", b.growth_order);
  r.verdict("sup_F_bounded", b.bounded);
  return s;
}

template <class F>
bool certify_or_report(Report& r, F&& f) {
  try {
    f();
    return true;
  } catch (const Error& e) {
    if (!is_hypothesis_failure(e.code())) throw;
    r.set_error(e);
    r.note(std::string("hypothesis failure: ") + e.what());
    return false;
  }
}

void run_ivp(const Scenario& sc, Stage stage, Report& r) {
  const auto defs = definitions(sc);
  const IvpProblem prob = build_ivp(sc, defs);
  validate(prob);
  sup_F_table(prob, std::nullopt, r);

  HypothesisCertificate cert;
  if (!certify_or_report(r, [&] { cert = certify_hypotheses(prob); })) {
    failure_tables(sc, defs, prob, r);
    return;
  }
  record_certificate(r, cert);
  r.verdict("certified", true);
  r.verdict("log_bound", cert.log_bound.has_value());
  if (cert.log_bound) r.tables.push_back(Table::from_net("log_bound_ratio", cert.log_bound->ratio));
  if (stage == Stage::Certify) return;

  GeneralizedSolveOptions opts;
  opts.method = sc.method;
  opts.certificate = cert;
  const SolutionNet sol = solve_generalized(prob, opts);
  r.value("method", to_string(sol.method));
  r.value("total_steps", sol.total_steps);

  Table u("solution", component_columns(prob.dim(), {"t"}));
  const auto ts = evaluation_times(sc, sol.base.domain(), r);
  const auto& grid = sol.cert.grid;
  for (double t : ts) {
    double finest = kNaN;
    for (std::size_t i : grid.active_indices()) {
      const auto v = sol.base(grid[i], std::span<const double>(&t, 1));
      add_components(u, grid[i], v, {t});
      finest = v[0];
    }
    r.note("u(" + format_double(t) + ") at the smallest eps: " + format_double(finest));
  }
  r.tables.push_back(u);
  r.tables.push_back(Table::from_net("residual", sol.residual));
  r.tables.push_back(Table::from_net("cone_excess", sol.cone_excess));
  r.classify("solution_value", sol.value_growth);
  r.classify("solution_d1", sol.d1_growth);
  r.classify("solution_d2", sol.d2_growth);
  r.note("solution: " + sol.value_growth.describe());
  growth(r, "residual", sol.residual);
  r.verdict("moderate", sol.value_growth.moderate() && !sol.moderateness_uncertified);
  r.verdict("jdagger_containment", sol.jdagger_containment);
  r.verdict("c_bounded", sol.cbound_cert.has_value());
  r.value("warnings", sol.warnings);
}

void run_param(const Scenario& sc, Stage stage, Report& r) {
  const auto defs = definitions(sc);
  const ParamIvpProblem prob = build_param(sc, defs);
  validate(prob.base);
  sup_F_table(prob.base, prob.P, r);

  if (sc.kind == Kind::IvpInitialFamily) {
    if (stage == Stage::Certify) {
      HypothesisCertificate cert;
      if (!certify_or_report(r, [&] { cert = certify_parameters(prob); })) return;
      record_certificate(r, cert);
      r.verdict("certified", true);
      return;
    }
    ParamSolveOptions opts;
    InitialValueFamily fam;
    if (!certify_or_report(r, [&] { fam = solve_with_initial_data(prob, sc.h_target, opts); })) return;
    record_certificate(r, fam.v.cert);
    r.doc["family"] = {{"lambda", fam.lambda}, {"mu", fam.mu},       {"gamma", fam.gamma}, {"delta", fam.delta},
                       {"eta", fam.eta},       {"sigma", fam.sigma}, {"a", fam.a},         {"h_hat", fam.h_hat},
                       {"h", fam.h},           {"h1", fam.h1},       {"r", fam.r},         {"rho", fam.rho},
                       {"binding", fam.binding}, {"J1", box_json(fam.J1)}, {"U1", box_json(fam.U1)},
                       {"J", box_json(fam.J)}};
    r.note("initial-value family: h = " + format_double(fam.h) + ", h1 = " + format_double(fam.h1) +
           ", binding " + fam.binding);
    r.verdict("exact_at_t1", fam.exact_at_t1);

    const std::size_t n = prob.dim(), l = prob.pdim();
    std::vector<std::string> cols{"t", "t1"};
    for (std::size_t k = 0; k < n; ++k) cols.push_back(n == 1 ? "x1" : "x1_" + std::to_string(k + 1));
    for (std::size_t k = 0; k < l; ++k) cols.push_back(l == 1 ? "p" : "p" + std::to_string(k + 1));
    Table u("solution", component_columns(n, cols));
    const auto pts = [](const Box& b) {
      std::vector<std::vector<double>> out{b.lower(), b.center(), b.upper()};
      return out;
    };
    std::vector<double> pc = prob.P.center();
    const auto& grid = fam.v.cert.grid;
    for (std::size_t i : grid.active_indices()) {
      for (const auto& t1 : pts(fam.J1)) {
        for (const auto& x1 : pts(fam.U1)) {
          for (const auto& t : pts(fam.J)) {
            std::vector<double> in{t1[0]};
            in.insert(in.end(), x1.begin(), x1.end());
            in.insert(in.end(), pc.begin(), pc.end());
            in.push_back(t[0]);
            const auto v = fam.solution(grid[i], in);
            std::vector<double> extra{t[0], t1[0]};
            extra.insert(extra.end(), x1.begin(), x1.end());
            extra.insert(extra.end(), pc.begin(), pc.end());
            add_components(u, grid[i], v, extra);
          }
        }
      }
    }
    r.tables.push_back(u);
    r.tables.push_back(Table::from_net("residual", fam.v.residual));
    growth(r, "residual", fam.v.residual);
    return;
  }

  HypothesisCertificate cert;
  if (!certify_or_report(r, [&] { cert = certify_parameters(prob); })) {
    failure_tables(sc, defs, prob.base, r);
    return;
  }
  record_certificate(r, cert);
  r.verdict("certified", true);
  if (stage == Stage::Certify) return;

  ParamSolveOptions opts;
  opts.certificate = cert;
  const auto samples = sc.p_samples.empty() ? default_p_lattice(prob, sc.p_per_axis) : sc.p_samples;
  const ParamSolutionNet sol = solve_with_parameters(prob, samples, opts);
  const std::size_t n = prob.dim(), l = prob.pdim();
  std::vector<std::string> cols{"t"};
  for (std::size_t k = 0; k < l; ++k) cols.push_back(l == 1 ? "p" : "p" + std::to_string(k + 1));
  Table u("solution", component_columns(n, cols));
  const auto ts = evaluation_times(sc, sol.cert.J, r);
  const auto& grid = sol.cert.grid;
  for (std::size_t i : grid.active_indices()) {
    for (const auto& p : samples) {
      for (double t : ts) {
        std::vector<double> in = p;
        in.push_back(t);
        std::vector<double> extra{t};
        extra.insert(extra.end(), p.begin(), p.end());
        add_components(u, grid[i], sol.base(grid[i], in), extra);
      }
    }
  }
  r.tables.push_back(u);
  r.tables.push_back(Table::from_net("residual", sol.residual));
  r.tables.push_back(Table::from_net("initial_error", sol.initial_error));
  r.tables.push_back(Table::from_net("sensitivity", sol.sensitivity_check));
  r.value("p_samples", samples.size());
  r.value("classical_solves", sol.solver->solves());
  growth(r, "residual", sol.residual);
  double worst = 0.0;
  for (double v : sol.sensitivity_check.samples()) {
    if (std::isfinite(v)) worst = std::max(worst, v);
  }
  r.value("sensitivity_max", worst);
  r.note("sensitivity residual max: " + format_double(worst));
}

void record_frobenius_certificate(Report& r, const FrobeniusCertificate& c) {
  r.doc["certificate"] = {{"a", c.a},         {"delta", c.delta},      {"gamma", c.gamma},
                          {"eta", c.eta},     {"h", c.h},              {"r", c.r},
                          {"lambda", c.lambda}, {"x0", c.x0},          {"Q", box_json(c.Q)},
                          {"eps0", c.grid.eps0()}, {"lattice_max", c.lattice_max},
                          {"log_bound", {{"C1", num(c.log_bound.C1)}}}};
  r.note("certified: a = " + format_double(c.a) + ", h = " + format_double(c.h) + ", r = " + format_double(c.r));
}

void run_frobenius(const Scenario& sc, Stage stage, Report& r) {
  const auto defs = definitions(sc);
  const FrobeniusProblem prob = build_frobenius(sc, defs);
  validate(prob);
  const IntegrabilityReport integ = check_integrability(prob);
  r.tables.push_back(Table::from_net("asymmetry", integ.max_asymmetry));
  r.classify("asymmetry", integ.classification);
  r.verdict("integrable", integ.integrable);
  r.value("asymmetry_probes", integ.probes.size());
  r.note("asymmetry: " + integ.classification.describe());
  if (!integ.integrable) {
    Table t("asymmetry_probes", {"probe"});
    const auto& grid = prob.grid();
    for (std::size_t k = 0; k < integ.probes.size(); ++k) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = integ.probes[k].values[i];
        if (std::isfinite(v)) t.add(grid[i], v, {static_cast<double>(k)});
      }
    }
    r.tables.push_back(t);
    const Error e(ErrorCode::IntegrabilityRejected, "DF(v1, F v1)(v2) is not symmetric in (v1, v2): " +
                                                        integ.classification.describe());
    r.set_error(e);
    r.note(std::string("hypothesis failure: ") + e.what());
    return;
  }

  if (stage == Stage::Certify) {
    FrobeniusCertificate cert;
    if (!certify_or_report(r, [&] { cert = certify_frobenius(prob); })) return;
    record_frobenius_certificate(r, cert);
    r.tables.push_back(Table::from_net("sup_F", cert.sup_F));
    r.verdict("certified", true);
    return;
  }

  FrobeniusSolution sol;
  if (!certify_or_report(r, [&] { sol = solve_total(prob); })) return;
  record_frobenius_certificate(r, sol.cert);
  r.verdict("certified", true);
  r.tables.push_back(Table::from_net("sup_F", sol.cert.sup_F));
  r.tables.push_back(Table::from_net("residual", sol.residual));
  r.tables.push_back(Table::from_net("initial_error", sol.initial_error));
  r.classify("residual", sol.residual_class);

  const std::size_t n = prob.n(), m = prob.m();
  std::vector<std::pair<std::vector<double>, std::vector<double>>> probes;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> v(n, 0.0), w(n, 0.0);
      v[i] = 0.5;
      w[j] = 1.0;
      probes.emplace_back(v, w);
    }
  }
  const KNetReport k = k_net_residual(prob, sol, probes);
  Table kt("k_net", {"linear_defect", "sup_A"});
  for (std::size_t i = 0; i < k.sup_k.size(); ++i) {
    if (std::isfinite(k.sup_k[i])) kt.add(k.sup_k.grid()[i], k.sup_k[i], {k.linear_defect[i], k.sup_A[i]});
  }
  r.tables.push_back(kt);
  r.classify("k_net", k.classification);
  r.value("k_net_label", k.label);
  r.value("k_net_tolerance_floor", k.tolerance_floor);
  r.verdict("A_log_bounded", k.A_log_bounded);
  r.note("k net: " + k.label);

  std::vector<std::string> cols;
  for (std::size_t d = 0; d < n; ++d) cols.push_back("x" + std::to_string(d + 1));
  Table u("solution", component_columns(m, cols));
  const auto& grid = sol.cert.grid;
  std::vector<std::vector<double>> pts;
  const std::size_t total = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(n)));
  for (std::size_t q = 0; q < total; ++q) {
    std::vector<double> x(n);
    std::size_t rest = q;
    for (std::size_t d = 0; d < n; ++d) {
      const double s[3] = {sol.domain.lower(d), 0.5 * (sol.domain.lower(d) + sol.domain.upper(d)),
                           sol.domain.upper(d)};
      x[d] = s[rest % 3];
      rest /= 3;
    }
    pts.push_back(x);
  }
  for (std::size_t i : grid.active_indices()) {
    for (const auto& x : pts) add_components(u, grid[i], sol.u(grid[i], x), x);
  }
  r.tables.push_back(u);
}

std::vector<std::size_t> deriv_indices(const dsl::Signature& sig, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& nm : names) {
    const auto k = sig.lookup(nm);
    if (!k) throw Error(ErrorCode::ConfigError, "--deriv: unknown variable '" + nm + "'");
    out.push_back(*k);
  }
  return out;
}

[[noreturn]] void not_applicable(Quantity q, const Scenario& sc, const std::string& why) {
  throw Error(ErrorCode::QuantityNotApplicable,
              to_string(q) + " is not available for " + to_string(sc.kind) + " scenario '" + sc.name + "': " + why);
}

void sweep_table(Report& r, Quantity q, const NumberNet& net, std::vector<std::string> extra_cols = {},
                 const std::vector<std::vector<double>>& extra = {}, const GrowthOptions& go = {}) {
  std::string name = "sweep_" + to_string(q);
  std::replace(name.begin(), name.end(), '-', '_');
  Table t(name, std::move(extra_cols));
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!std::isfinite(net[i])) continue;
    t.add(net.grid()[i], net[i], extra.empty() ? std::vector<double>{} : extra[i]);
  }
  r.tables.push_back(t);
  const LogLogFit ll = fit_loglog(net, go);
  const LinearFit lin = fit_vs_log_inverse(net);
  r.fit("loglog", ll);
  r.fit("vs_log_inverse", lin);
  r.note(to_string(q) + ": log-log slope " + fmt("%.4g", ll.slope) + " (" + std::to_string(ll.points) +
         " points); vs log(1/eps): slope " + fmt("%.4g", lin.slope) + ", intercept " + fmt("%.4g", lin.intercept));
}

void do_sweep(const Scenario& sc, Quantity q, const std::vector<std::string>& deriv, Report& r) {
  const auto defs = definitions(sc);
  switch (q) {
    case Quantity::SupNorm: {
      if (sc.kind == Kind::Frobenius) {
        const FrobeniusProblem prob = build_frobenius(sc, defs);
        validate(prob);
        const auto x0 = frobenius_x0(prob);
        const Box Q = product(Box::cube(x0, prob.alpha), prob.L_beta());
        const auto idx = deriv_indices(dsl::Signature::frobenius(prob.n(), prob.m()), deriv);
        sweep_table(r, q, sup_on_compact(prob.F, Q, idx));
      } else {
        const IvpProblem prob = build_ivp(sc, defs);
        validate(prob);
        Box Q = prob.Q();
        if (sc.P.dim() > 0) Q = product(Q, sc.P);
        const auto idx = deriv_indices(dsl::Signature::ode(prob.dim(), sc.P.dim()), deriv);
        sweep_table(r, q, sup_on_compact(prob.F, Q, idx));
      }
      r.value("deriv", deriv);
      return;
    }
    case Quantity::EscapeTime: {
      if (sc.kind != Kind::Ivp) not_applicable(q, sc, "needs a plain ivp scenario");
      const IvpProblem prob = build_ivp(sc, defs);
      validate(prob);
      auto es = escape_sweep(sc, defs, prob);
      std::vector<std::vector<double>> scaled(prob.grid().size());
      for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = {kNaN};
      for (const auto& row : es.table.rows) scaled[prob.grid().index_of(row[0])] = {row[2]};
      sweep_table(r, q, es.times, {"scaled"}, scaled);
      if (!std::isnan(es.max_deviation)) r.value("scaled_max_deviation", es.max_deviation);
      return;
    }
    case Quantity::Gap: {
      if (sc.kind != Kind::Ivp) not_applicable(q, sc, "needs a plain ivp scenario");
      if (sc.perturb_x0.empty() && sc.perturb_rhs.empty()) not_applicable(q, sc, "no perturbation section");
      const IvpProblem prob = build_ivp(sc, defs);
      validate(prob);
      const HypothesisCertificate cert = certify_hypotheses(prob);
      record_certificate(r, cert);
      GeneralizedSolveOptions o1;
      o1.certificate = cert;
      o1.diagnostics = false;
      const SolutionNet s1 = solve_generalized(prob, o1);
      const IvpProblem pert = build_ivp(sc, defs, sc.perturb_rhs.empty() ? nullptr : &sc.perturb_rhs,
                                        sc.perturb_x0.empty() ? nullptr : &sc.perturb_x0);
      validate(pert);
      GeneralizedSolveOptions o2 = o1;
      o2.replay = &s1;
      const SolutionNet s2 = solve_generalized(pert, o2);
      const GapReport g = uniqueness_gap(s1, s2, cert, s1.J_dagger());
      std::vector<std::vector<double>> env(g.gap.size());
      for (std::size_t i = 0; i < env.size(); ++i) env[i] = {g.envelope[i]};
      GrowthOptions go;
      go.floor_per_eps = g.floor;
      sweep_table(r, q, g.gap, {"envelope"}, env, go);
      r.classify("gap", g.classification);
      r.value("C1", g.C1);
      r.value("C4", g.C4);
      r.value("h", g.h);
      r.value("data_order", g.data_order);
      r.value("envelope_exponent", g.envelope_exponent);
      r.verdict("within_envelope", g.within_envelope);
      r.verdict("negligible_m3", g.classification.negligible_to(3));
      if (!g.note.empty()) r.note(g.note);
      r.note("gap: " + g.classification.describe() + "; expected slope >= " + format_double(g.envelope_exponent));
      return;
    }
    case Quantity::Asymmetry: {
      if (sc.kind != Kind::Frobenius) not_applicable(q, sc, "needs a frobenius scenario");
      const FrobeniusProblem prob = build_frobenius(sc, defs);
      validate(prob);
      const IntegrabilityReport integ = check_integrability(prob);
      sweep_table(r, q, integ.max_asymmetry);
      r.classify("asymmetry", integ.classification);
      r.verdict("integrable", integ.integrable);
      return;
    }
  }
}

template <class F>
void guarded(Report& r, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    r.set_error(e);
    r.note(std::string("error: ") + e.what());
  } catch (const std::exception& e) {
    r.doc["error"] = {{"code", "Internal"}, {"message", e.what()}};
    r.set_status("error", 1);
    r.note(std::string("internal error: ") + e.what());
  }
}

}  // namespace

std::pair<int, int> parse_grid_range(const std::string& s) {
  const auto dots = s.find("..");
  int a = 0, b = 0;
  std::size_t used = 0;
  try {
    if (dots == std::string::npos) throw std::invalid_argument("");
    a = std::stoi(s.substr(0, dots), &used);
    if (used != dots) throw std::invalid_argument("");
    const std::string rest = s.substr(dots + 2);
    b = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "--grid: expected k0..k1, got '" + s + "'");
  }
  if (a < 0 || b < a || b > 60) throw Error(ErrorCode::ConfigError, "--grid: need 0 <= k0 <= k1 <= 60");
  return {a, b};
}

Scenario apply_overrides(Scenario sc, const RunOptions& opt) {
  if (opt.grid) {
    sc.k0 = opt.grid->first;
    sc.k1 = opt.grid->second;
  }
  if (opt.method) sc.method = *opt.method;
  return sc;
}

std::string output_dir(const Scenario& sc, const RunOptions& opt, const std::string& sub) {
  std::filesystem::path p = !opt.out_dir.empty() ? opt.out_dir : !sc.out.empty() ? sc.out : "out/" + sc.name;
  if (!sub.empty()) p /= sub;
  return p.string();
}

Report run_scenario(const Scenario& sc, Stage stage) {
  Report r(sc.name, to_string(sc.kind));
  r.doc["grid"] = {{"k0", sc.k0}, {"k1", sc.k1}, {"eps0", sc.eps0}};
  r.doc["stage"] = stage == Stage::Certify ? "certify" : "full";
  guarded(r, [&] {
    switch (sc.kind) {
      case Kind::Ivp: run_ivp(sc, stage, r); break;
      case Kind::IvpParam:
      case Kind::IvpInitialFamily: run_param(sc, stage, r); break;
      case Kind::Frobenius: run_frobenius(sc, stage, r); break;
    }
  });
  return r;
}

Quantity parse_quantity(const std::string& s) {
  if (s == "sup-norm") return Quantity::SupNorm;
  if (s == "escape-time") return Quantity::EscapeTime;
  if (s == "gap") return Quantity::Gap;
  if (s == "asymmetry") return Quantity::Asymmetry;
  throw Error(ErrorCode::ConfigError, "--quantity: expected sup-norm, escape-time, gap or asymmetry");
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::SupNorm: return "sup-norm";
    case Quantity::EscapeTime: return "escape-time";
    case Quantity::Gap: return "gap";
    case Quantity::Asymmetry: return "asymmetry";
  }
  return "?";
}

Report sweep(const Scenario& sc, Quantity q, const std::vector<std::string>& deriv) {
  Report r(sc.name, to_string(sc.kind));
  r.doc["grid"] = {{"k0", sc.k0}, {"k1", sc.k1}, {"eps0", sc.eps0}};
  r.doc["quantity"] = to_string(q);
  guarded(r, [&] { do_sweep(sc, q, deriv, r); });
  return r;
}

}  // namespace colombeau::app
