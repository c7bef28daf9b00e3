#include <cmath>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "colombeau/frobenius.hpp"
#include "colombeau/ivp.hpp"
#include "colombeau/picard.hpp"
#include "colombeau/rhs_dsl.hpp"

using namespace colombeau;

namespace {

IvpProblem problem(const std::string& rhs, const std::string& t0, double t0_limit, double alpha, double beta) {
  const EpsGrid grid = EpsGrid::dyadic();
  IvpProblem p;
  p.I = Box::interval(-4, 4);
  p.U = Box::interval(-10, 10);
  p.F = parse_net({rhs}, dsl::Signature::ode(1), grid, product(p.I, p.U));
  p.t0 = t0_limit;
  p.t0_net = point_net({t0}, grid);
  p.x0_net = point_net({"0"}, grid);
  p.alpha = alpha;
  p.L = Box::point(std::vector<double>{0.0});
  p.beta = beta;
  return p;
}

}  // namespace

// One adaptive DP5 solve through a mollified jump of width 2 eps.
static void BM_IntegrateJump(benchmark::State& state) {
  const IvpProblem p = problem("H(t) + 0.1*sin(x)", "-1", -1, 2.5, 3);
  const double eps = std::ldexp(1.0, -static_cast<int>(state.range(0)));
  const double x0 = 0.0;
  const OdeSystem sys = ode_system(p.F, eps, 1, {}, std::vector<double>{x0});
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, -1.0, std::span<const double>(&x0, 1), 1.0));
}
BENCHMARK(BM_IntegrateJump)->Arg(4)->Arg(12)->Arg(24);

static void BM_Picard(benchmark::State& state) {
  const IvpProblem p = problem("sin(t) + cos(x)", "0", 0, 1, 2);
  const double x0 = 0.0;
  const OdeSystem sys = ode_system(p.F, 0.01, 1, {}, std::vector<double>{x0});
  for (auto _ : state) benchmark::DoNotOptimize(picard_solve(sys, 0.0, std::span<const double>(&x0, 1), -1.0, 1.0));
}
BENCHMARK(BM_Picard)->Unit(benchmark::kMillisecond);

static void BM_Certify(benchmark::State& state) {
  const IvpProblem p = problem("sin(x) * H(t) + 0.5*cos(t)", "0", 0, 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(certify_hypotheses(p));
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

// The whole net: certificate, per-eps solves and diagnostics.
static void BM_SolveGeneralized(benchmark::State& state) {
  const IvpProblem p = problem("H(t)", "-1", -1, 2.5, 3);
  GeneralizedSolveOptions o;
  o.diagnostics = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_generalized(p, o));
}
BENCHMARK(BM_SolveGeneralized)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_SolveTotal(benchmark::State& state) {
  const EpsGrid grid = EpsGrid::dyadic(0, 14);
  FrobeniusProblem p;
  p.U = Box(std::vector<double>(2, -2), std::vector<double>(2, 2));
  p.V = Box::interval(-5, 5);
  p.F = parse_net({"y", "y"}, dsl::Signature::frobenius(2, 1), grid, product(p.U, p.V));
  p.x0_net = point_net({"0", "0"}, grid);
  p.y0_net = point_net({"1"}, grid);
  p.alpha = 1.0;
  p.L = Box::point(std::vector<double>{1.0});
  p.beta = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_total(p));
}
BENCHMARK(BM_SolveTotal)->Unit(benchmark::kMillisecond);
