#include <cmath>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "colombeau/eps_calculus.hpp"
#include "colombeau/gf_core.hpp"
#include "colombeau/rhs_dsl.hpp"

using namespace colombeau;

static void BM_ParseRhs(benchmark::State& state) {
  const std::string src = "sin(x) * H(t) + 0.5*cos(t) + atan(x/(1 + t^2)) - eps*exp(-x^2)";
  const auto sig = dsl::Signature::ode(1);
  for (auto _ : state) benchmark::DoNotOptimize(dsl::parse(src, sig));
}
BENCHMARK(BM_ParseRhs);

static void BM_EvalRhs(benchmark::State& state) {
  const EpsGrid grid = EpsGrid::dyadic();
  const auto F = parse_net({"sin(x) * H(t) + 0.5*cos(t) + atan(x/(1 + t^2))"}, dsl::Signature::ode(1), grid,
                           Box(std::vector<double>{-3, -10}, std::vector<double>{3, 10}));
  std::vector<double> x{0.1, 0.4}, out(1);
  for (auto _ : state) {
    x[0] += 1e-9;
    F.eval(1e-3, x, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_EvalRhs);

static void BM_SupOnCompact(benchmark::State& state) {
  const EpsGrid grid = EpsGrid::dyadic();
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> vars;
  for (std::size_t k = 0; k < n; ++k) vars.push_back("x" + std::to_string(k + 1));
  std::string src = "0";
  for (const auto& v : vars) src += " + sin(" + v + "/eps)";
  const Box K(std::vector<double>(n, -1), std::vector<double>(n, 1));
  const auto f = parse_net({src}, dsl::Signature(vars), grid, K.expanded(0.5));
  for (auto _ : state) benchmark::DoNotOptimize(sup_on_compact(f, K));
}
BENCHMARK(BM_SupOnCompact)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_ClassifyGrowth(benchmark::State& state) {
  const EpsGrid grid = EpsGrid::dyadic();
  const NumberNet net = NumberNet::from(grid, [](double e) { return 3.0 * std::pow(e, -2) + std::sin(1 / e); });
  const auto orders = default_orders();
  for (auto _ : state) benchmark::DoNotOptimize(classify_growth(net, orders));
}
BENCHMARK(BM_ClassifyGrowth);
